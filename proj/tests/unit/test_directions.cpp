/*
 * Copyright 2026 The gfcs Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "gfcs/directions.hpp"
#include "gfcs/recipes.hpp"
#include "oracles.hpp"

using namespace gfcs;

namespace {

Vector random_vector(RandomStream& rng, std::size_t n, double lo = -1, double hi = 1) {
  Vector v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("class rankings") {
  const Vector s{0.1, 2.0, 1.5, 2.0};
  const ClassRanking u = rank_classes(s);
  CHECK(u.source == 1);
  CHECK(u.target == 3);
  const ClassRanking t = rank_classes(s, 2);
  CHECK(t.target == 2);
  CHECK(t.source == 1);
  const ClassRanking a = rank_against(s, 2);
  CHECK(a.source == 2);
  CHECK(a.target == 1);
  CHECK(margin_loss(s, a) == doctest::Approx(0.5));
  CHECK(margin_loss(s, u) == 0.0);
  CHECK_THROWS_AS(rank_classes(s, 9), Error);
}

TEST_CASE("targeted log loss matches extended precision") {
  RandomStream rng(1);
  for (int i = 0; i < 200; ++i) {
    Vector f = random_vector(rng, 6, -30, 30);
    if (i % 3 == 0) f[2] = 900.0;
    if (i % 5 == 0) f[4] = -900.0;
    const std::size_t t = rng.below(6);
    const long double want = oracle::log_softmax(f, t);
    const double got = targeted_log_loss(f, t);
    REQUIRE(std::isfinite(got));
    REQUIRE(std::abs(static_cast<long double>(got) - want) <= 1e-12L * std::max(1.0L, std::abs(want)));
  }
}

TEST_CASE("margin gradient equals the ODS direction with w = e_t - e_s") {
  RandomStream rng(2);
  auto net = std::make_shared<Network>(parse_architecture("conv-b", Shape{10, 10, 3}, 6), 6, 4);
  for (int i = 0; i < 20; ++i) {
    const Vector x = random_vector(rng, 300, 0, 1);
    const Vector f = net->forward(x);
    const ClassRanking r = i % 2 ? rank_classes(f) : rank_classes(f, rng.below(6));
    Vector w(6, 0.0);
    w[r.target] = 1;
    w[r.source] = -1;
    const Vector a = surrogate_loss_gradient(*net, x, r, LossKind::Margin);
    const Vector b = ods_direction_with(*net, x, w);
    for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(std::abs(a[k] - b[k]) <= 1e-12);
    CHECK(l2_norm(a) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("targeted log gradient points along the finite-difference gradient") {
  RandomStream rng(3);
  auto net = std::make_shared<Network>(parse_architecture("mlp", flat_shape(12), 5), 5, 8);
  for (int i = 0; i < 10; ++i) {
    const Vector x = random_vector(rng, 12);
    const std::size_t t = rng.below(5);
    const Vector g = surrogate_loss_gradient(*net, x, ClassRanking{t == 0 ? 1u : 0u, t}, LossKind::TargetedLog);
    Vector fd = oracle::central_difference(
        [&](const Vector& z) { return static_cast<double>(oracle::log_softmax(net->forward(z), t)); }, x, 1e-5);
    normalize(fd);
    CHECK(oracle::rel_error(g, fd) <= 1e-6);
  }
}

TEST_CASE("ODS directions lie in the coimage of a linear model") {
  RandomStream rng(4);
  const std::size_t D = 8, C = 3;
  const Vector W = random_vector(rng, D * C);
  auto lin = make_linear(D, C, W, Vector(C, 0.0));
  RandomStream s1(10), s2(10);
  for (int i = 0; i < 10; ++i) {
    const Vector x = random_vector(rng, D);
    const Vector q = ods_direction(*lin, x, s1);
    CHECK(q == ods_direction(*lin, x, s2));
    CHECK(l2_norm(q) == doctest::Approx(1.0));
    // Residual after projecting onto span of the rows must vanish.
    Eigen::MatrixXd rows(C, D);
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t k = 0; k < D; ++k) rows(c, k) = W[c * D + k];
    Eigen::VectorXd qe = Eigen::Map<const Eigen::VectorXd>(q.data(), D);
    Eigen::VectorXd coef = rows.transpose().colPivHouseholderQr().solve(qe);
    CHECK((rows.transpose() * coef - qe).norm() <= 1e-10);
  }
}

TEST_CASE("degenerate directions") {
  auto zero = make_linear(4, 3, Vector(12, 0.0), Vector{1, 2, 3});
  RandomStream s(1);
  CHECK(code_of([&] { ods_direction(*zero, Vector(4, 0.0), s); }) == ErrorCode::DegenerateDirection);
  CHECK(code_of([&] { surrogate_loss_gradient(*zero, Vector(4, 0.0), {0, 1}, LossKind::Margin); }) ==
        ErrorCode::DegenerateDirection);
  OdsSource src({zero}, RandomStream(2), 100);
  CHECK(code_of([&] { src.next(Vector(4, 0.0)); }) == ErrorCode::DegenerateDirection);
}

TEST_CASE("fixed bases hand out elements once") {
  FixedBasisSource b("two", {{1, 0}, {0, 1}});
  CHECK(b.next(Vector{0, 0}) == Vector{1, 0});
  CHECK(b.next(Vector{0, 0}) == Vector{0, 1});
  CHECK(b.exhausted());
  CHECK(code_of([&] { b.next(Vector{0, 0}); }) == ErrorCode::Exhausted);

  RandomStream s(3);
  FixedBasisSource px = pixel_basis(10, s);
  std::set<std::size_t> hot;
  for (const auto& e : px.elements()) {
    CHECK(l2_norm(e) == 1.0);
    hot.insert(static_cast<std::size_t>(std::find(e.begin(), e.end(), 1.0) - e.begin()));
  }
  CHECK(hot.size() == 10);
}

TEST_CASE("DCT source orderings") {
  RandomStream s(4);
  const Shape shape{8, 8, 3};
  const FixedBasisSource low = dct_basis_source(shape, 4, s, BasisOrder::LowFrequencyFirst);
  const auto ref = dct2_basis(8, 8, 3, 4);
  REQUIRE(low.size() == ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(low.elements()[i] == ref[i].values);
  const FixedBasisSource rnd = dct_basis_source(shape, 4, s, BasisOrder::Random);
  REQUIRE(rnd.size() == ref.size());
  std::size_t same_place = 0, found = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    same_place += rnd.elements()[i] == ref[i].values;
    for (const auto& g : ref) found += rnd.elements()[i] == g.values;
  }
  CHECK(found == ref.size());
  CHECK(same_place < ref.size() / 2);
}

TEST_CASE("image PCA matches the covariance eigenvectors") {
  RandomStream rng(5);
  const std::size_t D = 12, n = 400, k = 4;
  LabeledDataset d;
  d.meta = {"file", 0, flat_shape(D), 2};
  for (std::size_t i = 0; i < n; ++i) {
    Vector x(D);
    for (std::size_t j = 0; j < D; ++j) x[j] = 3.0 + rng.normal() * (j < k ? 5.0 - static_cast<double>(j) : 0.3);
    d.inputs.push_back(x);
    d.labels.push_back(static_cast<int>(i % 2));
  }
  const FixedBasisSource b = image_pca_basis(d, k);
  REQUIRE(b.size() == k);
  Eigen::MatrixXd X(n, D);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < D; ++j) X(i, j) = d.inputs[i][j];
  Eigen::MatrixXd centred = X.rowwise() - X.colwise().mean();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centred.transpose() * centred);
  for (std::size_t c = 0; c < k; ++c) {
    Eigen::VectorXd e = eig.eigenvectors().col(static_cast<Eigen::Index>(D - 1 - c));
    double overlap = 0;
    for (std::size_t j = 0; j < D; ++j) overlap += e(j) * b.elements()[c][j];
    CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("leading singular vectors of a wide matrix match power iteration") {
  RandomStream rng(6);
  const std::size_t D = 5, n = 40;
  std::vector<Vector> cols;
  for (std::size_t i = 0; i < n; ++i) {
    Vector c(D);
    for (std::size_t j = 0; j < D; ++j) c[j] = rng.normal() * (1.0 + 2.0 * static_cast<double>(j == 2));
    cols.push_back(c);
  }
  const auto u = leading_left_singular_vectors(cols, 2);
  REQUIRE(u.size() == 2);
  // Power iteration on A A^T for the leading vector.
  Vector v(D, 1.0);
  for (int it = 0; it < 500; ++it) {
    Vector next(D, 0.0);
    for (const auto& c : cols) axpy(dot(c, v), c, next);
    normalize(next);
    v = next;
  }
  CHECK(std::abs(dot(v, u[0])) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(dot(u[0], u[1])) <= 1e-10);
}

TEST_CASE("gradient PCA basis spans the class-gradient subspace") {
  // With two classes every sampled gradient is +/- the normalized row difference.
  const Vector W{1, 2, 0, 0, 0, 1, 3, 0};
  auto lin = make_linear(4, 2, W, Vector{0, 0});
  std::vector<Vector> samples;
  RandomStream rng(7);
  for (int i = 0; i < 30; ++i) samples.push_back(random_vector(rng, 4));
  RandomStream s(8);
  const FixedBasisSource b = pca_gradient_basis(*lin, samples, 1, s);
  REQUIRE(b.size() == 1);
  Vector row0{1, 2, 0, 0}, row1{0, 1, 3, 0};
  normalize(row0);
  normalize(row1);
  // Either row may be the sampled class; the leading direction lies in their span.
  Eigen::Matrix<double, 4, 2> span;
  for (int j = 0; j < 4; ++j) {
    span(j, 0) = row0[static_cast<std::size_t>(j)];
    span(j, 1) = row1[static_cast<std::size_t>(j)];
  }
  Eigen::Vector4d q(b.elements()[0].data());
  Eigen::Vector2d coef = span.colPivHouseholderQr().solve(q);
  CHECK((span * coef - q).norm() <= 1e-10);
  CHECK(code_of([&] { pca_gradient_basis(*lin, {}, 1, s); }) == ErrorCode::InvalidInput);
}
