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

#include "gfcs/selfcheck.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "gfcs/directions.hpp"
#include "gfcs/model.hpp"
#include "gfcs/numerics.hpp"
#include "gfcs/random.hpp"

namespace gfcs {

namespace {

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

Vector random_vector(RandomStream& rng, std::size_t n, double lo, double hi) {
  Vector v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

// Worst relative error between reverse-mode and central-difference
// gradients of w^T f over `trials` random (x, w).
double gradient_check(const ScoreModel& m, RandomStream& rng, std::size_t trials) {
  const double h = 1e-4;
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Vector x = random_vector(rng, m.input_dim(), 0.0, 1.0);
    const Vector w = random_vector(rng, m.num_classes(), -1.0, 1.0);
    const Vector g = m.weighted_input_gradient(x, w);
    Vector fd(x.size());
    Vector probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
      probe[i] = x[i] + h;
      const double up = dot(w, m.forward(probe));
      probe[i] = x[i] - h;
      const double down = dot(w, m.forward(probe));
      probe[i] = x[i];
      fd[i] = (up - down) / (2 * h);
    }
    const double scale_ = std::max({l2_norm(g), l2_norm(fd), 1e-12});
    worst = std::max(worst, l2_distance(g, fd) / scale_);
  }
  return worst;
}

CheckResult check(std::string name, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    auto [ok, detail] = body();
    return {std::move(name), ok, std::move(detail)};
  } catch (const std::exception& e) {
    return {std::move(name), false, std::string("threw: ") + e.what()};
  }
}

}  // namespace

std::vector<CheckResult> run_selfcheck(const std::vector<std::string>& model_files) {
  std::vector<CheckResult> out;
  RandomStream rng(0x5e1fc4ec);

  for (const char* preset : {"linear", "mlp", "conv-a", "conv-b", "conv-c"}) {
    out.push_back(check(std::string("gradient-fd:") + preset, [&] {
      Network net(parse_architecture(preset, Shape{8, 8, 2}, 4), 4, 101);
      const double err = gradient_check(net, rng, 3);
      return std::pair{err <= 1e-4, "max relative error " + sci(err)};
    }));
  }

  out.push_back(check("bilinear-adjoint", [&] {
    double worst = 0.0;
    const Shape src{7, 5, 2};
    for (int t = 0; t < 20; ++t) {
      const Grid x(src, random_vector(rng, src.size(), -1, 1));
      const Grid y(Shape{11, 4, 2}, random_vector(rng, 11 * 4 * 2, -1, 1));
      const double lhs = dot(bilinear_resize(x, 11, 4).values, y.values);
      const double rhs = dot(x.values, bilinear_resize_adjoint(y, src).values);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
    }
    return std::pair{worst <= 1e-6, "max relative error " + sci(worst)};
  }));

  out.push_back(check("dct-orthonormal", [&] {
    const auto basis = dct2_basis(8, 6, 2, 4);
    double worst = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = i; j < basis.size(); ++j)
        worst = std::max(worst, std::abs(dot(basis[i].values, basis[j].values) - (i == j ? 1.0 : 0.0)));
    return std::pair{worst <= 1e-9, "max Gram deviation " + sci(worst)};
  }));

  out.push_back(check("svd-reconstruction", [&] {
    Matrix m(30, 8);
    for (double& v : m.data) v = rng.uniform(-1, 1);
    const SvdResult svd = thin_svd(m);
    double err = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i)
      for (std::size_t j = 0; j < m.cols; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < m.cols; ++l) acc += svd.u(i, l) * svd.s[l] * svd.v(j, l);
        err += (acc - m(i, j)) * (acc - m(i, j));
        norm += m(i, j) * m(i, j);
      }
    const double rel = std::sqrt(err / norm);
    return std::pair{rel <= 1e-8, "relative Frobenius residual " + sci(rel)};
  }));

  out.push_back(check("coimage-rank", [&] {
    const std::size_t classes = 5;
    Network net(parse_architecture("conv-b", Shape{12, 12, 3}, classes), classes, 202);
    const Vector x = random_vector(rng, net.input_dim(), 0, 1);
    std::vector<Vector> dirs;
    for (std::size_t i = 0; i < 3 * classes; ++i) dirs.push_back(ods_direction(net, x, rng));
    const SvdResult svd = thin_svd(Matrix::from_columns(dirs));
    const double tail = svd.s[classes] / svd.s[0];
    return std::pair{tail <= 1e-6, "relative singular value past rank C " + sci(tail)};
  }));

  out.push_back(check("projection-idempotent", [&] {
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const Vector c = random_vector(rng, 6, -1, 1);
      const Vector x = random_vector(rng, 6, -3, 3);
      const double nu = rng.uniform(0.1, 2.0);
      const Vector p = project_to_ball(x, c, nu);
      const Vector pp = project_to_ball(p, c, nu);
      worst = std::max(worst, l2_distance(p, pp));
      if (l2_distance(p, c) > nu * (1 + 1e-12)) return std::pair{false, std::string("left the ball")};
    }
    return std::pair{worst <= 1e-12, "max re-projection shift " + sci(worst)};
  }));

  for (const auto& path : model_files) {
    std::shared_ptr<Network> model;
    out.push_back(check("model-load:" + path, [&] {
      model = load_model(path);
      return std::pair{true, format_layers(model->architecture().layers)};
    }));
    if (!model) continue;
    out.push_back(check("gradient-fd:" + path, [&] {
      const double err = gradient_check(*model, rng, 2);
      return std::pair{err <= 1e-4, "max relative error " + sci(err)};
    }));
  }
  return out;
}

}  // namespace gfcs
