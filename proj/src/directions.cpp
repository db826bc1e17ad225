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

#include "gfcs/directions.hpp"

#include <cmath>

namespace gfcs {

ClassRanking rank_classes(ConstSpan scores, std::optional<std::size_t> target) {
  require(scores.size() >= 2, "rank_classes: need at least two classes");
  if (target) {
    require(*target < scores.size(), "rank_classes: target class out of range");
    return {argmax_excluding(scores, *target), *target};
  }
  const std::size_t top = argmax(scores);
  return {top, argmax_excluding(scores, top)};
}

ClassRanking rank_against(ConstSpan scores, std::size_t source) {
  require(source < scores.size(), "rank_against: source class out of range");
  return {source, argmax_excluding(scores, source)};
}

double margin_loss(ConstSpan scores, ClassRanking r) {
  return scores[r.target] - scores[r.source];
}

double targeted_log_loss(ConstSpan scores, std::size_t t) {
  require(t < scores.size(), "targeted_log_loss: target out of range");
  const double top = scores[argmax(scores)];
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - top);
  return scores[t] - top - std::log(sum);
}

Vector ods_direction_with(const ScoreModel& m, ConstSpan x, ConstSpan w) {
  Vector g = m.weighted_input_gradient(x, w);
  const double n = l2_norm(g);
  if (n < kDegenerateNorm)
    fail(ErrorCode::DegenerateDirection, "weighted gradient norm below threshold");
  scale(g, 1.0 / n);
  return g;
}

Vector ods_direction(const ScoreModel& m, ConstSpan x, RandomStream& stream) {
  Vector w(m.num_classes());
  for (double& v : w) v = stream.uniform(-1.0, 1.0);
  return ods_direction_with(m, x, w);
}

Vector surrogate_loss_gradient(const ScoreModel& m, ConstSpan x, ClassRanking r, LossKind loss) {
  const std::size_t C = m.num_classes();
  require(r.source < C && r.target < C && r.source != r.target,
          "surrogate_loss_gradient: invalid class ranking");
  Vector w(C, 0.0);
  if (loss == LossKind::Margin) {
    w[r.target] = 1.0;
    w[r.source] = -1.0;
  } else {
    const Vector scores = m.forward(x);
    const double top = scores[argmax(scores)];
    double sum = 0.0;
    for (double s : scores) sum += std::exp(s - top);
    for (std::size_t c = 0; c < C; ++c) w[c] = -std::exp(scores[c] - top) / sum;
    w[r.target] += 1.0;
  }
  return ods_direction_with(m, x, w);
}

// ---- sources ---------------------------------------------------------------

FixedBasisSource::FixedBasisSource(std::string name, std::vector<Vector> basis)
    : name_(std::move(name)), basis_(std::move(basis)) {}

Vector FixedBasisSource::next(ConstSpan) {
  if (exhausted())
    fail(ErrorCode::Exhausted, name_ + " basis exhausted after " + std::to_string(basis_.size()) +
                                   " directions");
  return basis_[cursor_++];
}

OdsSource::OdsSource(std::vector<ModelPtr> surrogates, RandomStream stream, std::size_t max_degenerate)
    : surrogates_(std::move(surrogates)), stream_(stream), max_degenerate_(max_degenerate) {
  require(!surrogates_.empty(), "ODS source needs at least one surrogate");
}

Vector OdsSource::next(ConstSpan iterate) {
  for (std::size_t attempt = 0; attempt < max_degenerate_; ++attempt) {
    last_ = static_cast<std::size_t>(stream_.below(surrogates_.size()));
    try {
      return ods_direction(*surrogates_[last_], iterate, stream_);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateDirection) throw;
    }
  }
  fail(ErrorCode::DegenerateDirection,
       std::to_string(max_degenerate_) + " consecutive degenerate ODS draws");
}

FixedBasisSource pixel_basis(std::size_t dim, RandomStream& stream) {
  require(dim >= 1, "pixel_basis: empty dimension");
  std::vector<std::size_t> order(dim);
  for (std::size_t i = 0; i < dim; ++i) order[i] = i;
  stream.shuffle(order);
  std::vector<Vector> basis;
  basis.reserve(dim);
  for (std::size_t i : order) {
    Vector e(dim, 0.0);
    e[i] = 1.0;
    basis.push_back(std::move(e));
  }
  return FixedBasisSource("pixel", std::move(basis));
}

FixedBasisSource dct_basis_source(Shape shape, std::size_t freq_count, RandomStream& stream,
                                  BasisOrder order) {
  auto grids = dct2_basis(shape.height, shape.width, shape.channels, freq_count);
  std::vector<Vector> basis;
  basis.reserve(grids.size());
  for (auto& g : grids) basis.push_back(std::move(g.values));
  if (order == BasisOrder::Random) stream.shuffle(basis);
  return FixedBasisSource("dct", std::move(basis));
}

std::vector<Vector> leading_left_singular_vectors(const std::vector<Vector>& columns, std::size_t k) {
  require(!columns.empty(), "leading_left_singular_vectors: no columns");
  const std::size_t rows = columns.front().size();
  require(k >= 1 && k <= std::min(rows, columns.size()),
          "leading_left_singular_vectors: k must lie in [1, min(D, n)]");
  const Matrix m = Matrix::from_columns(columns);
  std::vector<Vector> out;
  if (columns.size() <= rows) {
    const SvdResult svd = thin_svd(m);
    for (std::size_t j = 0; j < k; ++j) out.emplace_back(svd.u.col(j).begin(), svd.u.col(j).end());
  } else {
    // Wide matrix: the right singular vectors of the transpose.
    const SvdResult svd = thin_svd(m.transpose());
    for (std::size_t j = 0; j < k; ++j) out.emplace_back(svd.v.col(j).begin(), svd.v.col(j).end());
  }
  for (auto& v : out) normalize(v);
  return out;
}

FixedBasisSource pca_gradient_basis(const ScoreModel& surrogate, const std::vector<Vector>& samples,
                                    std::size_t k, RandomStream& stream,
                                    std::optional<std::size_t> sample_count) {
  require(k >= 1 && k <= samples.size(), "pca_gradient_basis: need 1 <= k <= number of samples");
  require(surrogate.num_classes() >= 2, "pca_gradient_basis: need at least two classes");
  const std::size_t n = std::min(samples.size(), sample_count.value_or(2 * k));
  require(n >= k, "pca_gradient_basis: sample count below k");
  const std::size_t C = surrogate.num_classes();
  std::vector<Vector> columns;
  columns.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t predicted = argmax(surrogate.forward(samples[i]));
    std::size_t c = static_cast<std::size_t>(stream.below(C - 1));
    if (c >= predicted) ++c;
    Vector w(C, 0.0);
    w[c] = 1.0;
    Vector g = surrogate.weighted_input_gradient(samples[i], w);
    normalize(g);
    columns.push_back(std::move(g));
  }
  return FixedBasisSource("pca-gradients", leading_left_singular_vectors(columns, k));
}

FixedBasisSource image_pca_basis(const LabeledDataset& data, std::size_t k) {
  require(data.size() >= 2, "image_pca_basis: need at least two inputs");
  const std::size_t dim = data.meta.shape.size();
  Vector mean(dim, 0.0);
  for (const auto& x : data.inputs) axpy(1.0, x, mean);
  scale(mean, 1.0 / static_cast<double>(data.size()));
  std::vector<Vector> columns;
  columns.reserve(data.size());
  for (const auto& x : data.inputs) columns.push_back(add_scaled(x, -1.0, mean));
  return FixedBasisSource("pca-images", leading_left_singular_vectors(columns, k));
}

}  // namespace gfcs
