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

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gfcs/data.hpp"
#include "gfcs/model.hpp"
#include "gfcs/random.hpp"

namespace gfcs {

// Which class pair a margin loss compares. Always c_s != c_t.
struct ClassRanking {
  std::size_t source = 0;  // c_s
  std::size_t target = 0;  // c_t
};

// Untargeted: c_s = argmax, c_t = best other class. Targeted: c_t = target,
// c_s = best class other than the target. Ties go to the lowest index.
ClassRanking rank_classes(ConstSpan scores, std::optional<std::size_t> target = std::nullopt);

// Ranking against a fixed source class: c_s = source, c_t = best other class.
// Used for untargeted attacks, where c_s stays the original prediction.
ClassRanking rank_against(ConstSpan scores, std::size_t source);

// scores[c_t] - scores[c_s]
double margin_loss(ConstSpan scores, ClassRanking r);

// log softmax(scores)[t], computed with max subtraction.
double targeted_log_loss(ConstSpan scores, std::size_t t);

enum class LossKind { Margin, TargetedLog };

// Below this norm a gradient is treated as degenerate.
inline constexpr double kDegenerateNorm = 1e-12;

// Normalized gradient of w^T f(x) for w ~ U(-1, 1)^C drawn from `stream`.
// Throws DegenerateDirection if the gradient norm is below kDegenerateNorm.
Vector ods_direction(const ScoreModel& m, ConstSpan x, RandomStream& stream);
// Same with an explicit weight vector.
Vector ods_direction_with(const ScoreModel& m, ConstSpan x, ConstSpan w);

// Normalized input gradient of the surrogate loss. Margin: w = e_t - e_s.
// Targeted log: w = e_t - softmax(f(x)) with t = r.target.
Vector surrogate_loss_gradient(const ScoreModel& m, ConstSpan x, ClassRanking r, LossKind loss);

// Producer of unit-norm search directions. Fixed bases hand out their
// elements in order and then report exhaustion; sampling sources draw a
// fresh direction at the supplied iterate on every call.
class DirectionSource {
 public:
  virtual ~DirectionSource() = default;
  virtual Vector next(ConstSpan iterate) = 0;
  virtual bool is_sampling() const = 0;
  virtual std::string name() const = 0;
};

class FixedBasisSource final : public DirectionSource {
 public:
  FixedBasisSource(std::string name, std::vector<Vector> basis);

  Vector next(ConstSpan iterate) override;
  bool is_sampling() const override { return false; }
  std::string name() const override { return name_; }

  std::size_t size() const { return basis_.size(); }
  std::size_t cursor() const { return cursor_; }
  bool exhausted() const { return cursor_ == basis_.size(); }
  const std::vector<Vector>& elements() const { return basis_; }

 private:
  std::string name_;
  std::vector<Vector> basis_;
  std::size_t cursor_ = 0;
};

// ODS sampling: each call picks a surrogate uniformly (with replacement),
// draws w ~ U(-1, 1)^C and returns the normalized weighted gradient.
// Degenerate draws are retried; after `max_degenerate` consecutive ones it
// throws DegenerateDirection.
class OdsSource final : public DirectionSource {
 public:
  OdsSource(std::vector<ModelPtr> surrogates, RandomStream stream, std::size_t max_degenerate = 100);

  Vector next(ConstSpan iterate) override;
  bool is_sampling() const override { return true; }
  std::string name() const override { return "ods"; }

  std::size_t last_surrogate() const { return last_; }

 private:
  std::vector<ModelPtr> surrogates_;
  RandomStream stream_;
  std::size_t max_degenerate_;
  std::size_t last_ = 0;
};

// The D one-hot vectors in a seeded random order.
FixedBasisSource pixel_basis(std::size_t dim, RandomStream& stream);

enum class BasisOrder { Random, LowFrequencyFirst };

FixedBasisSource dct_basis_source(Shape shape, std::size_t freq_count, RandomStream& stream,
                                  BasisOrder order);

// Left singular vectors of a matrix of normalized class-score gradients
// ("random-class FGM" directions) gathered at sample inputs. For each of the
// first `sample_count` inputs (default 2k, capped at the number supplied) a
// class other than the surrogate's prediction is drawn uniformly.
FixedBasisSource pca_gradient_basis(const ScoreModel& surrogate, const std::vector<Vector>& samples,
                                    std::size_t k, RandomStream& stream,
                                    std::optional<std::size_t> sample_count = std::nullopt);

// Top-k principal components of the (mean-centred) dataset inputs.
FixedBasisSource image_pca_basis(const LabeledDataset& data, std::size_t k);

// Left singular vectors of the columns, in decreasing singular-value order.
std::vector<Vector> leading_left_singular_vectors(const std::vector<Vector>& columns, std::size_t k);

}  // namespace gfcs
