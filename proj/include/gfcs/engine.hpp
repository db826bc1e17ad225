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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gfcs/directions.hpp"

namespace gfcs {

inline constexpr double kDefaultEpsilon = 2.0;
inline constexpr std::uint64_t kDefaultBudget = 10000;

// sqrt(0.001 * D), the customary l2 bound for a D-dimensional input.
double default_nu(std::size_t dim);

struct BoxConstraint {
  bool enabled = false;
  double lo = 0.0;
  double hi = 1.0;
};

struct AttackConfig {
  double epsilon = kDefaultEpsilon;
  double nu = 1.0;
  std::uint64_t budget = kDefaultBudget;
  std::optional<std::size_t> target;  // set for targeted attacks
  LossKind loss = LossKind::Margin;
  BoxConstraint box;
  bool record_trace = false;
  // Consecutive degenerate ODS draws tolerated before giving up.
  std::size_t max_degenerate = 100;

  void validate() const;
};

// Score-only access to the victim with strict query accounting. Every call
// to query() costs exactly one query; the cache holds the current accepted
// iterate and the victim scores there.
class QueryOracle {
 public:
  QueryOracle(ModelPtr victim, std::uint64_t budget);

  Vector query(ConstSpan x);

  std::uint64_t count() const { return count_; }
  std::uint64_t budget() const { return budget_; }
  const ScoreModel& victim() const { return *victim_; }

  void set_current(Vector point, Vector scores);
  const Vector& current_point() const { return point_; }
  const Vector& current_scores() const { return scores_; }

 private:
  ModelPtr victim_;
  std::uint64_t budget_;
  std::uint64_t count_ = 0;
  Vector point_;
  Vector scores_;
};

// The victim-side objective of one attack: which loss, which class pair, and
// what counts as success.
class Objective {
 public:
  Objective(std::size_t original_class, const AttackConfig& cfg);

  // Loss at a victim score vector. Untargeted margin compares the original
  // class against the best other class, so it is positive iff the point is
  // adversarial.
  double value(ConstSpan scores) const;
  bool adversarial(ConstSpan scores) const;
  // Class pair for the surrogate loss, ranked by the given victim scores.
  ClassRanking ranking(ConstSpan victim_scores) const;

  std::size_t original_class() const { return original_; }
  bool targeted() const { return target_.has_value(); }
  LossKind loss() const { return loss_; }

 private:
  std::size_t original_;
  std::optional<std::size_t> target_;
  LossKind loss_;
};

enum class Branch { Gradient, Coimage, Basis };
const char* branch_name(Branch b);

// One evaluated candidate.
struct TraceRecord {
  std::size_t step = 0;       // index of the direction being tried
  Branch branch = Branch::Gradient;
  int surrogate = -1;         // surrogate index, -1 for fixed bases
  double alpha = 0.0;
  bool accepted = false;
  double loss = 0.0;          // victim loss at the candidate
  std::uint64_t queries = 0;  // oracle count after the query
  double distance = 0.0;      // ||candidate - x_in||
  bool clamped = false;       // box clamp moved the projected point
};

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace);

enum class FailureReason { None, Budget, BasisExhausted, Degenerate, SurrogatesExhausted };
const char* failure_reason_name(FailureReason r);

struct AttackResult {
  bool success = false;
  FailureReason reason = FailureReason::None;
  std::uint64_t total_queries = 0;
  std::uint64_t gradient_queries = 0;
  std::uint64_t coimage_queries = 0;
  std::uint64_t basis_queries = 0;
  std::uint64_t accepted_steps = 0;
  double final_norm = 0.0;
  double final_loss = 0.0;
  std::size_t original_class = 0;
  std::size_t final_class = 0;
  // Largest ||candidate - x_in|| over every evaluated candidate.
  double max_candidate_distance = 0.0;
  Vector final_point;
  std::vector<TraceRecord> trace;
};

struct Evaluation {
  double loss = 0.0;
  Vector scores;
  Vector point;
  double distance = 0.0;
  bool clamped = false;
};

// Projects the candidate into the nu-ball around x_in (then the box, if
// configured), queries the victim once and scores it.
Evaluation evaluate_candidate(QueryOracle& oracle, ConstSpan x_in, ConstSpan candidate,
                              const AttackConfig& cfg, const Objective& objective);

// Per-attack bookkeeping shared by the search loops.
struct AttackState {
  Vector x_in;
  double loss = 0.0;  // victim loss at the oracle's cached iterate
  AttackResult result;
};

// Tries alpha = +eps then -eps along q; the first candidate whose loss
// strictly exceeds the current one replaces the iterate. Queries are charged
// to `branch`.
bool step_trial(QueryOracle& oracle, AttackState& state, ConstSpan q, const AttackConfig& cfg,
                const Objective& objective, Branch branch, int surrogate = -1, std::size_t step = 0);

// Gradient First, Coimage Second. Surrogates must already accept the
// victim's input shape (see adapt_domain). `initial_scores` are the victim
// scores at x_in, obtained without charge when the example was selected.
AttackResult gfcs_attack(QueryOracle& oracle, const std::vector<ModelPtr>& surrogates, ConstSpan x_in,
                         ConstSpan initial_scores, const AttackConfig& cfg, RandomStream& stream);

// GFCS without the coimage fallback: fails as soon as every surrogate
// gradient has been rejected at one iterate.
AttackResult gf_only_attack(QueryOracle& oracle, const std::vector<ModelPtr>& surrogates,
                            ConstSpan x_in, ConstSpan initial_scores, const AttackConfig& cfg,
                            RandomStream& stream);

// SimBA over a direction source: fixed bases in order, or fresh ODS samples.
AttackResult simba_attack(QueryOracle& oracle, DirectionSource& source, ConstSpan x_in,
                          ConstSpan initial_scores, const AttackConfig& cfg);

// Uniform over [0, C) without true_label.
std::size_t pick_target_class(RandomStream& stream, std::size_t true_label, std::size_t classes);

}  // namespace gfcs
