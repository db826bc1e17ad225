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

#include "gfcs/engine.hpp"

#include <cmath>
#include <functional>
#include <ostream>

#include "json.hpp"

namespace gfcs {

double default_nu(std::size_t dim) { return std::sqrt(0.001 * static_cast<double>(dim)); }

void AttackConfig::validate() const {
  require(epsilon > 0.0 && std::isfinite(epsilon), "attack: epsilon must be positive");
  require(nu > 0.0 && std::isfinite(nu), "attack: nu must be positive");
  require(loss == LossKind::Margin || target.has_value(),
          "attack: the targeted log loss needs a target class");
  require(!box.enabled || box.lo <= box.hi, "attack: empty box constraint");
}

// ---- oracle ----------------------------------------------------------------

QueryOracle::QueryOracle(ModelPtr victim, std::uint64_t budget)
    : victim_(std::move(victim)), budget_(budget) {
  require(victim_ != nullptr, "QueryOracle: null victim");
}

Vector QueryOracle::query(ConstSpan x) {
  if (count_ >= budget_)
    fail(ErrorCode::BudgetExceeded, "query budget of " + std::to_string(budget_) + " exhausted");
  Vector scores = victim_->forward(x);
  ++count_;
  return scores;
}

void QueryOracle::set_current(Vector point, Vector scores) {
  point_ = std::move(point);
  scores_ = std::move(scores);
}

// ---- objective -------------------------------------------------------------

Objective::Objective(std::size_t original_class, const AttackConfig& cfg)
    : original_(original_class), target_(cfg.target), loss_(cfg.loss) {}

double Objective::value(ConstSpan scores) const {
  if (loss_ == LossKind::TargetedLog) return targeted_log_loss(scores, *target_);
  return margin_loss(scores, ranking(scores));
}

bool Objective::adversarial(ConstSpan scores) const {
  const std::size_t top = argmax(scores);
  return target_ ? top == *target_ : top != original_;
}

ClassRanking Objective::ranking(ConstSpan victim_scores) const {
  return target_ ? rank_classes(victim_scores, target_) : rank_against(victim_scores, original_);
}

// ---- trace -----------------------------------------------------------------

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::Gradient: return "gradient";
    case Branch::Coimage: return "coimage";
    case Branch::Basis: return "basis";
  }
  return "?";
}

const char* failure_reason_name(FailureReason r) {
  switch (r) {
    case FailureReason::None: return "none";
    case FailureReason::Budget: return "budget";
    case FailureReason::BasisExhausted: return "basis-exhausted";
    case FailureReason::Degenerate: return "degenerate";
    case FailureReason::SurrogatesExhausted: return "surrogates-exhausted";
  }
  return "?";
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace) {
  for (const TraceRecord& t : trace) {
    nlohmann::json j = {{"step", t.step},         {"branch", branch_name(t.branch)},
                        {"surrogate", t.surrogate}, {"alpha", t.alpha},
                        {"accepted", t.accepted},   {"loss", t.loss},
                        {"query_count", t.queries}, {"distance", t.distance}};
    if (t.clamped) j["clamped"] = true;
    out << j.dump() << '\n';
  }
}

// ---- single steps ----------------------------------------------------------

Evaluation evaluate_candidate(QueryOracle& oracle, ConstSpan x_in, ConstSpan candidate,
                              const AttackConfig& cfg, const Objective& objective) {
  require(candidate.size() == x_in.size(), "evaluate_candidate: length mismatch");
  Evaluation ev;
  ev.point = project_to_ball(candidate, x_in, cfg.nu);
  if (cfg.box.enabled) {
    const Vector before = ev.point;
    clamp_inplace(ev.point, cfg.box.lo, cfg.box.hi);
    ev.clamped = before != ev.point;
  }
  ev.scores = oracle.query(ev.point);
  ev.loss = objective.value(ev.scores);
  ev.distance = l2_distance(ev.point, x_in);
  return ev;
}

namespace {

std::uint64_t& branch_counter(AttackResult& r, Branch b) {
  switch (b) {
    case Branch::Gradient: return r.gradient_queries;
    case Branch::Coimage: return r.coimage_queries;
    case Branch::Basis: return r.basis_queries;
  }
  return r.basis_queries;
}

}  // namespace

bool step_trial(QueryOracle& oracle, AttackState& state, ConstSpan q, const AttackConfig& cfg,
                const Objective& objective, Branch branch, int surrogate, std::size_t step) {
  const double qn = l2_norm(q);
  require(std::abs(qn - 1.0) <= 1e-9, "step_trial: direction is not unit norm");
  const Vector current = oracle.current_point();
  for (const double alpha : {cfg.epsilon, -cfg.epsilon}) {
    Evaluation ev = evaluate_candidate(oracle, state.x_in, add_scaled(current, alpha, q), cfg, objective);
    ++branch_counter(state.result, branch);
    state.result.max_candidate_distance = std::max(state.result.max_candidate_distance, ev.distance);
    const bool accepted = ev.loss > state.loss;
    if (cfg.record_trace)
      state.result.trace.push_back(TraceRecord{step, branch, surrogate, alpha, accepted, ev.loss,
                                               oracle.count(), ev.distance, ev.clamped});
    if (accepted) {
      state.loss = ev.loss;
      oracle.set_current(std::move(ev.point), std::move(ev.scores));
      ++state.result.accepted_steps;
      return true;
    }
  }
  return false;
}

// ---- attack loops ----------------------------------------------------------

namespace {

struct Proposal {
  Vector q;
  Branch branch;
  int surrogate;
};

// Returns the next direction, or nullopt after setting a failure reason.
using Proposer = std::function<std::optional<Proposal>(const QueryOracle&, FailureReason&)>;
using AcceptHook = std::function<void(bool)>;

AttackResult run_search(QueryOracle& oracle, ConstSpan x_in, ConstSpan initial_scores,
                        const AttackConfig& cfg, const Proposer& propose, const AcceptHook& on_trial) {
  cfg.validate();
  const ScoreModel& victim = oracle.victim();
  require(x_in.size() == victim.input_dim(), "attack: input does not match the victim's shape");
  require(initial_scores.size() == victim.num_classes(), "attack: initial scores have the wrong length");
  require_finite(x_in, "attack input");
  if (cfg.target) require(*cfg.target < victim.num_classes(), "attack: target class out of range");

  const Objective objective(argmax(initial_scores), cfg);
  AttackState state;
  state.x_in.assign(x_in.begin(), x_in.end());
  state.loss = objective.value(initial_scores);
  state.result.original_class = objective.original_class();
  oracle.set_current(state.x_in, Vector(initial_scores.begin(), initial_scores.end()));
  const std::uint64_t start = oracle.count();

  std::size_t step = 0;
  try {
    while (!objective.adversarial(oracle.current_scores())) {
      FailureReason reason = FailureReason::None;
      std::optional<Proposal> p = propose(oracle, reason);
      if (!p) {
        state.result.reason = reason;
        break;
      }
      const bool accepted = step_trial(oracle, state, p->q, cfg, objective, p->branch, p->surrogate, step++);
      on_trial(accepted);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded) throw;
    state.result.reason = FailureReason::Budget;
  }

  AttackResult& r = state.result;
  r.success = objective.adversarial(oracle.current_scores());
  if (r.success) r.reason = FailureReason::None;
  r.total_queries = oracle.count() - start;
  r.final_point = oracle.current_point();
  r.final_norm = l2_distance(r.final_point, x_in);
  r.final_loss = state.loss;
  r.final_class = argmax(oracle.current_scores());
  return std::move(state.result);
}

AttackResult surrogate_search(QueryOracle& oracle, const std::vector<ModelPtr>& surrogates,
                              ConstSpan x_in, ConstSpan initial_scores, const AttackConfig& cfg,
                              RandomStream& stream, bool coimage_fallback) {
  require(!surrogates.empty(), "attack: need at least one surrogate");
  for (const auto& s : surrogates) {
    require(s != nullptr, "attack: null surrogate");
    require(s->input_dim() == x_in.size(), "attack: surrogate input shape differs from the victim's");
    require(s->num_classes() == oracle.victim().num_classes(),
            "attack: surrogate and victim disagree on the class count");
  }
  const Objective objective(argmax(initial_scores), cfg);
  const std::size_t n = surrogates.size();

  std::vector<std::size_t> remaining;
  auto reset = [&] {
    remaining.resize(n);
    for (std::size_t i = 0; i < n; ++i) remaining[i] = i;
  };
  reset();
  std::size_t degenerate_streak = 0;

  Proposer propose = [&](const QueryOracle& o, FailureReason& reason) -> std::optional<Proposal> {
    const Vector& x = o.current_point();
    while (!remaining.empty()) {
      const auto pick = static_cast<std::size_t>(stream.below(remaining.size()));
      const std::size_t s = remaining[pick];
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
      try {
        Vector q = surrogate_loss_gradient(*surrogates[s], x, objective.ranking(o.current_scores()), cfg.loss);
        return Proposal{std::move(q), Branch::Gradient, static_cast<int>(s)};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateDirection) throw;
      }
    }
    if (!coimage_fallback) {
      reason = FailureReason::SurrogatesExhausted;
      return std::nullopt;
    }
    while (true) {
      const auto s = static_cast<std::size_t>(stream.below(n));
      try {
        Vector q = ods_direction(*surrogates[s], x, stream);
        degenerate_streak = 0;
        return Proposal{std::move(q), Branch::Coimage, static_cast<int>(s)};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateDirection) throw;
        if (++degenerate_streak >= cfg.max_degenerate) {
          reason = FailureReason::Degenerate;
          return std::nullopt;
        }
      }
    }
  };
  AcceptHook on_trial = [&](bool accepted) {
    if (accepted) reset();
  };
  return run_search(oracle, x_in, initial_scores, cfg, propose, on_trial);
}

}  // namespace

AttackResult gfcs_attack(QueryOracle& oracle, const std::vector<ModelPtr>& surrogates, ConstSpan x_in,
                         ConstSpan initial_scores, const AttackConfig& cfg, RandomStream& stream) {
  return surrogate_search(oracle, surrogates, x_in, initial_scores, cfg, stream, true);
}

AttackResult gf_only_attack(QueryOracle& oracle, const std::vector<ModelPtr>& surrogates,
                            ConstSpan x_in, ConstSpan initial_scores, const AttackConfig& cfg,
                            RandomStream& stream) {
  return surrogate_search(oracle, surrogates, x_in, initial_scores, cfg, stream, false);
}

AttackResult simba_attack(QueryOracle& oracle, DirectionSource& source, ConstSpan x_in,
                          ConstSpan initial_scores, const AttackConfig& cfg) {
  const Branch branch = source.is_sampling() ? Branch::Coimage : Branch::Basis;
  auto* ods = dynamic_cast<OdsSource*>(&source);
  Proposer propose = [&](const QueryOracle& o, FailureReason& reason) -> std::optional<Proposal> {
    try {
      Vector q = source.next(o.current_point());
      const int surrogate = ods ? static_cast<int>(ods->last_surrogate()) : -1;
      return Proposal{std::move(q), branch, surrogate};
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Exhausted) {
        reason = FailureReason::BasisExhausted;
      } else if (e.code() == ErrorCode::DegenerateDirection) {
        reason = FailureReason::Degenerate;
      } else {
        throw;
      }
      return std::nullopt;
    }
  };
  return run_search(oracle, x_in, initial_scores, cfg, propose, [](bool) {});
}

std::size_t pick_target_class(RandomStream& stream, std::size_t true_label, std::size_t classes) {
  require(classes >= 2, "pick_target_class: need at least two classes");
  require(true_label < classes, "pick_target_class: label out of range");
  auto t = static_cast<std::size_t>(stream.below(classes - 1));
  return t >= true_label ? t + 1 : t;
}

}  // namespace gfcs
