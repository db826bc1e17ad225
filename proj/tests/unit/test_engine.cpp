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

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "gfcs/engine.hpp"
#include "gfcs/recipes.hpp"
#include "json.hpp"

using namespace gfcs;

namespace {

// Victim scores (c, x0, -100): class 1 overtakes class 0 once x0 > c.
std::shared_ptr<Network> threshold_victim(double c) {
  return make_linear(3, 3, {0, 0, 0, 1, 0, 0, 0, 0, 0}, {c, 0, -100});
}

// Surrogate with margin gradient e0 (for the class pair 1 vs 0) and ODS
// directions in span{e0, e2}.
std::shared_ptr<Network> aligned_surrogate() { return make_linear(3, 3, {0, 0, 0, 1, 0, 0, 0, 0, 1}, {0, 0, 0}); }

AttackConfig config(double eps, double nu, std::uint64_t budget) {
  AttackConfig cfg;
  cfg.epsilon = eps;
  cfg.nu = nu;
  cfg.budget = budget;
  cfg.record_trace = true;
  return cfg;
}

}  // namespace

TEST_CASE("oracle counts every query and enforces the budget") {
  QueryOracle o(threshold_victim(1), 2);
  o.query(Vector{0, 0, 0});
  o.query(Vector{0, 0, 0});
  CHECK(o.count() == 2);
  try {
    o.query(Vector{0, 0, 0});
    FAIL("expected budget exhaustion");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BudgetExceeded);
  }
  CHECK(o.count() == 2);
}

TEST_CASE("config validation") {
  AttackConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.epsilon = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = AttackConfig{};
  cfg.nu = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = AttackConfig{};
  cfg.loss = LossKind::TargetedLog;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(default_nu(3072) == doctest::Approx(std::sqrt(3.072)));
  CHECK(kDefaultEpsilon == 2.0);
  CHECK(kDefaultBudget == 10000);
}

TEST_CASE("untargeted objective is positive exactly when adversarial") {
  AttackConfig cfg;
  const Objective obj(0, cfg);
  CHECK(obj.value(Vector{3, 1, 2}) == -1.0);
  CHECK_FALSE(obj.adversarial(Vector{3, 1, 2}));
  CHECK(obj.value(Vector{1, 3, 2}) == 2.0);
  CHECK(obj.adversarial(Vector{1, 3, 2}));
  cfg.target = 2;
  const Objective tgt(0, cfg);
  CHECK(tgt.value(Vector{1, 3, 2}) == -1.0);
  CHECK_FALSE(tgt.adversarial(Vector{1, 3, 2}));
  CHECK(tgt.adversarial(Vector{1, 2, 3}));
}

TEST_CASE("scripted basis attack: hand-counted queries") {
  // Threshold 0.6, steps of 0.25. Directions: e2 (useless, 2 queries),
  // e0 (+ accepted, 1), -e0 (+ rejected then - accepted, 2), e0 (+ accepted, 1).
  QueryOracle oracle(threshold_victim(0.6), 100);
  FixedBasisSource src("script", {{0, 0, 1}, {1, 0, 0}, {-1, 0, 0}, {1, 0, 0}, {0, 1, 0}});
  const Vector x{0, 0, 0};
  const AttackResult r = simba_attack(oracle, src, x, oracle.victim().forward(x), config(0.25, 1.0, 100));
  CHECK(r.success);
  CHECK(r.total_queries == 6);
  CHECK(r.basis_queries == 6);
  CHECK(r.gradient_queries == 0);
  CHECK(r.coimage_queries == 0);
  CHECK(r.accepted_steps == 3);
  CHECK(r.final_norm == doctest::Approx(0.75));
  CHECK(src.cursor() == 4);
  REQUIRE(r.trace.size() == 6);
  const bool accepted[6] = {false, false, true, false, true, true};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(r.trace[i].accepted == accepted[i]);
    CHECK(r.trace[i].queries == i + 1);
    CHECK(r.trace[i].branch == Branch::Basis);
  }
}

TEST_CASE("scripted GFCS attack: gradient block then coimage block") {
  // The boundary (x0 > 10) lies beyond the nu = 1 ball. Gradient steps walk
  // x0 to 0.25, 0.5, 0.75, 1.0 (4 queries), then both signs fail at the ball
  // edge (2 more). Every ODS candidate afterwards is projected back to a
  // point with x0 < 1, so each draw costs 2 coimage queries until the budget.
  QueryOracle oracle(threshold_victim(10), 20);
  RandomStream stream(5);
  const Vector x{0, 0, 0};
  const AttackResult r =
      gfcs_attack(oracle, {aligned_surrogate()}, x, oracle.victim().forward(x), config(0.25, 1.0, 20), stream);
  CHECK_FALSE(r.success);
  CHECK(r.reason == FailureReason::Budget);
  CHECK(r.total_queries == 20);
  CHECK(r.gradient_queries == 6);
  CHECK(r.coimage_queries == 14);
  CHECK(r.accepted_steps == 4);
  CHECK(r.final_norm == doctest::Approx(1.0));

  // Same victim with a reachable boundary: three gradient steps and no coimage.
  QueryOracle near(threshold_victim(0.6), 20);
  RandomStream s2(5);
  const AttackResult ok =
      gfcs_attack(near, {aligned_surrogate()}, x, near.victim().forward(x), config(0.25, 1.0, 20), s2);
  CHECK(ok.success);
  CHECK(ok.total_queries == 3);
  CHECK(ok.gradient_queries == 3);
  CHECK(ok.coimage_queries == 0);
}

TEST_CASE("tiny budgets") {
  const Vector x{0, 0, 0};
  for (std::uint64_t budget : {0ULL, 1ULL}) {
    QueryOracle oracle(threshold_victim(0.6), budget);
    RandomStream s(1);
    const AttackResult r =
        gfcs_attack(oracle, {aligned_surrogate()}, x, oracle.victim().forward(x), config(0.1, 1.0, budget), s);
    CHECK_FALSE(r.success);
    CHECK(r.reason == FailureReason::Budget);
    CHECK(r.total_queries == budget);
  }
}

TEST_CASE("gradient-only search gives up where GFCS continues") {
  const OrthogonalPair pair = build_orthogonal_pair(20, 7);
  AttackConfig cfg = config(0.5, 2.0, 2000);
  std::size_t gfcs_wins = 0;
  for (std::size_t i = 0; i < pair.inputs.size(); ++i) {
    const Vector& x = pair.inputs[i];
    const Vector f = pair.victim->forward(x);
    REQUIRE(argmax(f) == 0);
    QueryOracle o1(pair.victim, cfg.budget);
    RandomStream s1(i);
    const AttackResult gf = gf_only_attack(o1, {pair.surrogate}, x, f, cfg, s1);
    CHECK_FALSE(gf.success);
    CHECK(gf.reason == FailureReason::SurrogatesExhausted);
    CHECK(gf.total_queries == 2);
    CHECK(gf.gradient_queries == 2);
    QueryOracle o2(pair.victim, cfg.budget);
    RandomStream s2(i);
    const AttackResult full = gfcs_attack(o2, {pair.surrogate}, x, f, cfg, s2);
    gfcs_wins += full.success;
    CHECK(full.gradient_queries >= 2);
    CHECK(full.coimage_queries > 0);
  }
  CHECK(gfcs_wins == pair.inputs.size());
}

TEST_CASE("every candidate respects the ball and the box") {
  RandomStream rng(9);
  auto victim = std::make_shared<Network>(parse_architecture("mlp", flat_shape(20), 4), 4, 1);
  auto sur = std::make_shared<Network>(parse_architecture("mlp", flat_shape(20), 4), 4, 2);
  for (int i = 0; i < 10; ++i) {
    Vector x(20);
    for (double& v : x) v = rng.uniform(0.2, 0.8);
    AttackConfig cfg = config(0.7, 0.3, 300);
    cfg.box = {true, 0.0, 1.0};
    QueryOracle o(victim, cfg.budget);
    RandomStream s(i);
    const AttackResult r = gfcs_attack(o, {sur}, x, victim->forward(x), cfg, s);
    CHECK(r.max_candidate_distance <= cfg.nu * (1 + 1e-9));
    CHECK(r.final_norm <= cfg.nu * (1 + 1e-9));
    for (double v : r.final_point) CHECK((v >= 0.0 && v <= 1.0));
    for (const auto& t : r.trace) CHECK(t.distance <= cfg.nu * (1 + 1e-9));
  }
}

TEST_CASE("white-box linear attack takes the closed-form number of steps") {
  // Two classes: each accepted gradient step raises the margin by eps * |w1 - w0|.
  RandomStream rng(10);
  const std::size_t D = 6;
  Vector W(2 * D);
  for (double& w : W) w = rng.uniform(-1, 1);
  auto lin = make_linear(D, 2, W, Vector{0.4, 0});
  double gap = 0;
  for (std::size_t k = 0; k < D; ++k) gap += (W[D + k] - W[k]) * (W[D + k] - W[k]);
  gap = std::sqrt(gap);
  for (int i = 0; i < 20; ++i) {
    Vector x(D);
    for (double& v : x) v = rng.uniform(-0.2, 0.2);
    const Vector f = lin->forward(x);
    if (argmax(f) != 0) continue;
    const double eps = 0.05;
    const double steps = std::floor((f[0] - f[1]) / (eps * gap)) + 1;
    QueryOracle o(lin, 10000);
    RandomStream s(i);
    const AttackResult r = gfcs_attack(o, {lin}, x, f, config(eps, 100.0, 10000), s);
    CHECK(r.success);
    CHECK(r.coimage_queries == 0);
    CHECK(std::abs(static_cast<double>(r.total_queries) - steps) <= 1.0);
  }
}

TEST_CASE("targeted log-loss attack reaches the target") {
  auto victim = make_linear(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1}, {0, 0, 0});
  const Vector x{1, 0.5, 0};
  AttackConfig cfg = config(0.2, 3.0, 500);
  cfg.target = 2;
  cfg.loss = LossKind::TargetedLog;
  QueryOracle o(victim, cfg.budget);
  RandomStream s(1);
  const AttackResult r = gfcs_attack(o, {victim}, x, victim->forward(x), cfg, s);
  CHECK(r.success);
  CHECK(r.final_class == 2);
}

TEST_CASE("target classes are uniform over the other labels") {
  RandomStream s(11);
  const std::size_t C = 6, label = 2, n = 60000;
  std::vector<double> counts(C, 0);
  for (std::size_t i = 0; i < n; ++i) counts[pick_target_class(s, label, C)] += 1;
  CHECK(counts[label] == 0);
  double chi2 = 0;
  const double expect = static_cast<double>(n) / (C - 1);
  for (std::size_t c = 0; c < C; ++c)
    if (c != label) chi2 += (counts[c] - expect) * (counts[c] - expect) / expect;
  CHECK(chi2 < 18.47);  // 4 dof, p = 0.001
}

TEST_CASE("trace lines are JSON with the query count") {
  QueryOracle oracle(threshold_victim(0.6), 100);
  FixedBasisSource src("script", {{1, 0, 0}, {1, 0, 0}, {1, 0, 0}});
  const Vector x{0, 0, 0};
  const AttackResult r = simba_attack(oracle, src, x, oracle.victim().forward(x), config(0.25, 1.0, 100));
  std::ostringstream out;
  write_trace(out, r.trace);
  std::istringstream in(out.str());
  std::string line;
  std::uint64_t n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["query_count"].get<std::uint64_t>() == ++n);
    CHECK(j["branch"] == "basis");
  }
  CHECK(n == 3);
}
