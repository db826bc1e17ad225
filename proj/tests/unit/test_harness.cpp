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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "gfcs/harness.hpp"
#include "gfcs/recipes.hpp"

using namespace gfcs;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  CampaignInputs inputs;

  Fixture() {
    const LabeledDataset all = gen_blobs(31, 16, 3, 40, 0.15);
    auto [train, test] = split_dataset(all, 0.5, 1);
    TrainSpec t;
    t.epochs = 10;
    t.learning_rate = 0.1;
    inputs.victim = train_classifier(train, test, parse_architecture("linear", all.meta.shape, 3), t).model;
    t.seed = 2;
    inputs.surrogates.push_back(train_classifier(train, test, parse_architecture("mlp", all.meta.shape, 3), t).model);
    inputs.data = test;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

CampaignSpec small_spec(const std::string& out) {
  CampaignSpec s;
  s.methods = {Method::Gfcs,      Method::GfOnly,           Method::SimbaOds,      Method::SimbaPixel,
               Method::SimbaDct,  Method::SimbaPcaGradients, Method::SimbaPcaImages};
  s.examples = 12;
  s.seed = 99;
  s.attack.budget = 400;
  s.attack.epsilon = 0.5;
  s.nu_from_dimension = false;
  s.attack.nu = 0.8;
  s.pca_k = 8;
  s.bootstrap = 200;
  s.output = out;
  return s;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().filename() == "timings.jsonl") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    files[fs::relative(e.path(), dir).string()] = buf.str();
  }
  return files;
}

std::size_t data_rows(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++n;
  return n - 1;  // header
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gfcs_harness_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("methods by name") {
  for (Method m : {Method::Gfcs, Method::GfOnly, Method::SimbaOds, Method::SimbaPixel, Method::SimbaDct,
                   Method::SimbaPcaGradients, Method::SimbaPcaImages})
    CHECK(parse_method(method_name(m)) == m);
  CHECK_THROWS_AS(parse_method("simba-lol"), Error);
  CHECK(method_needs_surrogates(Method::Gfcs));
  CHECK_FALSE(method_needs_surrogates(Method::SimbaDct));
}

TEST_CASE("campaign specs round-trip") {
  const std::string text =
      "# comment\n"
      "victim = v.bin\n"
      "surrogates = a.bin, b.bin\n"
      "generator = minimages\n"
      "gen_seed = 4\n"
      "gen_contrast = 0.3\n"
      "method = gfcs, simba-dct\n"
      "epsilon = 1.5\n"
      "nu = 0.25\n"
      "budget = 77\n"
      "targeted = true\n"
      "loss = targeted-log\n"
      "box = 0:1\n"
      "examples = 9\n"
      "seed = 12  # trailing comment\n"
      "workers = 2\n"
      "dct_order = random\n";
  const CampaignSpec s = parse_campaign_spec(text);
  CHECK(s.surrogates == std::vector<std::string>{"a.bin", "b.bin"});
  REQUIRE(s.recipe.has_value());
  CHECK(s.recipe->image.contrast == 0.3);
  CHECK(s.methods == std::vector<Method>{Method::Gfcs, Method::SimbaDct});
  CHECK(s.attack.nu == 0.25);
  CHECK_FALSE(s.nu_from_dimension);
  CHECK(s.targeted);
  CHECK(s.attack.loss == LossKind::TargetedLog);
  CHECK(s.attack.box.enabled);
  CHECK(s.dct_order == BasisOrder::Random);
  CHECK(format_campaign_spec(parse_campaign_spec(format_campaign_spec(s))) == format_campaign_spec(s));

  CHECK_THROWS_AS(parse_campaign_spec("colour = red\n"), Error);
  CHECK_THROWS_AS(parse_campaign_spec("epsilon = fast\n"), Error);
  CHECK_THROWS_AS(parse_campaign_spec("just words\n"), Error);
  CHECK_THROWS_AS(parse_campaign_spec("examples = 0\n"), Error);
  CHECK_THROWS_AS(parse_campaign_spec("loss = targeted-log\n"), Error);
  CHECK_THROWS_AS(load_campaign_spec("/nonexistent/spec.cfg"), Error);
}

TEST_CASE("campaign output is byte-identical across runs and worker counts") {
  const fs::path dir = scratch("det");
  const CampaignSpec spec = small_spec(dir.string());
  CampaignAudit audit;
  const auto runs = run_campaign(spec, fixture().inputs, &audit);
  const auto first = snapshot(dir);
  run_campaign(spec, fixture().inputs);
  CHECK(snapshot(dir) == first);

  CHECK(first.count("summary.csv") == 1);
  CHECK(first.count("campaign.cfg") == 1);
  CHECK(data_rows(dir / "summary.csv") == spec.methods.size());
  for (const auto& run : runs) {
    const fs::path m = dir / method_name(run.method);
    for (const char* f : {"records.jsonl", "timings.jsonl", "cdf.csv", "breakdown.csv", "breakdown_hist.csv"})
      CHECK(fs::exists(m / f));
    CHECK_FALSE(fs::exists(m / "records.jsonl.partial"));
    const auto back = read_records((m / "records.jsonl").string());
    REQUIRE(back.size() == spec.examples);
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(back[i].example_id == i);
      CHECK(record_to_json(back[i]) == record_to_json(run.records[i]));
      CHECK(back[i].seed == mix_seed(spec.seed, back[i].dataset_index));
    }
    const auto curve = cdf_curve(back, default_query_grid(spec.attack.budget), spec.bootstrap);
    CHECK(curve.back().fraction == success_rate(back));
  }
  CHECK(audit.nu == spec.attack.nu);
  CHECK(audit.max_candidate_distance <= spec.attack.nu * (1 + 1e-9));

  const fs::path dir3 = scratch("det3");
  CampaignSpec parallel = small_spec(dir3.string());
  parallel.workers = 3;
  run_campaign(parallel, fixture().inputs);
  auto a = snapshot(dir3);
  auto b = first;
  a.erase("campaign.cfg");
  b.erase("campaign.cfg");
  CHECK(a == b);
  fs::remove_all(dir);
  fs::remove_all(dir3);
}

TEST_CASE("same examples regardless of method list") {
  CampaignSpec one = small_spec("");
  one.methods = {Method::SimbaDct};
  CampaignSpec two = small_spec("");
  two.methods = {Method::Gfcs, Method::SimbaDct};
  const auto r1 = run_campaign(one, fixture().inputs);
  const auto r2 = run_campaign(two, fixture().inputs);
  REQUIRE(r1[0].records.size() == r2[1].records.size());
  for (std::size_t i = 0; i < r1[0].records.size(); ++i)
    CHECK(record_to_json(r1[0].records[i]) == record_to_json(r2[1].records[i]));
}

TEST_CASE("shortfall of correctly classified items is a named error") {
  CampaignSpec spec = small_spec("");
  spec.examples = 10000;
  try {
    run_campaign(spec, fixture().inputs);
    FAIL("expected a shortfall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Shortfall);
    CHECK(std::string(e.what()).find("10000") != std::string::npos);
  }
  CampaignInputs no_surrogates = fixture().inputs;
  no_surrogates.surrogates.clear();
  spec = small_spec("");
  CHECK_THROWS_AS(run_campaign(spec, no_surrogates), Error);
  spec.methods = {Method::SimbaPixel};
  CHECK_NOTHROW(run_campaign(spec, no_surrogates));
}

TEST_CASE("targeted campaigns record their targets") {
  CampaignSpec spec = small_spec("");
  spec.methods = {Method::Gfcs};
  spec.targeted = true;
  spec.attack.loss = LossKind::TargetedLog;
  const auto runs = run_campaign(spec, fixture().inputs);
  for (const auto& r : runs[0].records) {
    REQUIRE(r.target.has_value());
    CHECK(static_cast<int>(*r.target) != r.label);
  }
}

TEST_CASE("epsilon sweep reproduces the single campaign") {
  const fs::path dir = scratch("sweep");
  CampaignSpec spec = small_spec(dir.string());
  spec.methods = {Method::Gfcs, Method::SimbaOds};
  const auto rows = epsilon_sweep(spec, fixture().inputs, {0.25, 0.5, 1.0});
  CHECK(rows.size() == 6);
  CHECK(data_rows(dir / "sweep.csv") == 6);
  CampaignSpec single = small_spec("");
  single.methods = spec.methods;
  const auto runs = run_campaign(single, fixture().inputs);
  for (std::size_t m = 0; m < 2; ++m) {
    const SweepRow& row = rows[2 + m];
    CHECK(row.epsilon == 0.5);
    const SummaryRow s = summarize(method_name(runs[m].method), runs[m].records, spec.bootstrap);
    CHECK(row.method == s.method);
    CHECK(row.success_rate == s.success_rate);
    CHECK(row.median.median == s.median.median);
    CHECK(row.median.standard_error == s.median.standard_error);
  }
  CHECK(fs::exists(dir / "eps_1" / "summary.csv"));
  fs::remove_all(dir);
}
