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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gfcs/data.hpp"
#include "gfcs/engine.hpp"
#include "gfcs/stats.hpp"

namespace gfcs {

enum class Method { Gfcs, GfOnly, SimbaOds, SimbaPixel, SimbaDct, SimbaPcaGradients, SimbaPcaImages };

const char* method_name(Method m);
Method parse_method(const std::string& name);
bool method_needs_surrogates(Method m);

// In-memory dataset recipe, used when a campaign names a generator instead
// of a dataset file.
struct DataRecipe {
  std::string generator = "minimages";  // "blobs" or "minimages"
  std::uint64_t seed = 1;
  std::size_t height = 16;
  std::size_t width = 16;
  std::size_t channels = 3;
  std::size_t dim = 100;  // blobs only
  std::size_t classes = 10;
  std::size_t per_class = 50;
  double spread = 0.1;  // blobs only
  MinimageOptions image;

  LabeledDataset generate() const;
};

// Declarative description of a batch experiment. On disk this is a flat
// "key = value" file; see parse_campaign_spec for the keys.
struct CampaignSpec {
  std::string victim;
  std::vector<std::string> surrogates;
  std::string dataset;               // dataset file, or empty when `recipe` is set
  std::optional<DataRecipe> recipe;
  std::vector<Method> methods{Method::Gfcs};
  AttackConfig attack;
  bool nu_from_dimension = true;     // nu = sqrt(0.001 D) unless given
  bool targeted = false;             // uniform random target per example
  std::size_t examples = 1;
  std::uint64_t seed = 0;
  std::string output;                // empty: nothing is written
  std::size_t workers = 1;
  std::size_t dct_freq = 0;          // 0: min(H, W) / 2
  BasisOrder dct_order = BasisOrder::LowFrequencyFirst;
  std::size_t pca_k = 0;             // 0: min(D, 100)
  std::size_t pca_samples = 0;       // 0: 2 * pca_k
  std::size_t bootstrap = kDefaultBootstrapResamples;

  void validate() const;
};

// Keys: victim, surrogates (comma list), dataset | generator (+ gen_seed,
// gen_height, gen_width, gen_channels, gen_dim, gen_classes, gen_per_class,
// gen_spread, gen_noise, gen_contrast), method (comma list), epsilon, nu,
// budget, targeted, loss (margin | targeted-log), box (off | lo:hi),
// examples, seed, output, workers, dct_freq, dct_order (low-first | random),
// pca_k, pca_samples, bootstrap. '#' starts a comment.
CampaignSpec parse_campaign_spec(const std::string& text);
CampaignSpec load_campaign_spec(const std::string& path);
std::string format_campaign_spec(const CampaignSpec& spec);

// Models and data a campaign runs on. Surrogates are given at their native
// resolution; the harness adapts them to the victim's input shape.
struct CampaignInputs {
  ModelPtr victim;
  std::vector<ModelPtr> surrogates;
  LabeledDataset data;
};

CampaignInputs load_campaign_inputs(const CampaignSpec& spec);

struct MethodRun {
  Method method;
  std::vector<RunRecord> records;  // ordered by example_id
};

// Example-independent inputs of one method. Surrogates must already accept
// the victim's input shape; PCA methods need `shared_basis`.
struct MethodResources {
  std::vector<ModelPtr> surrogates;
  const FixedBasisSource* shared_basis = nullptr;
  std::size_t dct_freq = 0;  // 0: min(H, W) / 2
  BasisOrder dct_order = BasisOrder::LowFrequencyFirst;
};

AttackResult run_method(Method method, const MethodResources& res, QueryOracle& oracle, ConstSpan x,
                        ConstSpan scores, const AttackConfig& cfg, RandomStream& stream);

// Largest ||candidate - x_in|| seen by a campaign, for feasibility audits.
struct CampaignAudit {
  double max_candidate_distance = 0.0;
  double max_final_distance = 0.0;
  double nu = 0.0;
};

// Filters the data to examples the victim classifies correctly, draws
// `examples` of them with the master seed, and attacks each with every
// method. Each example's randomness comes from a seed derived from the
// master seed and its dataset index, so results do not depend on the worker
// count or on which other examples are selected. When spec.output is set,
// records stream to <output>/<method>/records.jsonl.partial as they finish
// and are rewritten in example order to records.jsonl at the end, followed
// by the aggregate CSVs.
std::vector<MethodRun> run_campaign(const CampaignSpec& spec, const CampaignInputs& inputs,
                                    CampaignAudit* audit = nullptr);
std::vector<MethodRun> run_campaign(const CampaignSpec& spec);

struct SummaryRow {
  std::string method;
  MedianEstimate median;
  double success_rate = 0.0;
  std::size_t n = 0;
};

SummaryRow summarize(const std::string& method, const std::vector<RunRecord>& records,
                     std::size_t bootstrap = kDefaultBootstrapResamples);

// Report writers. Each file opens with '#' comment lines stating the
// median and bootstrap conventions.
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);
void write_cdf_csv(const std::string& path, const std::vector<CdfPoint>& curve);
void write_breakdown_csv(const std::string& path, const Breakdown& breakdown);
void write_breakdown_histogram_csv(const std::string& path, const Breakdown& breakdown);
void write_records(const std::string& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records(const std::string& path);

struct SweepRow {
  double epsilon = 0.0;
  std::string method;
  MedianEstimate median;
  double success_rate = 0.0;
  std::size_t n = 0;
};

// One campaign per step length, same master seed (hence the same examples).
// With spec.output set, each step length writes to <output>/eps_<i>/ and the
// table goes to <output>/sweep.csv.
std::vector<SweepRow> epsilon_sweep(const CampaignSpec& spec, const CampaignInputs& inputs,
                                    const std::vector<double>& epsilons);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace gfcs
