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

#include "gfcs/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace gfcs {

namespace fs = std::filesystem;

// ---- methods ---------------------------------------------------------------

const char* method_name(Method m) {
  switch (m) {
    case Method::Gfcs: return "gfcs";
    case Method::GfOnly: return "gf-only";
    case Method::SimbaOds: return "simba-ods";
    case Method::SimbaPixel: return "simba-pixel";
    case Method::SimbaDct: return "simba-dct";
    case Method::SimbaPcaGradients: return "simba-pca-gradients";
    case Method::SimbaPcaImages: return "simba-pca-images";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::Gfcs, Method::GfOnly, Method::SimbaOds, Method::SimbaPixel, Method::SimbaDct,
                   Method::SimbaPcaGradients, Method::SimbaPcaImages})
    if (name == method_name(m)) return m;
  fail(ErrorCode::InvalidInput, "unknown attack method '" + name + "'");
}

bool method_needs_surrogates(Method m) {
  return m == Method::Gfcs || m == Method::GfOnly || m == Method::SimbaOds ||
         m == Method::SimbaPcaGradients;
}

LabeledDataset DataRecipe::generate() const {
  if (generator == "blobs") return gen_blobs(seed, dim, classes, per_class, spread);
  if (generator == "minimages")
    return gen_minimages(seed, height, width, channels, classes, per_class, image);
  fail(ErrorCode::InvalidInput, "unknown generator '" + generator + "' (expected blobs or minimages)");
}

// ---- spec file -------------------------------------------------------------

void CampaignSpec::validate() const {
  require(examples >= 1, "campaign: examples must be at least 1");
  require(!methods.empty(), "campaign: no attack method given");
  require(workers >= 1, "campaign: workers must be at least 1");
  require(attack.epsilon > 0.0, "campaign: epsilon must be positive");
  require(nu_from_dimension || attack.nu > 0.0, "campaign: nu must be positive");
  require(attack.loss == LossKind::Margin || targeted, "campaign: targeted-log loss needs targeted = true");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

template <class T>
T parse_value(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !in.eof())
    fail(ErrorCode::InvalidInput, "campaign spec: bad value '" + value + "' for key '" + key + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  fail(ErrorCode::InvalidInput, "campaign spec: bad boolean '" + value + "' for key '" + key + "'");
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::string fmt_double(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

CampaignSpec parse_campaign_spec(const std::string& text) {
  CampaignSpec spec;
  DataRecipe recipe;
  bool has_generator = false;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::InvalidInput, "campaign spec line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "victim") spec.victim = value;
    else if (key == "surrogates") spec.surrogates = split_list(value);
    else if (key == "dataset") spec.dataset = value;
    else if (key == "generator") { recipe.generator = value; has_generator = true; }
    else if (key == "gen_seed") recipe.seed = parse_value<std::uint64_t>(key, value);
    else if (key == "gen_height") recipe.height = parse_value<std::size_t>(key, value);
    else if (key == "gen_width") recipe.width = parse_value<std::size_t>(key, value);
    else if (key == "gen_channels") recipe.channels = parse_value<std::size_t>(key, value);
    else if (key == "gen_dim") recipe.dim = parse_value<std::size_t>(key, value);
    else if (key == "gen_classes") recipe.classes = parse_value<std::size_t>(key, value);
    else if (key == "gen_per_class") recipe.per_class = parse_value<std::size_t>(key, value);
    else if (key == "gen_spread") recipe.spread = parse_value<double>(key, value);
    else if (key == "gen_noise") recipe.image.noise = parse_value<double>(key, value);
    else if (key == "gen_contrast") recipe.image.contrast = parse_value<double>(key, value);
    else if (key == "method") {
      spec.methods.clear();
      for (const auto& m : split_list(value)) spec.methods.push_back(parse_method(m));
    }
    else if (key == "epsilon") spec.attack.epsilon = parse_value<double>(key, value);
    else if (key == "nu") {
      if (value == "default") {
        spec.nu_from_dimension = true;
      } else {
        spec.attack.nu = parse_value<double>(key, value);
        spec.nu_from_dimension = false;
      }
    }
    else if (key == "budget") spec.attack.budget = parse_value<std::uint64_t>(key, value);
    else if (key == "targeted") spec.targeted = parse_bool(key, value);
    else if (key == "loss") {
      if (value == "margin") spec.attack.loss = LossKind::Margin;
      else if (value == "targeted-log") spec.attack.loss = LossKind::TargetedLog;
      else fail(ErrorCode::InvalidInput, "campaign spec: unknown loss '" + value + "'");
    }
    else if (key == "box") {
      if (value == "off") {
        spec.attack.box.enabled = false;
      } else {
        const auto colon = value.find(':');
        if (colon == std::string::npos)
          fail(ErrorCode::InvalidInput, "campaign spec: box must be 'off' or 'lo:hi'");
        spec.attack.box = {true, parse_value<double>(key, value.substr(0, colon)),
                           parse_value<double>(key, value.substr(colon + 1))};
      }
    }
    else if (key == "examples") spec.examples = parse_value<std::size_t>(key, value);
    else if (key == "seed") spec.seed = parse_value<std::uint64_t>(key, value);
    else if (key == "output") spec.output = value;
    else if (key == "workers") spec.workers = parse_value<std::size_t>(key, value);
    else if (key == "dct_freq") spec.dct_freq = parse_value<std::size_t>(key, value);
    else if (key == "dct_order") {
      if (value == "low-first") spec.dct_order = BasisOrder::LowFrequencyFirst;
      else if (value == "random") spec.dct_order = BasisOrder::Random;
      else fail(ErrorCode::InvalidInput, "campaign spec: dct_order must be low-first or random");
    }
    else if (key == "pca_k") spec.pca_k = parse_value<std::size_t>(key, value);
    else if (key == "pca_samples") spec.pca_samples = parse_value<std::size_t>(key, value);
    else if (key == "bootstrap") spec.bootstrap = parse_value<std::size_t>(key, value);
    else fail(ErrorCode::InvalidInput, "campaign spec: unknown key '" + key + "'");
  }
  if (has_generator) spec.recipe = recipe;
  spec.validate();
  return spec;
}

CampaignSpec load_campaign_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open campaign spec '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_campaign_spec(buf.str());
}

std::string format_campaign_spec(const CampaignSpec& spec) {
  std::ostringstream out;
  if (!spec.victim.empty()) out << "victim = " << spec.victim << '\n';
  if (!spec.surrogates.empty()) out << "surrogates = " << join(spec.surrogates) << '\n';
  if (!spec.dataset.empty()) out << "dataset = " << spec.dataset << '\n';
  if (spec.recipe) {
    const DataRecipe& r = *spec.recipe;
    out << "generator = " << r.generator << '\n'
        << "gen_seed = " << r.seed << '\n'
        << "gen_height = " << r.height << '\n'
        << "gen_width = " << r.width << '\n'
        << "gen_channels = " << r.channels << '\n'
        << "gen_dim = " << r.dim << '\n'
        << "gen_classes = " << r.classes << '\n'
        << "gen_per_class = " << r.per_class << '\n'
        << "gen_spread = " << fmt_double(r.spread) << '\n'
        << "gen_noise = " << fmt_double(r.image.noise) << '\n'
        << "gen_contrast = " << fmt_double(r.image.contrast) << '\n';
  }
  std::vector<std::string> methods;
  for (Method m : spec.methods) methods.emplace_back(method_name(m));
  out << "method = " << join(methods) << '\n'
      << "epsilon = " << fmt_double(spec.attack.epsilon) << '\n'
      << "nu = " << (spec.nu_from_dimension ? std::string("default") : fmt_double(spec.attack.nu)) << '\n'
      << "budget = " << spec.attack.budget << '\n'
      << "targeted = " << (spec.targeted ? "true" : "false") << '\n'
      << "loss = " << (spec.attack.loss == LossKind::Margin ? "margin" : "targeted-log") << '\n'
      << "box = "
      << (spec.attack.box.enabled ? fmt_double(spec.attack.box.lo) + ":" + fmt_double(spec.attack.box.hi)
                                  : std::string("off"))
      << '\n'
      << "examples = " << spec.examples << '\n'
      << "seed = " << spec.seed << '\n';
  if (!spec.output.empty()) out << "output = " << spec.output << '\n';
  out << "workers = " << spec.workers << '\n'
      << "dct_freq = " << spec.dct_freq << '\n'
      << "dct_order = " << (spec.dct_order == BasisOrder::Random ? "random" : "low-first") << '\n'
      << "pca_k = " << spec.pca_k << '\n'
      << "pca_samples = " << spec.pca_samples << '\n'
      << "bootstrap = " << spec.bootstrap << '\n';
  return out.str();
}

CampaignInputs load_campaign_inputs(const CampaignSpec& spec) {
  spec.validate();
  require(!spec.victim.empty(), "campaign: no victim model given");
  require(spec.dataset.empty() != !spec.recipe.has_value(),
          "campaign: give exactly one of dataset or generator");
  CampaignInputs in;
  in.victim = load_model(spec.victim);
  for (const auto& path : spec.surrogates) in.surrogates.push_back(load_model(path));
  in.data = spec.recipe ? spec.recipe->generate() : load_dataset(spec.dataset);
  return in;
}

// ---- reports ---------------------------------------------------------------

namespace {

const char* kConventionNotes[] = {
    "# failures count as +inf queries; median = lower-middle order statistic, reported only when "
    "success rate > 0.5",
    "# se = standard deviation of the median over bootstrap resamples of the examples; cdf bounds = "
    "2.5/97.5 bootstrap percentiles",
};

std::ofstream open_report(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  return out;
}

std::string median_cell(const MedianEstimate& m) {
  return m.defined ? format_number(m.median) : std::string("undefined");
}

}  // namespace

SummaryRow summarize(const std::string& method, const std::vector<RunRecord>& records,
                     std::size_t bootstrap) {
  SummaryRow row;
  row.method = method;
  row.n = records.size();
  row.success_rate = success_rate(records);
  if (!records.empty()) row.median = median_queries(records, bootstrap);
  return row;
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  auto out = open_report(path);
  for (const char* note : kConventionNotes) out << note << '\n';
  out << "method,median,se,success_rate,n\n";
  for (const auto& r : rows)
    out << r.method << ',' << median_cell(r.median) << ',' << format_number(r.median.standard_error) << ','
        << format_number(r.success_rate) << ',' << r.n << '\n';
}

void write_cdf_csv(const std::string& path, const std::vector<CdfPoint>& curve) {
  auto out = open_report(path);
  for (const char* note : kConventionNotes) out << note << '\n';
  out << "q,fraction,ci_low,ci_high\n";
  for (const auto& p : curve)
    out << p.queries << ',' << format_number(p.fraction) << ',' << format_number(p.ci_low) << ','
        << format_number(p.ci_high) << '\n';
}

void write_breakdown_csv(const std::string& path, const Breakdown& breakdown) {
  auto out = open_report(path);
  out << "grad_q,coimage_q\n";
  for (const auto& [g, c] : breakdown.points) out << g << ',' << c << '\n';
}

void write_breakdown_histogram_csv(const std::string& path, const Breakdown& breakdown) {
  auto out = open_report(path);
  out << "axis,bin_lo,bin_hi,count\n";
  for (const auto& b : breakdown.gradient_histogram)
    out << "grad_q," << b.lo << ',' << b.hi << ',' << b.count << '\n';
  for (const auto& b : breakdown.coimage_histogram)
    out << "coimage_q," << b.lo << ',' << b.hi << ',' << b.count << '\n';
}

void write_records(const std::string& path, const std::vector<RunRecord>& records) {
  auto out = open_report(path);
  for (const auto& r : records) out << record_to_json(r) << '\n';
}

std::vector<RunRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open records '" + path + "'");
  std::vector<RunRecord> out;
  std::string line;
  while (std::getline(in, line))
    if (!trim(line).empty()) out.push_back(record_from_json(line));
  return out;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  auto out = open_report(path);
  for (const char* note : kConventionNotes) out << note << '\n';
  out << "epsilon,method,median,se,success_rate,n\n";
  for (const auto& r : rows)
    out << fmt_double(r.epsilon) << ',' << r.method << ',' << median_cell(r.median) << ','
        << format_number(r.median.standard_error) << ',' << format_number(r.success_rate) << ',' << r.n
        << '\n';
}

// ---- campaign --------------------------------------------------------------

AttackResult run_method(Method method, const MethodResources& res, QueryOracle& oracle, ConstSpan x,
                        ConstSpan scores, const AttackConfig& cfg, RandomStream& stream) {
  const Shape shape = oracle.victim().input_shape();
  switch (method) {
    case Method::Gfcs: return gfcs_attack(oracle, res.surrogates, x, scores, cfg, stream);
    case Method::GfOnly: return gf_only_attack(oracle, res.surrogates, x, scores, cfg, stream);
    case Method::SimbaOds: {
      OdsSource source(res.surrogates, stream, cfg.max_degenerate);
      return simba_attack(oracle, source, x, scores, cfg);
    }
    case Method::SimbaPixel: {
      FixedBasisSource source = pixel_basis(shape.size(), stream);
      return simba_attack(oracle, source, x, scores, cfg);
    }
    case Method::SimbaDct: {
      const std::size_t freq =
          res.dct_freq ? res.dct_freq : std::max<std::size_t>(1, std::min(shape.height, shape.width) / 2);
      FixedBasisSource source = dct_basis_source(shape, freq, stream, res.dct_order);
      return simba_attack(oracle, source, x, scores, cfg);
    }
    case Method::SimbaPcaGradients:
    case Method::SimbaPcaImages: {
      require(res.shared_basis != nullptr, std::string(method_name(method)) + ": no basis supplied");
      FixedBasisSource source = *res.shared_basis;
      return simba_attack(oracle, source, x, scores, cfg);
    }
  }
  fail(ErrorCode::Internal, "unknown method");
}

namespace {

constexpr std::uint64_t kSelectionKey = 0x5e1ec7;
constexpr std::uint64_t kPcaKey = 0xfca;

struct Prepared {
  std::vector<ModelPtr> surrogates;  // adapted to the victim's shape
  FilteredDataset filtered;
  std::vector<std::size_t> selected;  // positions in `filtered`
  std::vector<std::size_t> holdout;
  AttackConfig attack;
};

void persist_method(const CampaignSpec& spec, const MethodRun& run) {
  const fs::path dir = fs::path(spec.output) / method_name(run.method);
  write_records((dir / "records.jsonl").string(), run.records);
  fs::remove(dir / "records.jsonl.partial");
  {
    auto out = open_report((dir / "timings.jsonl").string());
    for (const auto& r : run.records)
      out << nlohmann::json{{"example_id", r.example_id}, {"wall_ms", r.wall_ms}}.dump() << '\n';
  }
  write_cdf_csv((dir / "cdf.csv").string(),
                cdf_curve(run.records, default_query_grid(spec.attack.budget), spec.bootstrap));
  const Breakdown b = breakdown_export(run.records);
  write_breakdown_csv((dir / "breakdown.csv").string(), b);
  write_breakdown_histogram_csv((dir / "breakdown_hist.csv").string(), b);
}

}  // namespace

std::vector<MethodRun> run_campaign(const CampaignSpec& spec, const CampaignInputs& inputs,
                                    CampaignAudit* audit) {
  spec.validate();
  require(inputs.victim != nullptr, "campaign: no victim model");
  inputs.data.validate();
  const ScoreModel& victim = *inputs.victim;
  const Shape shape = victim.input_shape();
  const std::size_t dim = victim.input_dim();
  require(inputs.data.meta.shape.size() == dim, "campaign: dataset does not match the victim's input size");

  Prepared prep;
  prep.attack = spec.attack;
  prep.attack.record_trace = false;
  if (spec.nu_from_dimension) prep.attack.nu = default_nu(dim);
  for (const auto& s : inputs.surrogates) {
    auto adapted = adapt_domain(s, shape);
    require(adapted->num_classes() == victim.num_classes(), "campaign: surrogate class count differs from the victim's");
    prep.surrogates.push_back(std::move(adapted));
  }
  for (Method m : spec.methods)
    if (method_needs_surrogates(m))
      require(!prep.surrogates.empty(), std::string("campaign: method ") + method_name(m) + " needs surrogates");

  prep.filtered = filter_correct(victim, inputs.data);
  const std::size_t available = prep.filtered.data.size();
  if (available < spec.examples)
    fail(ErrorCode::Shortfall, "campaign: requested " + std::to_string(spec.examples) + " examples but only " +
                                   std::to_string(available) + " of " + std::to_string(inputs.data.size()) +
                                   " items are classified correctly by the victim");
  std::vector<std::size_t> order(available);
  for (std::size_t i = 0; i < available; ++i) order[i] = i;
  RandomStream(mix_seed(spec.seed, kSelectionKey)).shuffle(order);
  prep.selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(spec.examples));
  prep.holdout.assign(order.begin() + static_cast<std::ptrdiff_t>(spec.examples), order.end());

  if (audit) *audit = CampaignAudit{0.0, 0.0, prep.attack.nu};
  std::mutex audit_mutex;

  std::vector<MethodRun> runs;
  for (Method method : spec.methods) {
    // Fixed bases shared by every example of this method.
    std::optional<FixedBasisSource> shared_basis;
    const std::size_t pca_k = spec.pca_k ? spec.pca_k : std::min<std::size_t>(dim, 100);
    if (method == Method::SimbaPcaGradients) {
      std::vector<Vector> samples;
      const auto& pool = prep.holdout.size() >= pca_k ? prep.holdout : order;
      for (std::size_t i : pool) samples.push_back(prep.filtered.data.inputs[i]);
      RandomStream pca_stream(mix_seed(spec.seed, kPcaKey));
      shared_basis = pca_gradient_basis(*prep.surrogates.front(), samples, pca_k, pca_stream,
                                        spec.pca_samples ? std::optional(spec.pca_samples) : std::nullopt);
    } else if (method == Method::SimbaPcaImages) {
      shared_basis = image_pca_basis(inputs.data, std::min(pca_k, inputs.data.size()));
    }

    std::ofstream partial;
    std::mutex write_mutex;
    if (!spec.output.empty()) {
      const fs::path dir = fs::path(spec.output) / method_name(method);
      fs::create_directories(dir);
      partial.open(dir / "records.jsonl.partial", std::ios::trunc);
      if (!partial) fail(ErrorCode::Io, "cannot write to '" + dir.string() + "'");
    }

    MethodResources resources;
    resources.surrogates = prep.surrogates;
    resources.shared_basis = shared_basis ? &*shared_basis : nullptr;
    resources.dct_freq = spec.dct_freq;
    resources.dct_order = spec.dct_order;

    MethodRun run{method, std::vector<RunRecord>(spec.examples)};
    auto attack_one = [&](std::size_t j) {
      const auto start = std::chrono::steady_clock::now();
      const std::size_t pos = prep.selected[j];
      const Vector& x = prep.filtered.data.inputs[pos];
      const Vector& scores = prep.filtered.scores[pos];
      const int label = prep.filtered.data.labels[pos];
      const std::size_t dataset_index = prep.filtered.indices[pos];

      RunRecord rec;
      rec.method = method_name(method);
      rec.example_id = j;
      rec.dataset_index = dataset_index;
      rec.label = label;
      rec.seed = mix_seed(spec.seed, dataset_index);
      const RandomStream base(rec.seed);

      AttackConfig cfg = prep.attack;
      if (spec.targeted) {
        RandomStream target_stream = base.child(1);
        cfg.target = pick_target_class(target_stream, static_cast<std::size_t>(label), victim.num_classes());
        rec.target = cfg.target;
      }
      RandomStream stream = base.child(2);
      QueryOracle oracle(inputs.victim, cfg.budget);
      const AttackResult result =
          run_method(method, resources, oracle, x, scores, cfg, stream);
      rec.success = result.success;
      rec.reason = failure_reason_name(result.reason);
      rec.total_queries = result.total_queries;
      rec.gradient_queries = result.gradient_queries;
      rec.coimage_queries = result.coimage_queries;
      rec.basis_queries = result.basis_queries;
      rec.final_norm = result.final_norm;
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      if (audit) {
        std::lock_guard lock(audit_mutex);
        audit->max_candidate_distance = std::max(audit->max_candidate_distance, result.max_candidate_distance);
        audit->max_final_distance = std::max(audit->max_final_distance, result.final_norm);
      }
      std::lock_guard lock(write_mutex);
      if (partial.is_open()) partial << record_to_json(rec) << '\n' << std::flush;
      run.records[j] = std::move(rec);
    };

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      while (true) {
        const std::size_t j = next.fetch_add(1);
        if (j >= spec.examples) return;
        try {
          attack_one(j);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next.store(spec.examples);
          return;
        }
      }
    };
    const std::size_t n_workers = std::min(spec.workers, spec.examples);
    if (n_workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    partial.close();
    if (!spec.output.empty()) persist_method(spec, run);
    runs.push_back(std::move(run));
  }

  if (!spec.output.empty()) {
    std::vector<SummaryRow> rows;
    for (const auto& r : runs) rows.push_back(summarize(method_name(r.method), r.records, spec.bootstrap));
    write_summary_csv((fs::path(spec.output) / "summary.csv").string(), rows);
    std::ofstream echo(fs::path(spec.output) / "campaign.cfg", std::ios::trunc);
    echo << "# effective nu = " << fmt_double(prep.attack.nu) << '\n' << format_campaign_spec(spec);
  }
  return runs;
}

std::vector<MethodRun> run_campaign(const CampaignSpec& spec) {
  return run_campaign(spec, load_campaign_inputs(spec));
}

std::vector<SweepRow> epsilon_sweep(const CampaignSpec& spec, const CampaignInputs& inputs,
                                    const std::vector<double>& epsilons) {
  require(!epsilons.empty(), "epsilon_sweep: no step lengths given");
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    require(epsilons[i] > 0.0 && std::isfinite(epsilons[i]), "epsilon_sweep: step lengths must be positive");
    CampaignSpec one = spec;
    one.attack.epsilon = epsilons[i];
    if (!spec.output.empty()) one.output = (fs::path(spec.output) / ("eps_" + std::to_string(i))).string();
    for (const auto& run : run_campaign(one, inputs)) {
      SweepRow row;
      row.epsilon = epsilons[i];
      row.method = method_name(run.method);
      const SummaryRow s = summarize(row.method, run.records, spec.bootstrap);
      row.median = s.median;
      row.success_rate = s.success_rate;
      row.n = s.n;
      rows.push_back(row);
    }
  }
  if (!spec.output.empty()) {
    fs::create_directories(spec.output);
    write_sweep_csv((fs::path(spec.output) / "sweep.csv").string(), rows);
  }
  return rows;
}

}  // namespace gfcs
