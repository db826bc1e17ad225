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

#include "gfcs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gfcs/error.hpp"
#include "gfcs/random.hpp"
#include "json.hpp"

namespace gfcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double query_value(const RunRecord& r) {
  return r.success ? static_cast<double>(r.total_queries) : kInf;
}

double lower_median(std::vector<double>& values) {
  const std::size_t mid = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  return values[mid];
}

// Type-7 (linear interpolation) sample quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string record_to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["schema"] = kRecordSchemaVersion;
  j["method"] = r.method;
  j["example_id"] = r.example_id;
  j["dataset_index"] = r.dataset_index;
  j["label"] = r.label;
  j["target"] = r.target ? nlohmann::ordered_json(*r.target) : nlohmann::ordered_json(nullptr);
  j["success"] = r.success;
  j["reason"] = r.reason;
  j["total_queries"] = r.total_queries;
  j["gradient_queries"] = r.gradient_queries;
  j["coimage_queries"] = r.coimage_queries;
  j["basis_queries"] = r.basis_queries;
  j["final_norm"] = r.final_norm;
  j["seed"] = r.seed;
  return j.dump();
}

RunRecord record_from_json(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.byte, "record is not valid JSON");
  }
  try {
    const int schema = j.at("schema").get<int>();
    if (schema != kRecordSchemaVersion)
      throw Error(ErrorCode::UnsupportedVersion, "record schema " + std::to_string(schema) + " is not supported");
    RunRecord r;
    r.method = j.at("method").get<std::string>();
    r.example_id = j.at("example_id").get<std::size_t>();
    r.dataset_index = j.at("dataset_index").get<std::size_t>();
    r.label = j.at("label").get<int>();
    if (!j.at("target").is_null()) r.target = j.at("target").get<std::size_t>();
    r.success = j.at("success").get<bool>();
    r.reason = j.at("reason").get<std::string>();
    r.total_queries = j.at("total_queries").get<std::uint64_t>();
    r.gradient_queries = j.at("gradient_queries").get<std::uint64_t>();
    r.coimage_queries = j.at("coimage_queries").get<std::uint64_t>();
    r.basis_queries = j.at("basis_queries").get<std::uint64_t>();
    r.final_norm = j.at("final_norm").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("record is missing fields: ") + e.what());
  }
}

MedianEstimate median_queries(const std::vector<RunRecord>& records, std::size_t resamples,
                              std::uint64_t seed) {
  require(!records.empty(), "median_queries: no records");
  std::vector<double> values;
  values.reserve(records.size());
  for (const auto& r : records) values.push_back(query_value(r));

  MedianEstimate est;
  est.defined = success_rate(records) > 0.5;
  std::vector<double> scratch = values;
  est.median = est.defined ? lower_median(scratch) : kInf;

  if (resamples < 2) {
    est.standard_error = kInf;
    return est;
  }
  RandomStream rng(seed);
  std::vector<double> medians(resamples);
  const std::size_t n = values.size();
  for (std::size_t b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < n; ++i) scratch[i] = values[static_cast<std::size_t>(rng.below(n))];
    medians[b] = lower_median(scratch);
  }
  if (std::any_of(medians.begin(), medians.end(), [](double m) { return std::isinf(m); })) {
    est.standard_error = kInf;
    return est;
  }
  double mean = 0.0;
  for (double m : medians) mean += m;
  mean /= static_cast<double>(resamples);
  double ss = 0.0;
  for (double m : medians) ss += (m - mean) * (m - mean);
  est.standard_error = std::sqrt(ss / static_cast<double>(resamples - 1));
  return est;
}

double success_rate(const std::vector<RunRecord>& records) {
  if (records.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& r : records) ok += r.success ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(records.size());
}

std::vector<CdfPoint> cdf_curve(const std::vector<RunRecord>& records,
                                const std::vector<std::uint64_t>& grid, std::size_t resamples,
                                std::uint64_t seed) {
  require(std::is_sorted(grid.begin(), grid.end()), "cdf_curve: grid must be ascending");
  std::vector<CdfPoint> curve(grid.size());
  if (records.empty()) return curve;
  const std::size_t n = records.size();

  auto fractions = [&](std::vector<double> successes) {
    std::sort(successes.begin(), successes.end());
    std::vector<double> f(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto within = std::upper_bound(successes.begin(), successes.end(),
                                           static_cast<double>(grid[g])) - successes.begin();
      f[g] = static_cast<double>(within) / static_cast<double>(n);
    }
    return f;
  };

  std::vector<double> values;
  for (const auto& r : records) values.push_back(query_value(r));
  const std::vector<double> point = fractions(values);

  std::vector<std::vector<double>> boot(grid.size(), std::vector<double>(resamples));
  RandomStream rng(seed);
  std::vector<double> sample(n);
  for (std::size_t b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < n; ++i) sample[i] = values[static_cast<std::size_t>(rng.below(n))];
    const auto f = fractions(sample);
    for (std::size_t g = 0; g < grid.size(); ++g) boot[g][b] = f[g];
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    curve[g].queries = grid[g];
    curve[g].fraction = point[g];
    if (resamples == 0) {
      curve[g].ci_low = curve[g].ci_high = point[g];
      continue;
    }
    std::sort(boot[g].begin(), boot[g].end());
    // Percentile bounds can miss the point estimate on degenerate samples;
    // the band is widened to contain it.
    curve[g].ci_low = std::min(point[g], quantile_sorted(boot[g], 0.025));
    curve[g].ci_high = std::max(point[g], quantile_sorted(boot[g], 0.975));
  }
  return curve;
}

std::vector<std::uint64_t> default_query_grid(std::uint64_t budget) {
  std::vector<std::uint64_t> grid;
  for (std::uint64_t q = 1; q <= 100; ++q) grid.push_back(q);
  for (std::uint64_t q = 110; q <= 1000; q += 10) grid.push_back(q);
  for (std::uint64_t q = 1100; q <= 10000; q += 100) grid.push_back(q);
  std::erase_if(grid, [&](std::uint64_t q) { return q > budget; });
  if (grid.empty() || grid.back() != budget) grid.push_back(budget);
  return grid;
}

Breakdown breakdown_export(const std::vector<RunRecord>& records) {
  Breakdown out;
  for (const auto& r : records)
    if (r.success) out.points.emplace_back(r.gradient_queries, r.coimage_queries);

  auto histogram = [&](auto pick) {
    std::uint64_t top = 0;
    for (const auto& p : out.points) top = std::max(top, pick(p));
    std::vector<HistogramBin> bins{{0, 1, 0}};
    while (bins.back().hi <= top) bins.push_back({bins.back().hi, bins.back().hi * 2, 0});
    for (const auto& p : out.points) {
      const std::uint64_t v = pick(p);
      for (auto& bin : bins)
        if (v >= bin.lo && v < bin.hi) {
          ++bin.count;
          break;
        }
    }
    return bins;
  };
  out.gradient_histogram = histogram([](const auto& p) { return p.first; });
  out.coimage_histogram = histogram([](const auto& p) { return p.second; });
  return out;
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::ostringstream s;
    s << static_cast<long long>(v);
    return s.str();
  }
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace gfcs
