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
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gfcs {

// Outcome of one attacked example, as persisted in records.jsonl.
struct RunRecord {
  std::string method;
  std::size_t example_id = 0;     // position in the campaign's example list
  std::size_t dataset_index = 0;  // index into the source dataset
  int label = 0;
  std::optional<std::size_t> target;
  bool success = false;
  std::string reason;  // failure reason, "none" on success
  std::uint64_t total_queries = 0;
  std::uint64_t gradient_queries = 0;
  std::uint64_t coimage_queries = 0;
  std::uint64_t basis_queries = 0;
  double final_norm = 0.0;
  std::uint64_t seed = 0;
  // Not persisted with the record (it would break byte-for-byte
  // reproducibility); written to timings.jsonl instead.
  double wall_ms = 0.0;
};

inline constexpr int kRecordSchemaVersion = 1;
inline constexpr std::size_t kDefaultBootstrapResamples = 1000;
inline constexpr std::uint64_t kDefaultBootstrapSeed = 20211029;

std::string record_to_json(const RunRecord& r);
RunRecord record_from_json(const std::string& line);

// Failures count as +infinity. The median is the lower-middle order
// statistic and is only reported when more than half the examples
// succeeded. The standard error is the standard deviation of the median over
// bootstrap resamples of the record list (infinite if any resampled median
// is).
struct MedianEstimate {
  bool defined = false;
  double median = std::numeric_limits<double>::infinity();
  double standard_error = std::numeric_limits<double>::infinity();
};

MedianEstimate median_queries(const std::vector<RunRecord>& records,
                              std::size_t resamples = kDefaultBootstrapResamples,
                              std::uint64_t seed = kDefaultBootstrapSeed);

double success_rate(const std::vector<RunRecord>& records);

struct CdfPoint {
  std::uint64_t queries = 0;
  double fraction = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Fraction of records that succeeded within q queries, with 2.5 / 97.5
// percentile bootstrap bounds, at every grid point (ascending).
std::vector<CdfPoint> cdf_curve(const std::vector<RunRecord>& records,
                                const std::vector<std::uint64_t>& grid,
                                std::size_t resamples = kDefaultBootstrapResamples,
                                std::uint64_t seed = kDefaultBootstrapSeed);

// {1..100} u {110, 120, ..., 1000} u {1100, 1200, ..., 10000}, truncated at
// `budget` with the budget itself appended when it is not a grid point.
std::vector<std::uint64_t> default_query_grid(std::uint64_t budget);

struct HistogramBin {
  std::uint64_t lo = 0;  // inclusive
  std::uint64_t hi = 0;  // exclusive
  std::size_t count = 0;
};

// Per-example (gradient, coimage) query split over successful records, with
// marginal histograms on power-of-two bins [0,1), [1,2), [2,4), ...
struct Breakdown {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> points;
  std::vector<HistogramBin> gradient_histogram;
  std::vector<HistogramBin> coimage_histogram;
};

Breakdown breakdown_export(const std::vector<RunRecord>& records);

// Formatting used in the CSV reports: integers print bare, +inf as "inf".
std::string format_number(double v);

}  // namespace gfcs
