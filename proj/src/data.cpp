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

#include "gfcs/data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gfcs/random.hpp"
#include "io_util.hpp"
#include "json.hpp"

namespace gfcs {

namespace {

// Generated values are rounded to single precision so that the on-disk f32
// format reproduces them exactly.
double to_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

}  // namespace

void LabeledDataset::validate() const {
  require(inputs.size() == labels.size(), "dataset: inputs and labels differ in length");
  require(meta.classes >= 1, "dataset: class count must be positive");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    require(inputs[i].size() == meta.shape.size(),
            "dataset: item " + std::to_string(i) + " has the wrong length");
    require(labels[i] >= 0 && static_cast<std::size_t>(labels[i]) < meta.classes,
            "dataset: item " + std::to_string(i) + " has an out-of-range label");
    require_finite(inputs[i], "dataset input");
  }
}

LabeledDataset LabeledDataset::subset(const std::vector<std::size_t>& indices) const {
  LabeledDataset out;
  out.meta = meta;
  out.inputs.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    require(i < size(), "dataset: subset index out of range");
    out.inputs.push_back(inputs[i]);
    out.labels.push_back(labels[i]);
  }
  return out;
}

LabeledDataset gen_blobs(std::uint64_t seed, std::size_t dim, std::size_t classes,
                         std::size_t n_per_class, double spread) {
  require(dim >= 2 && classes >= 2, "gen_blobs: need D >= 2 and C >= 2");
  require(spread >= 0.0, "gen_blobs: spread must be nonnegative");
  LabeledDataset out;
  out.meta = DatasetMeta{"blobs", seed, flat_shape(dim), classes};
  RandomStream rng(seed);
  const double axis = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 0; k < classes; ++k) {
    Vector mean(dim, 0.0);
    if (classes <= dim)
      mean[k] = axis;
    else
      mean[0] = static_cast<double>(k);
    for (std::size_t n = 0; n < n_per_class; ++n) {
      Vector x(dim);
      for (std::size_t d = 0; d < dim; ++d) x[d] = to_f32(mean[d] + spread * rng.normal());
      out.inputs.push_back(std::move(x));
      out.labels.push_back(static_cast<int>(k));
    }
  }
  return out;
}

LabeledDataset gen_minimages(std::uint64_t seed, std::size_t height, std::size_t width,
                             std::size_t channels, std::size_t classes, std::size_t n_per_class,
                             MinimageOptions opts) {
  require(height >= 8 && width >= 8, "gen_minimages: images must be at least 8x8");
  require(channels >= 1 && classes >= 2, "gen_minimages: need channels >= 1 and C >= 2");
  require(opts.noise >= 0.0 && opts.contrast >= 0.0, "gen_minimages: negative noise or contrast");

  const Shape shape{height, width, channels};
  const double pi = std::numbers::pi;
  const auto H = static_cast<double>(height);
  const auto W = static_cast<double>(width);

  std::vector<Vector> bases;
  for (std::size_t k = 0; k < classes; ++k) {
    RandomStream rng = RandomStream(seed).child(1000 + k);
    Vector pattern(shape.size(), 0.0);
    const std::size_t n_cos = 2 + rng.below(2);
    for (std::size_t j = 0; j < n_cos; ++j) {
      std::size_t u = rng.below(4);
      std::size_t v = rng.below(4);
      if (u == 0 && v == 0) v = 1;
      const double phase_r = rng.uniform(0.0, 2.0 * pi);
      const double phase_c = rng.uniform(0.0, 2.0 * pi);
      const double amp = rng.uniform(0.5, 1.0);
      Vector mix(channels);
      for (double& m : mix) m = rng.uniform(-1.0, 1.0);
      for (std::size_t r = 0; r < height; ++r)
        for (std::size_t c = 0; c < width; ++c) {
          const double wave =
              amp * std::cos(pi * static_cast<double>(u) * (static_cast<double>(r) + 0.5) / H + phase_r) *
              std::cos(pi * static_cast<double>(v) * (static_cast<double>(c) + 0.5) / W + phase_c);
          for (std::size_t ch = 0; ch < channels; ++ch) pattern[shape.index(r, c, ch)] += mix[ch] * wave;
        }
    }
    const double cy = rng.uniform(0.2, 0.8) * H;
    const double cx = rng.uniform(0.2, 0.8) * W;
    const double radius = rng.uniform(0.08, 0.15) * static_cast<double>(std::min(height, width));
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    Vector tint(channels);
    for (double& t : tint) t = rng.uniform(0.5, 1.0);
    for (std::size_t r = 0; r < height; ++r)
      for (std::size_t c = 0; c < width; ++c) {
        const double dy = static_cast<double>(r) + 0.5 - cy;
        const double dx = static_cast<double>(c) + 0.5 - cx;
        const double blob = sign * std::exp(-(dy * dy + dx * dx) / (2.0 * radius * radius));
        for (std::size_t ch = 0; ch < channels; ++ch) pattern[shape.index(r, c, ch)] += tint[ch] * blob;
      }
    double peak = 0.0;
    for (double p : pattern) peak = std::max(peak, std::abs(p));
    Vector base(shape.size());
    for (std::size_t i = 0; i < base.size(); ++i)
      base[i] = 0.5 + opts.contrast * (peak > 0.0 ? pattern[i] / peak : 0.0);
    bases.push_back(std::move(base));
  }

  LabeledDataset out;
  out.meta = DatasetMeta{"minimages", seed, shape, classes};
  RandomStream noise = RandomStream(seed).child(7);
  for (std::size_t k = 0; k < classes; ++k) {
    for (std::size_t n = 0; n < n_per_class; ++n) {
      Vector x(shape.size());
      for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = to_f32(std::clamp(bases[k][i] + opts.noise * noise.normal(), 0.0, 1.0));
      out.inputs.push_back(std::move(x));
      out.labels.push_back(static_cast<int>(k));
    }
  }
  return out;
}

FilteredDataset filter_correct(const ScoreModel& model, const LabeledDataset& data) {
  require(data.meta.shape.size() == model.input_dim(), "filter_correct: dataset/model shape mismatch");
  FilteredDataset out;
  out.data.meta = data.meta;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Vector scores = model.forward(data.inputs[i]);
    if (static_cast<int>(argmax(scores)) != data.labels[i]) continue;
    out.data.inputs.push_back(data.inputs[i]);
    out.data.labels.push_back(data.labels[i]);
    out.scores.push_back(std::move(scores));
    out.indices.push_back(i);
  }
  if (out.data.size() == 0)
    fail(ErrorCode::EmptySelection, "filter_correct: the model misclassifies every item");
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& data,
                                                        double test_fraction, std::uint64_t seed) {
  require(test_fraction >= 0.0 && test_fraction < 1.0, "split_dataset: fraction must be in [0, 1)");
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  RandomStream rng(seed);
  rng.shuffle(order);
  const auto n_test =
      static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(data.size())));
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {data.subset(train), data.subset(test)};
}

// ---- file format -----------------------------------------------------------

namespace {
constexpr char kMagic[8] = {'G', 'F', 'C', 'S', 'D', 'A', 'T', 'A'};
}

std::vector<std::uint8_t> serialize_dataset(const LabeledDataset& data) {
  data.validate();
  nlohmann::json header = {
      {"format", "gfcs-dataset"},
      {"version", kDatasetFormatVersion},
      {"generator", data.meta.generator},
      {"seed", data.meta.seed},
      {"shape", {data.meta.shape.height, data.meta.shape.width, data.meta.shape.channels}},
      {"classes", data.meta.classes},
      {"count", data.size()},
  };
  const std::string text = header.dump();
  std::vector<std::uint8_t> out(kMagic, kMagic + 8);
  io::put_le<std::uint64_t>(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& x : data.inputs)
    for (double v : x) io::put_le(out, static_cast<float>(v));
  for (int y : data.labels) io::put_le(out, static_cast<std::int32_t>(y));
  return out;
}

LabeledDataset deserialize_dataset(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) throw ParseError(bytes.size(), "dataset file truncated before header length");
  if (!std::equal(kMagic, kMagic + 8, bytes.begin()))
    throw ParseError(0, "not a dataset file (bad magic)");
  const auto header_len = io::get_le<std::uint64_t>(bytes.data() + 8);
  if (header_len > bytes.size() - 16) throw ParseError(8, "dataset header length exceeds file size");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + 16, bytes.begin() + 16 + header_len);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(16 + (e.byte > 0 ? e.byte - 1 : 0), "dataset header is not valid JSON");
  }
  LabeledDataset out;
  std::size_t cursor = 16 + header_len;
  try {
    if (header.value("format", std::string()) != "gfcs-dataset")
      throw ParseError(16, "dataset header: wrong format tag");
    const int version = header.at("version").get<int>();
    if (version != kDatasetFormatVersion)
      throw Error(ErrorCode::UnsupportedVersion,
                  "dataset file version " + std::to_string(version) + " is not supported");
    const auto& s = header.at("shape");
    out.meta.shape = Shape{s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>(),
                           s.at(2).get<std::size_t>()};
    out.meta.generator = header.value("generator", std::string("file"));
    out.meta.seed = header.value("seed", std::uint64_t{0});
    out.meta.classes = header.at("classes").get<std::size_t>();
    const auto count = header.at("count").get<std::size_t>();
    const std::size_t dim = out.meta.shape.size();
    const std::size_t remaining = bytes.size() - cursor;
    if (dim == 0 || count > remaining / (4 * dim + 4) || count * (4 * dim + 4) != remaining)
      throw ParseError(cursor, "dataset payload size does not match header");
    out.inputs.assign(count, Vector(dim));
    for (auto& x : out.inputs)
      for (double& v : x) {
        v = static_cast<double>(io::get_le<float>(bytes.data() + cursor));
        cursor += 4;
      }
    out.labels.resize(count);
    for (int& y : out.labels) {
      y = io::get_le<std::int32_t>(bytes.data() + cursor);
      cursor += 4;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(16, std::string("dataset header: ") + e.what());
  }
  try {
    out.validate();
  } catch (const Error& e) {
    throw ParseError(16 + header_len, std::string("dataset content invalid: ") + e.what());
  }
  return out;
}

void save_dataset(const LabeledDataset& data, const std::string& path) {
  io::write_file(path, serialize_dataset(data));
}

LabeledDataset load_dataset(const std::string& path) { return deserialize_dataset(io::read_file(path)); }

}  // namespace gfcs
