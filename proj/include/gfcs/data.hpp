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
#include <string>
#include <vector>

#include "gfcs/model.hpp"

namespace gfcs {

struct DatasetMeta {
  std::string generator;  // "blobs", "minimages", or "file"
  std::uint64_t seed = 0;
  Shape shape;
  std::size_t classes = 0;
};

struct LabeledDataset {
  std::vector<Vector> inputs;
  std::vector<int> labels;
  DatasetMeta meta;

  std::size_t size() const { return inputs.size(); }
  // Checks lengths, shapes, label range and finiteness.
  void validate() const;
  LabeledDataset subset(const std::vector<std::size_t>& indices) const;
};

// C isotropic Gaussian clusters in R^D with per-coordinate standard deviation
// `spread`. Cluster means are pairwise one unit apart: mean_k = e_k / sqrt(2)
// when C <= D; otherwise mean_k = k * e_0 (unit spacing along one axis).
// Items are emitted class by class.
LabeledDataset gen_blobs(std::uint64_t seed, std::size_t dim, std::size_t classes,
                         std::size_t n_per_class, double spread);

struct MinimageOptions {
  double noise = 0.08;     // per-pixel Gaussian standard deviation
  double contrast = 0.12;  // amplitude of the class-specific pattern
};

// Small synthetic images. Each class owns a base pattern built from two or
// three low-frequency cosines plus one localized Gaussian blob, centred on a
// gray level of 0.5; samples add Gaussian pixel noise and are clipped to
// [0, 1].
LabeledDataset gen_minimages(std::uint64_t seed, std::size_t height, std::size_t width,
                             std::size_t channels, std::size_t classes, std::size_t n_per_class,
                             MinimageOptions opts = {});

// Items the model classifies correctly (argmax, ties to the lowest index),
// together with the scores it produced for each; `indices` maps back into
// the source dataset.
struct FilteredDataset {
  LabeledDataset data;
  std::vector<Vector> scores;
  std::vector<std::size_t> indices;
};

FilteredDataset filter_correct(const ScoreModel& model, const LabeledDataset& data);

// Deterministic split: a seeded shuffle, the first `test_fraction` of which
// becomes the test set. Relative order is preserved inside each part.
std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& data,
                                                        double test_fraction, std::uint64_t seed);

// Dataset file: magic "GFCSDATA", u64 header length, JSON header {"format",
// "version", "generator", "seed", "shape": [h, w, c], "classes", "count"},
// then count * D little-endian f32 inputs and count little-endian i32 labels.
inline constexpr int kDatasetFormatVersion = 1;

std::vector<std::uint8_t> serialize_dataset(const LabeledDataset& data);
LabeledDataset deserialize_dataset(std::span<const std::uint8_t> bytes);
void save_dataset(const LabeledDataset& data, const std::string& path);
LabeledDataset load_dataset(const std::string& path);

}  // namespace gfcs
