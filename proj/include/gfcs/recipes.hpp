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

// Seed-pinned experiment recipes: the models and data behind the desk-scale
// experiments, rebuilt deterministically on demand.

#include <memory>
#include <vector>

#include "gfcs/data.hpp"
#include "gfcs/model.hpp"

namespace gfcs {

struct TrainedEntry {
  std::string name;
  std::string arch;
  std::shared_ptr<Network> model;
  TrainReport report;
};

struct DeskRecipe {
  LabeledDataset train;
  LabeledDataset test;   // attack pool
  TrainedEntry victim;
  std::vector<TrainedEntry> surrogates;
};

struct DeskRecipeOptions {
  std::uint64_t data_seed = 2021;
  std::size_t size = 16;
  std::size_t channels = 3;
  std::size_t classes = 10;
  std::size_t per_class = 100;
  double test_fraction = 0.3;
  MinimageOptions image{0.08, 0.16};  // noise, contrast
  std::size_t epochs = 8;
};

// Victim "conv-a"; surrogates "conv-b" and "mlp", each trained with its own
// seed on the same training split.
DeskRecipe build_desk_recipe(const DeskRecipeOptions& opts = {});

struct LinearRecipe {
  LabeledDataset train;
  LabeledDataset test;
  std::shared_ptr<Network> model;
  TrainReport report;
};

// Two-class blobs in D = 1000 (nu = 1) with a trained linear classifier.
LinearRecipe build_linear_recipe();

// Linear victim/surrogate pair whose surrogate margin gradient is orthogonal
// to everything the victim responds to, while another surrogate logit is
// aligned with the victim's margin. D = 4, C = 3.
struct OrthogonalPair {
  std::shared_ptr<Network> victim;
  std::shared_ptr<Network> surrogate;
  std::vector<Vector> inputs;  // correctly classified starting points
};

OrthogonalPair build_orthogonal_pair(std::size_t count = 20, std::uint64_t seed = 7);

// Linear network f(x) = W x + b with W given row-major (C x D).
std::shared_ptr<Network> make_linear(std::size_t dim, std::size_t classes, Vector weights, Vector bias);

}  // namespace gfcs
