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

#include "gfcs/recipes.hpp"

#include "gfcs/random.hpp"

namespace gfcs {

std::shared_ptr<Network> make_linear(std::size_t dim, std::size_t classes, Vector weights, Vector bias) {
  Architecture arch{flat_shape(dim), {LayerSpec{LayerKind::Affine, classes, 0, 0, 0}}};
  std::vector<LayerParams> params{{std::move(weights), std::move(bias)}};
  return std::make_shared<Network>(std::move(arch), classes, 0, std::move(params));
}

DeskRecipe build_desk_recipe(const DeskRecipeOptions& opts) {
  DeskRecipe r;
  const LabeledDataset all = gen_minimages(opts.data_seed, opts.size, opts.size, opts.channels,
                                           opts.classes, opts.per_class, opts.image);
  std::tie(r.train, r.test) = split_dataset(all, opts.test_fraction, opts.data_seed + 1);
  const Shape shape = all.meta.shape;

  auto train = [&](std::string name, std::string arch, std::uint64_t seed) {
    TrainSpec spec;
    spec.seed = seed;
    spec.epochs = opts.epochs;
    spec.learning_rate = 0.02;
    spec.momentum = 0.9;
    spec.batch_size = 16;
    auto trained = train_classifier(r.train, r.test, parse_architecture(arch, shape, opts.classes), spec);
    return TrainedEntry{std::move(name), std::move(arch), trained.model, trained.report};
  };
  r.victim = train("victim", "conv-a", 11);
  r.surrogates.push_back(train("surrogate-conv", "conv-b", 23));
  r.surrogates.push_back(train("surrogate-mlp", "mlp", 37));
  return r;
}

LinearRecipe build_linear_recipe() {
  LinearRecipe r;
  const LabeledDataset all = gen_blobs(404, 1000, 2, 150, 0.05);
  std::tie(r.train, r.test) = split_dataset(all, 0.5, 405);
  TrainSpec spec;
  spec.seed = 406;
  spec.epochs = 20;
  spec.learning_rate = 0.1;
  spec.batch_size = 10;
  auto trained = train_classifier(r.train, r.test, parse_architecture("linear", all.meta.shape, 2), spec);
  r.model = trained.model;
  r.report = trained.report;
  return r;
}

OrthogonalPair build_orthogonal_pair(std::size_t count, std::uint64_t seed) {
  OrthogonalPair p;
  // Victim scores: (x0, x1, -10). Its margin moves only along (-1, 1, 0, 0).
  p.victim = make_linear(4, 3,
                         {1, 0, 0, 0,  //
                          0, 1, 0, 0,  //
                          0, 0, 0, 0},
                         {0, 0, -10});
  // Surrogate scores: (x3, x2, x1 - x0). Its class-1-minus-class-0 gradient
  // is (0, 0, 1, -1); the third logit carries the victim's direction.
  p.surrogate = make_linear(4, 3,
                            {0, 0, 0, 1,  //
                             0, 0, 1, 0,  //
                             -1, 1, 0, 0},
                            {0, 0, 0});
  RandomStream rng(seed);
  for (std::size_t i = 0; i < count; ++i)
    p.inputs.push_back({rng.uniform(0.6, 1.0), rng.uniform(-0.2, 0.2), rng.uniform(-1, 1), rng.uniform(-1, 1)});
  return p;
}

}  // namespace gfcs
