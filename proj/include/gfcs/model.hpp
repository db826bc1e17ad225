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
#include <memory>
#include <string>
#include <vector>

#include "gfcs/numerics.hpp"

namespace gfcs {

struct LabeledDataset;

enum class LayerKind { Affine, Conv, Relu, AvgPool, Flatten };

// One layer of a feed-forward classifier. Fields that do not apply to a kind
// are zero.
//   Affine:  out = output width
//   Conv:    out = output channels, kernel x kernel window, stride, zero padding
//   AvgPool: kernel = non-overlapping window size (remainder rows/cols dropped)
struct LayerSpec {
  LayerKind kind = LayerKind::Relu;
  std::size_t out = 0;
  std::size_t kernel = 0;
  std::size_t stride = 0;
  std::size_t padding = 0;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct Architecture {
  Shape input;
  std::vector<LayerSpec> layers;

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

// Parses a comma separated layer list such as
//   "conv:8:3:1:1,relu,pool:2,flatten,affine"
// Tokens: conv:OUT:K[:STRIDE[:PAD]], relu, pool:K, flatten, affine[:OUT].
// An affine token without OUT takes `classes` outputs. Named presets
// ("linear", "mlp", "conv-a", "conv-b", "conv-c") expand to fixed lists.
Architecture parse_architecture(const std::string& text, Shape input, std::size_t classes);
std::string format_layers(const std::vector<LayerSpec>& layers);

// A differentiable classifier R^D -> R^C.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;

  virtual Shape input_shape() const = 0;
  virtual std::size_t num_classes() const = 0;
  std::size_t input_dim() const { return input_shape().size(); }

  // Pre-softmax class scores.
  virtual Vector forward(ConstSpan x) const = 0;

  // Gradient with respect to x of w^T f(x). ReLU'(0) is taken as 0.
  virtual Vector weighted_input_gradient(ConstSpan x, ConstSpan w) const = 0;

 protected:
  void check_input(ConstSpan x) const;
  void check_weights(ConstSpan w) const;
};

using ModelPtr = std::shared_ptr<const ScoreModel>;

struct LayerParams {
  Vector weight;
  Vector bias;
};

// Feed-forward network over the supported layer set.
class Network final : public ScoreModel {
 public:
  // Parameters initialised He-uniform (bound sqrt(6 / fan_in)) from `seed`;
  // biases start at zero.
  Network(Architecture arch, std::size_t classes, std::uint64_t seed);
  // Explicit parameters, one entry per layer (empty for parameterless layers).
  Network(Architecture arch, std::size_t classes, std::uint64_t seed,
          std::vector<LayerParams> params);

  Shape input_shape() const override { return arch_.input; }
  std::size_t num_classes() const override { return classes_; }
  Vector forward(ConstSpan x) const override;
  Vector weighted_input_gradient(ConstSpan x, ConstSpan w) const override;

  const Architecture& architecture() const { return arch_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<LayerParams>& params() const { return params_; }
  std::vector<LayerParams>& mutable_params() { return params_; }
  // Output shape of each layer.
  const std::vector<Shape>& shapes() const { return shapes_; }

  // Activations of every layer for one input; element 0 is the input.
  std::vector<Vector> forward_trace(ConstSpan x) const;
  // Backpropagates `grad_out` through a recorded trace. Returns the input
  // gradient; accumulates parameter gradients into `grads` when non-null.
  Vector backward(const std::vector<Vector>& trace, ConstSpan grad_out,
                  std::vector<LayerParams>* grads) const;

 private:
  void validate();

  Architecture arch_;
  std::size_t classes_;
  std::uint64_t seed_;
  std::vector<LayerParams> params_;
  std::vector<Shape> shapes_;
};

// Wraps `surrogate` so it accepts inputs of shape `victim_input`, via a
// bilinear resize to the surrogate's native resolution in front of it. The
// input gradient is mapped back with the resize adjoint. Returns `surrogate`
// itself when the shapes already match.
ModelPtr adapt_domain(ModelPtr surrogate, Shape victim_input);

// ---- training --------------------------------------------------------------

struct TrainSpec {
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
};

struct TrainReport {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double final_loss = 0.0;
};

struct TrainedModel {
  std::shared_ptr<Network> model;
  TrainReport report;
};

// Minibatch SGD with momentum on mean softmax cross-entropy. Deterministic
// given spec.seed. `test` may be empty, in which case test_accuracy is 0.
TrainedModel train_classifier(const LabeledDataset& train, const LabeledDataset& test,
                              const Architecture& arch, const TrainSpec& spec);

double accuracy(const ScoreModel& model, const LabeledDataset& data);

// ---- persistence -----------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

std::vector<std::uint8_t> serialize_model(const Network& model);
std::shared_ptr<Network> deserialize_model(std::span<const std::uint8_t> bytes);
void save_model(const Network& model, const std::string& path);
std::shared_ptr<Network> load_model(const std::string& path);

}  // namespace gfcs
