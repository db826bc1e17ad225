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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "gfcs/data.hpp"
#include "gfcs/model.hpp"
#include "gfcs/random.hpp"
#include "oracles.hpp"

using namespace gfcs;

namespace {

Vector random_vector(RandomStream& rng, std::size_t n, double lo = -1, double hi = 1) {
  Vector v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

// Layer-by-layer forward pass written from the documented tensor layouts:
// inputs are HWC, conv weights [out][ky][kx][in], affine weights [out][in].
Vector naive_forward(const Network& net, Vector x) {
  Shape s = net.architecture().input;
  const auto& layers = net.architecture().layers;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    const LayerSpec& l = layers[li];
    const LayerParams& p = net.params()[li];
    if (l.kind == LayerKind::Relu) {
      for (double& v : x) v = v > 0 ? v : 0;
    } else if (l.kind == LayerKind::Flatten) {
      s = Shape{1, 1, s.size()};
    } else if (l.kind == LayerKind::Affine) {
      const std::size_t in = s.size();
      Vector y(l.out);
      for (std::size_t o = 0; o < l.out; ++o) {
        y[o] = p.bias[o];
        for (std::size_t i = 0; i < in; ++i) y[o] += p.weight[o * in + i] * x[i];
      }
      x = y;
      s = Shape{1, 1, l.out};
    } else if (l.kind == LayerKind::AvgPool) {
      const std::size_t k = l.kernel, oh = s.height / k, ow = s.width / k;
      Vector y(oh * ow * s.channels, 0.0);
      for (std::size_t r = 0; r < oh; ++r)
        for (std::size_t c = 0; c < ow; ++c)
          for (std::size_t ch = 0; ch < s.channels; ++ch) {
            double acc = 0;
            for (std::size_t dy = 0; dy < k; ++dy)
              for (std::size_t dx = 0; dx < k; ++dx) acc += x[((r * k + dy) * s.width + c * k + dx) * s.channels + ch];
            y[(r * ow + c) * s.channels + ch] = acc / static_cast<double>(k * k);
          }
      x = y;
      s = Shape{oh, ow, s.channels};
    } else {
      const long K = static_cast<long>(l.kernel), S = static_cast<long>(l.stride), P = static_cast<long>(l.padding);
      const long H = static_cast<long>(s.height), W = static_cast<long>(s.width), Ci = static_cast<long>(s.channels);
      const long oh = (H + 2 * P - K) / S + 1, ow = (W + 2 * P - K) / S + 1;
      Vector y(static_cast<std::size_t>(oh * ow) * l.out);
      for (long r = 0; r < oh; ++r)
        for (long c = 0; c < ow; ++c)
          for (std::size_t co = 0; co < l.out; ++co) {
            double acc = p.bias[co];
            for (long ky = 0; ky < K; ++ky)
              for (long kx = 0; kx < K; ++kx)
                for (long ci = 0; ci < Ci; ++ci) {
                  const long iy = r * S + ky - P, ix = c * S + kx - P;
                  if (iy < 0 || ix < 0 || iy >= H || ix >= W) continue;
                  acc += p.weight[((co * K + ky) * K + kx) * Ci + ci] * x[(iy * W + ix) * Ci + ci];
                }
            y[(r * ow + c) * l.out + co] = acc;
          }
      x = y;
      s = Shape{static_cast<std::size_t>(oh), static_cast<std::size_t>(ow), l.out};
    }
  }
  return x;
}

const std::vector<std::string> kPresets{"linear", "mlp", "conv-a", "conv-b", "conv-c"};

}  // namespace

TEST_CASE("architecture parsing") {
  const Shape in{8, 8, 3};
  const Architecture a = parse_architecture("conv:4:3:2:1,relu,pool:2,flatten,affine:7,affine", in, 5);
  REQUIRE(a.layers.size() == 6);
  CHECK(a.layers[0].kind == LayerKind::Conv);
  CHECK(a.layers[0].out == 4);
  CHECK(a.layers[0].stride == 2);
  CHECK(a.layers[0].padding == 1);
  CHECK(a.layers[4].out == 7);
  CHECK(a.layers[5].out == 5);
  CHECK(parse_architecture(format_layers(a.layers), in, 5) == a);
  for (const auto& p : kPresets) CHECK_NOTHROW(Network(parse_architecture(p, in, 5), 5, 1));
  CHECK_THROWS_AS(parse_architecture("conv:4", in, 5), Error);
  CHECK_THROWS_AS(parse_architecture("warp:3", in, 5), Error);
  CHECK_THROWS_AS(parse_architecture("", in, 5), Error);
  // Affine on an unflattened image and a final width that is not C.
  CHECK_THROWS_AS(Network(parse_architecture("affine", in, 5), 5, 1), Error);
  CHECK_THROWS_AS(Network(parse_architecture("flatten,affine:3", in, 5), 5, 1), Error);
}

TEST_CASE("forward pass matches a naive implementation") {
  RandomStream rng(3);
  const Shape in{9, 7, 2};
  for (const std::string arch : {"linear", "mlp", "conv-a", "conv-b", "conv-c", "conv:3:3:2:0,relu,pool:3,flatten,affine"}) {
    Network net(parse_architecture(arch, in, 4), 4, 17);
    for (auto& p : net.mutable_params())
      for (double& b : p.bias) b = rng.uniform(-0.5, 0.5);
    for (int t = 0; t < 3; ++t) {
      const Vector x = random_vector(rng, in.size(), 0, 1);
      const Vector got = net.forward(x), want = naive_forward(net, x);
      REQUIRE(got.size() == 4);
      for (std::size_t c = 0; c < 4; ++c) CHECK(got[c] == doctest::Approx(want[c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("He-uniform initialisation") {
  Network net(parse_architecture("mlp", Shape{4, 4, 3}, 6), 6, 5);
  const auto& w = net.params()[1].weight;
  const double bound = std::sqrt(6.0 / 48.0);
  double sum2 = 0;
  for (double v : w) {
    REQUIRE(std::abs(v) <= bound);
    sum2 += v * v;
  }
  CHECK(sum2 / static_cast<double>(w.size()) == doctest::Approx(bound * bound / 3).epsilon(0.1));
  for (double b : net.params()[1].bias) CHECK(b == 0.0);
  Network same(parse_architecture("mlp", Shape{4, 4, 3}, 6), 6, 5);
  CHECK(same.params()[1].weight == w);
}

TEST_CASE("input gradients match central differences") {
  RandomStream rng(4);
  const Shape in{8, 8, 2};
  for (const auto& arch : kPresets) {
    Network net(parse_architecture(arch, in, 4), 4, 29);
    for (int t = 0; t < 5; ++t) {
      const Vector x = random_vector(rng, in.size(), 0, 1);
      const Vector w = random_vector(rng, 4);
      const Vector g = net.weighted_input_gradient(x, w);
      const Vector fd = oracle::central_difference(
          [&](const Vector& z) { return dot(net.forward(z), w); }, x, 1e-5);
      CHECK_MESSAGE(oracle::rel_error(g, fd) <= 1e-6, arch);
    }
  }
}

TEST_CASE("adapted surrogate composes the resize") {
  RandomStream rng(6);
  auto inner = std::make_shared<Network>(parse_architecture("conv-b", Shape{8, 8, 3}, 5), 5, 3);
  const Shape outer{12, 10, 3};
  const ModelPtr m = adapt_domain(inner, outer);
  CHECK(m->input_shape() == outer);
  CHECK(adapt_domain(inner, Shape{8, 8, 3}) == inner);
  CHECK_THROWS_AS(adapt_domain(inner, Shape{8, 8, 1}), Error);
  for (int t = 0; t < 3; ++t) {
    const Vector x = random_vector(rng, outer.size(), 0, 1);
    const Vector w = random_vector(rng, 5);
    Vector resized(8 * 8 * 3);
    for (std::size_t r = 0; r < 8; ++r)
      for (std::size_t c = 0; c < 8; ++c)
        for (std::size_t k = 0; k < 3; ++k)
          resized[(r * 8 + c) * 3 + k] = oracle::bilinear_pixel(x, 12, 10, 3, 8, 8, r, c, k);
    const Vector f = m->forward(x), ref = inner->forward(resized);
    for (std::size_t c = 0; c < 5; ++c) CHECK(f[c] == doctest::Approx(ref[c]).epsilon(1e-12));
    const Vector fd =
        oracle::central_difference([&](const Vector& z) { return dot(m->forward(z), w); }, x, 1e-5);
    CHECK(oracle::rel_error(m->weighted_input_gradient(x, w), fd) <= 1e-6);
  }
}

TEST_CASE("input validation") {
  Network net(parse_architecture("linear", flat_shape(3), 2), 2, 1);
  CHECK_THROWS_AS(net.forward(Vector{1, 2}), Error);
  CHECK_THROWS_AS(net.forward(Vector{1, NAN, 2}), Error);
  CHECK_THROWS_AS(net.weighted_input_gradient(Vector{1, 2, 3}, Vector{1}), Error);
}

TEST_CASE("training separates blobs") {
  const LabeledDataset all = gen_blobs(8, 20, 3, 100, 0.1);
  auto [train, test] = split_dataset(all, 0.3, 9);
  TrainSpec spec;
  spec.epochs = 15;
  spec.learning_rate = 0.1;
  const TrainedModel m = train_classifier(train, test, parse_architecture("linear", all.meta.shape, 3), spec);
  CHECK(m.report.test_accuracy >= 0.99);
  CHECK(m.report.train_accuracy >= 0.99);
  CHECK(accuracy(*m.model, test) == doctest::Approx(m.report.test_accuracy));
  const TrainedModel again = train_classifier(train, test, parse_architecture("linear", all.meta.shape, 3), spec);
  CHECK(again.model->params().back().weight == m.model->params().back().weight);
  CHECK_FALSE(m.model->params().back().weight.empty());
}

TEST_CASE("diverging training is reported") {
  const LabeledDataset all = gen_blobs(8, 20, 3, 30, 0.1);
  TrainSpec spec;
  spec.learning_rate = 1e300;
  spec.epochs = 3;
  try {
    train_classifier(all, {}, parse_architecture("mlp", all.meta.shape, 3), spec);
    FAIL("expected a training failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TrainingFailure);
  }
}

TEST_CASE("model files round-trip and reject damage") {
  const auto dir = std::filesystem::temp_directory_path() / "gfcs_model_test";
  std::filesystem::create_directories(dir);
  Network net(parse_architecture("conv-a", Shape{8, 8, 3}, 4), 4, 77);
  const auto bytes = serialize_model(net);
  const auto back = deserialize_model(bytes);
  CHECK(back->architecture() == net.architecture());
  CHECK(back->seed() == 77);
  for (std::size_t i = 0; i < net.params().size(); ++i) {
    CHECK(back->params()[i].weight == net.params()[i].weight);
    CHECK(back->params()[i].bias == net.params()[i].bias);
  }
  const std::string path = (dir / "m.bin").string();
  save_model(net, path);
  CHECK(serialize_model(*load_model(path)) == bytes);

  auto code_of = [](const std::vector<std::uint8_t>& b) {
    try {
      deserialize_model(b);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Internal;
  };
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK(code_of(bad_magic) == ErrorCode::Parse);
  auto truncated = bytes;
  truncated.resize(bytes.size() - 5);
  CHECK(code_of(truncated) == ErrorCode::Parse);
  try {
    deserialize_model(truncated);
  } catch (const ParseError& e) {
    CHECK(e.offset() > 16);
    CHECK(std::string(e.what()).find("offset") != std::string::npos);
  }
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK(code_of(trailing) == ErrorCode::Parse);
  std::string text(bytes.begin(), bytes.end());
  const auto pos = text.find("\"version\":1");
  REQUIRE(pos != std::string::npos);
  auto future = bytes;
  future[pos + 10] = '2';
  CHECK(code_of(future) == ErrorCode::UnsupportedVersion);
  try {
    load_model((dir / "missing.bin").string());
    FAIL("expected an I/O error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
  std::filesystem::remove_all(dir);
}
