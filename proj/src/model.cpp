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

#include "gfcs/model.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "gfcs/data.hpp"
#include "gfcs/random.hpp"

namespace gfcs {

// ---- architecture text -----------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::size_t parse_count(const std::string& token, const std::string& field) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(token, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != token.size())
    fail(ErrorCode::InvalidInput, "architecture: bad number '" + token + "' in " + field);
  return static_cast<std::size_t>(v);
}

const std::map<std::string, std::string>& presets() {
  static const std::map<std::string, std::string> table = {
      {"linear", "flatten,affine"},
      {"mlp", "flatten,affine:64,relu,affine"},
      {"conv-a", "conv:8:3:1:1,relu,pool:2,conv:16:3:1:1,relu,pool:2,flatten,affine"},
      {"conv-b", "conv:12:5:2:2,relu,flatten,affine:32,relu,affine"},
      {"conv-c", "pool:2,conv:16:3:1:1,relu,pool:2,flatten,affine"},
  };
  return table;
}

}  // namespace

Architecture parse_architecture(const std::string& text, Shape input, std::size_t classes) {
  std::string body = trim(text);
  if (auto it = presets().find(body); it != presets().end()) body = it->second;
  require(!body.empty(), "architecture: empty layer list");

  Architecture arch;
  arch.input = input;
  for (const std::string& raw : split(body, ',')) {
    const auto fields = split(trim(raw), ':');
    const std::string& name = fields.empty() ? std::string() : fields[0];
    LayerSpec spec;
    if (name == "relu" && fields.size() == 1) {
      spec.kind = LayerKind::Relu;
    } else if (name == "flatten" && fields.size() == 1) {
      spec.kind = LayerKind::Flatten;
    } else if (name == "pool" && fields.size() == 2) {
      spec.kind = LayerKind::AvgPool;
      spec.kernel = parse_count(fields[1], raw);
    } else if (name == "affine" && fields.size() <= 2) {
      spec.kind = LayerKind::Affine;
      spec.out = fields.size() == 2 ? parse_count(fields[1], raw) : classes;
    } else if (name == "conv" && fields.size() >= 3 && fields.size() <= 5) {
      spec.kind = LayerKind::Conv;
      spec.out = parse_count(fields[1], raw);
      spec.kernel = parse_count(fields[2], raw);
      spec.stride = fields.size() >= 4 ? parse_count(fields[3], raw) : 1;
      spec.padding = fields.size() == 5 ? parse_count(fields[4], raw) : 0;
    } else {
      fail(ErrorCode::InvalidInput, "architecture: unknown layer token '" + raw + "'");
    }
    arch.layers.push_back(spec);
  }
  return arch;
}

std::string format_layers(const std::vector<LayerSpec>& layers) {
  std::ostringstream out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) out << ',';
    const LayerSpec& l = layers[i];
    switch (l.kind) {
      case LayerKind::Relu: out << "relu"; break;
      case LayerKind::Flatten: out << "flatten"; break;
      case LayerKind::AvgPool: out << "pool:" << l.kernel; break;
      case LayerKind::Affine: out << "affine:" << l.out; break;
      case LayerKind::Conv:
        out << "conv:" << l.out << ':' << l.kernel << ':' << l.stride << ':' << l.padding;
        break;
    }
  }
  return out.str();
}

// ---- ScoreModel ------------------------------------------------------------

void ScoreModel::check_input(ConstSpan x) const {
  if (x.size() != input_dim())
    fail(ErrorCode::InvalidInput, "model input has length " + std::to_string(x.size()) +
                                      ", expected " + std::to_string(input_dim()));
  require_finite(x, "model input");
}

void ScoreModel::check_weights(ConstSpan w) const {
  if (w.size() != num_classes())
    fail(ErrorCode::InvalidInput, "class weight vector has length " + std::to_string(w.size()) +
                                      ", expected " + std::to_string(num_classes()));
  require_finite(w, "class weights");
}

// ---- Network ---------------------------------------------------------------

namespace {

std::size_t param_count(const LayerSpec& l, Shape in, bool bias) {
  switch (l.kind) {
    case LayerKind::Affine: return bias ? l.out : l.out * in.size();
    case LayerKind::Conv: return bias ? l.out : l.out * l.kernel * l.kernel * in.channels;
    default: return 0;
  }
}

std::size_t fan_in(const LayerSpec& l, Shape in) {
  return l.kind == LayerKind::Affine ? in.size() : l.kernel * l.kernel * in.channels;
}

}  // namespace

Network::Network(Architecture arch, std::size_t classes, std::uint64_t seed)
    : arch_(std::move(arch)), classes_(classes), seed_(seed) {
  params_.resize(arch_.layers.size());
  validate();
  RandomStream init(mix_seed(seed, 0x1417));
  Shape in = arch_.input;
  for (std::size_t i = 0; i < arch_.layers.size(); ++i) {
    const LayerSpec& l = arch_.layers[i];
    if (l.kind == LayerKind::Affine || l.kind == LayerKind::Conv) {
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in(l, in)));
      for (double& w : params_[i].weight) w = init.uniform(-bound, bound);
    }
    in = shapes_[i];
  }
}

Network::Network(Architecture arch, std::size_t classes, std::uint64_t seed,
                 std::vector<LayerParams> params)
    : arch_(std::move(arch)), classes_(classes), seed_(seed), params_(std::move(params)) {
  require(params_.size() == arch_.layers.size(), "network: need one parameter entry per layer");
  for (const auto& p : params_) {
    require_finite(p.weight, "network weights");
    require_finite(p.bias, "network biases");
  }
  validate();
}

void Network::validate() {
  require(arch_.input.size() > 0, "network: empty input shape");
  require(classes_ >= 1, "network: need at least one class");
  require(!arch_.layers.empty(), "network: no layers");
  shapes_.clear();
  Shape in = arch_.input;
  for (std::size_t i = 0; i < arch_.layers.size(); ++i) {
    const LayerSpec& l = arch_.layers[i];
    Shape out = in;
    switch (l.kind) {
      case LayerKind::Affine:
        require(in.is_flat(), "network: affine layer needs a flat input (insert 'flatten')");
        require(l.out >= 1, "network: affine layer needs at least one output");
        out = flat_shape(l.out);
        break;
      case LayerKind::Conv: {
        require(l.out >= 1 && l.kernel >= 1 && l.stride >= 1, "network: bad conv parameters");
        require(in.height + 2 * l.padding >= l.kernel && in.width + 2 * l.padding >= l.kernel,
                "network: conv kernel larger than padded input");
        out = Shape{(in.height + 2 * l.padding - l.kernel) / l.stride + 1,
                    (in.width + 2 * l.padding - l.kernel) / l.stride + 1, l.out};
        break;
      }
      case LayerKind::AvgPool:
        require(l.kernel >= 1 && in.height >= l.kernel && in.width >= l.kernel,
                "network: bad pooling window");
        out = Shape{in.height / l.kernel, in.width / l.kernel, in.channels};
        break;
      case LayerKind::Flatten: out = flat_shape(in.size()); break;
      case LayerKind::Relu: break;
    }
    auto& p = params_[i];
    const std::size_t nw = param_count(l, in, false);
    const std::size_t nb = param_count(l, in, true);
    if (p.weight.empty() && p.bias.empty()) {
      p.weight.assign(nw, 0.0);
      p.bias.assign(nb, 0.0);
    }
    require(p.weight.size() == nw && p.bias.size() == nb,
            "network: parameter block size mismatch at layer " + std::to_string(i));
    shapes_.push_back(out);
    in = out;
  }
  require(in.is_flat() && in.size() == classes_,
          "network: final layer must produce " + std::to_string(classes_) + " flat outputs");
}

namespace {

void affine_forward(const LayerParams& p, std::size_t n_out, ConstSpan x, MutSpan y) {
  const std::size_t n_in = x.size();
  for (std::size_t o = 0; o < n_out; ++o) {
    const double* row = p.weight.data() + o * n_in;
    double acc = p.bias[o];
    for (std::size_t i = 0; i < n_in; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
}

void conv_forward(const LayerSpec& l, const LayerParams& p, Shape in, Shape out, ConstSpan x,
                  MutSpan y) {
  const std::size_t K = l.kernel;
  const std::size_t cin = in.channels;
  for (std::size_t oy = 0; oy < out.height; ++oy) {
    for (std::size_t ox = 0; ox < out.width; ++ox) {
      for (std::size_t co = 0; co < out.channels; ++co) {
        double acc = p.bias[co];
        for (std::size_t ky = 0; ky < K; ++ky) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * l.stride + ky) -
                                    static_cast<std::ptrdiff_t>(l.padding);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in.height)) continue;
          for (std::size_t kx = 0; kx < K; ++kx) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * l.stride + kx) -
                                      static_cast<std::ptrdiff_t>(l.padding);
            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(in.width)) continue;
            const double* w = p.weight.data() + ((co * K + ky) * K + kx) * cin;
            const double* xv = x.data() + in.index(static_cast<std::size_t>(iy),
                                                   static_cast<std::size_t>(ix), 0);
            for (std::size_t ci = 0; ci < cin; ++ci) acc += w[ci] * xv[ci];
          }
        }
        y[out.index(oy, ox, co)] = acc;
      }
    }
  }
}

void conv_backward(const LayerSpec& l, const LayerParams& p, Shape in, Shape out, ConstSpan x,
                   ConstSpan gy, MutSpan gx, LayerParams* gp) {
  const std::size_t K = l.kernel;
  const std::size_t cin = in.channels;
  for (std::size_t oy = 0; oy < out.height; ++oy) {
    for (std::size_t ox = 0; ox < out.width; ++ox) {
      for (std::size_t co = 0; co < out.channels; ++co) {
        const double g = gy[out.index(oy, ox, co)];
        if (g == 0.0) continue;
        if (gp) gp->bias[co] += g;
        for (std::size_t ky = 0; ky < K; ++ky) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * l.stride + ky) -
                                    static_cast<std::ptrdiff_t>(l.padding);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in.height)) continue;
          for (std::size_t kx = 0; kx < K; ++kx) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * l.stride + kx) -
                                      static_cast<std::ptrdiff_t>(l.padding);
            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(in.width)) continue;
            const std::size_t woff = ((co * K + ky) * K + kx) * cin;
            const std::size_t xoff =
                in.index(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix), 0);
            for (std::size_t ci = 0; ci < cin; ++ci) {
              gx[xoff + ci] += g * p.weight[woff + ci];
              if (gp) gp->weight[woff + ci] += g * x[xoff + ci];
            }
          }
        }
      }
    }
  }
}

void pool_forward(std::size_t k, Shape in, Shape out, ConstSpan x, MutSpan y) {
  const double inv = 1.0 / static_cast<double>(k * k);
  for (std::size_t oy = 0; oy < out.height; ++oy)
    for (std::size_t ox = 0; ox < out.width; ++ox)
      for (std::size_t c = 0; c < out.channels; ++c) {
        double acc = 0.0;
        for (std::size_t dy = 0; dy < k; ++dy)
          for (std::size_t dx = 0; dx < k; ++dx) acc += x[in.index(oy * k + dy, ox * k + dx, c)];
        y[out.index(oy, ox, c)] = acc * inv;
      }
}

void pool_backward(std::size_t k, Shape in, Shape out, ConstSpan gy, MutSpan gx) {
  const double inv = 1.0 / static_cast<double>(k * k);
  for (std::size_t oy = 0; oy < out.height; ++oy)
    for (std::size_t ox = 0; ox < out.width; ++ox)
      for (std::size_t c = 0; c < out.channels; ++c) {
        const double g = gy[out.index(oy, ox, c)] * inv;
        for (std::size_t dy = 0; dy < k; ++dy)
          for (std::size_t dx = 0; dx < k; ++dx) gx[in.index(oy * k + dy, ox * k + dx, c)] += g;
      }
}

}  // namespace

std::vector<Vector> Network::forward_trace(ConstSpan x) const {
  check_input(x);
  std::vector<Vector> trace;
  trace.reserve(arch_.layers.size() + 1);
  trace.emplace_back(x.begin(), x.end());
  Shape in = arch_.input;
  for (std::size_t i = 0; i < arch_.layers.size(); ++i) {
    const LayerSpec& l = arch_.layers[i];
    const Shape out = shapes_[i];
    const Vector& xi = trace.back();
    Vector y(out.size());
    switch (l.kind) {
      case LayerKind::Affine: affine_forward(params_[i], l.out, xi, y); break;
      case LayerKind::Conv: conv_forward(l, params_[i], in, out, xi, y); break;
      case LayerKind::AvgPool: pool_forward(l.kernel, in, out, xi, y); break;
      case LayerKind::Relu:
        for (std::size_t j = 0; j < y.size(); ++j) y[j] = xi[j] > 0.0 ? xi[j] : 0.0;
        break;
      case LayerKind::Flatten: y = xi; break;
    }
    trace.push_back(std::move(y));
    in = out;
  }
  return trace;
}

Vector Network::backward(const std::vector<Vector>& trace, ConstSpan grad_out,
                         std::vector<LayerParams>* grads) const {
  require(trace.size() == arch_.layers.size() + 1, "network: trace does not match architecture");
  require(grad_out.size() == classes_, "network: output gradient has wrong length");
  Vector g(grad_out.begin(), grad_out.end());
  for (std::size_t i = arch_.layers.size(); i-- > 0;) {
    const LayerSpec& l = arch_.layers[i];
    const Shape in = i == 0 ? arch_.input : shapes_[i - 1];
    const Shape out = shapes_[i];
    const Vector& x = trace[i];
    LayerParams* gp = grads ? &(*grads)[i] : nullptr;
    Vector gx(in.size(), 0.0);
    switch (l.kind) {
      case LayerKind::Affine: {
        const std::size_t n_in = in.size();
        for (std::size_t o = 0; o < l.out; ++o) {
          const double go = g[o];
          if (go == 0.0) continue;
          const double* row = params_[i].weight.data() + o * n_in;
          for (std::size_t j = 0; j < n_in; ++j) gx[j] += go * row[j];
          if (gp) {
            gp->bias[o] += go;
            double* grow = gp->weight.data() + o * n_in;
            for (std::size_t j = 0; j < n_in; ++j) grow[j] += go * x[j];
          }
        }
        break;
      }
      case LayerKind::Conv: conv_backward(l, params_[i], in, out, x, g, gx, gp); break;
      case LayerKind::AvgPool: pool_backward(l.kernel, in, out, g, gx); break;
      case LayerKind::Relu:
        for (std::size_t j = 0; j < gx.size(); ++j) gx[j] = x[j] > 0.0 ? g[j] : 0.0;
        break;
      case LayerKind::Flatten: gx = g; break;
    }
    g = std::move(gx);
  }
  return g;
}

Vector Network::forward(ConstSpan x) const { return forward_trace(x).back(); }

Vector Network::weighted_input_gradient(ConstSpan x, ConstSpan w) const {
  check_weights(w);
  return backward(forward_trace(x), w, nullptr);
}

// ---- domain adapter --------------------------------------------------------

namespace {

class ResizedModel final : public ScoreModel {
 public:
  ResizedModel(ModelPtr inner, Shape outer) : inner_(std::move(inner)), outer_(outer) {}

  Shape input_shape() const override { return outer_; }
  std::size_t num_classes() const override { return inner_->num_classes(); }

  Vector forward(ConstSpan x) const override {
    check_input(x);
    return inner_->forward(resize(x).values);
  }

  Vector weighted_input_gradient(ConstSpan x, ConstSpan w) const override {
    check_input(x);
    check_weights(w);
    const Shape native = inner_->input_shape();
    Grid g(native, inner_->weighted_input_gradient(resize(x).values, w));
    return bilinear_resize_adjoint(g, outer_).values;
  }

 private:
  Grid resize(ConstSpan x) const {
    const Shape native = inner_->input_shape();
    return bilinear_resize(Grid(outer_, Vector(x.begin(), x.end())), native.height, native.width);
  }

  ModelPtr inner_;
  Shape outer_;
};

}  // namespace

ModelPtr adapt_domain(ModelPtr surrogate, Shape victim_input) {
  require(surrogate != nullptr, "adapt_domain: null surrogate");
  const Shape native = surrogate->input_shape();
  if (native == victim_input) return surrogate;
  if (native.channels != victim_input.channels)
    fail(ErrorCode::InvalidInput, "adapt_domain: surrogate has " + std::to_string(native.channels) +
                                      " channels, victim has " +
                                      std::to_string(victim_input.channels));
  return std::make_shared<ResizedModel>(std::move(surrogate), victim_input);
}

// ---- training --------------------------------------------------------------

double accuracy(const ScoreModel& model, const LabeledDataset& data) {
  if (data.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (static_cast<int>(argmax(model.forward(data.inputs[i]))) == data.labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TrainedModel train_classifier(const LabeledDataset& train, const LabeledDataset& test,
                              const Architecture& arch, const TrainSpec& spec) {
  require(train.size() > 0, "train: empty dataset");
  require(spec.learning_rate > 0.0 && spec.momentum >= 0.0 && spec.batch_size >= 1,
          "train: learning rate and batch size must be positive");
  require(train.meta.shape == arch.input, "train: dataset shape does not match architecture");
  const std::size_t classes = train.meta.classes;
  for (int y : train.labels)
    require(y >= 0 && static_cast<std::size_t>(y) < classes, "train: label out of range");

  auto net = std::make_shared<Network>(arch, classes, spec.seed);
  RandomStream order_stream(mix_seed(spec.seed, 0x5u));
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  auto zero_like = [&](const std::vector<LayerParams>& ps) {
    std::vector<LayerParams> z(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
      z[i].weight.assign(ps[i].weight.size(), 0.0);
      z[i].bias.assign(ps[i].bias.size(), 0.0);
    }
    return z;
  };
  std::vector<LayerParams> velocity = zero_like(net->params());

  double epoch_loss = 0.0;
  for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
    order_stream.shuffle(order);
    epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += spec.batch_size) {
      const std::size_t end = std::min(order.size(), start + spec.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      std::vector<LayerParams> grads = zero_like(net->params());
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t idx = order[b];
        const auto trace = net->forward_trace(train.inputs[idx]);
        const Vector& logits = trace.back();
        const double top = logits[argmax(logits)];
        double denom = 0.0;
        for (double z : logits) denom += std::exp(z - top);
        Vector grad_out(classes);
        for (std::size_t c = 0; c < classes; ++c)
          grad_out[c] = std::exp(logits[c] - top) / denom * inv_batch;
        const auto label = static_cast<std::size_t>(train.labels[idx]);
        grad_out[label] -= inv_batch;
        epoch_loss += -(logits[label] - top - std::log(denom));
        net->backward(trace, grad_out, &grads);
      }
      if (!std::isfinite(epoch_loss))
        fail(ErrorCode::TrainingFailure,
             "train: loss diverged in epoch " + std::to_string(epoch));
      auto& params = net->mutable_params();
      for (std::size_t i = 0; i < params.size(); ++i) {
        auto step = [&](Vector& p, Vector& v, const Vector& g) {
          for (std::size_t j = 0; j < p.size(); ++j) {
            v[j] = spec.momentum * v[j] - spec.learning_rate * g[j];
            p[j] += v[j];
          }
        };
        step(params[i].weight, velocity[i].weight, grads[i].weight);
        step(params[i].bias, velocity[i].bias, grads[i].bias);
      }
    }
    epoch_loss /= static_cast<double>(order.size());
  }
  for (const auto& p : net->params())
    if (!all_finite(p.weight) || !all_finite(p.bias))
      fail(ErrorCode::TrainingFailure, "train: parameters became non-finite");

  TrainedModel out;
  out.model = net;
  out.report.final_loss = epoch_loss;
  out.report.train_accuracy = accuracy(*net, train);
  out.report.test_accuracy = accuracy(*net, test);
  return out;
}

}  // namespace gfcs
