// Copyright 2026 The initlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "initlab/nn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "initlab/error.hpp"
#include "initlab/rng.hpp"

namespace initlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint64_t next_network_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

std::string where(std::size_t index, const LayerSpec& layer) {
  return "layer " + std::to_string(index) + " (" + layer_name(layer) + ")";
}

Shape prepend(std::size_t n, const Shape& s) {
  std::vector<std::size_t> dims{n};
  dims.insert(dims.end(), s.dims().begin(), s.dims().end());
  return Shape(std::move(dims));
}

Shape infer_shape(std::size_t index, const LayerSpec& layer, const Shape& in) {
  auto fail = [&](const std::string& expected) -> Shape {
    throw ShapeMismatch(where(index, layer) + ": expected input " + expected +
                        ", got " + in.str());
  };
  return std::visit(
      Overloaded{
          [&](const Dense& d) -> Shape {
            if (d.in == 0 || d.out == 0) {
              throw InvalidArgument(where(index, layer) + ": zero extent");
            }
            if (in.rank() != 1 || in[0] != d.in) {
              return fail("(" + std::to_string(d.in) + ")");
            }
            return Shape{d.out};
          },
          [&](const Conv2d& c) -> Shape {
            if (c.in_channels == 0 || c.out_channels == 0 || c.kernel_h == 0 ||
                c.kernel_w == 0 || c.stride == 0) {
              throw InvalidArgument(where(index, layer) + ": zero extent");
            }
            if (in.rank() != 3 || in[0] != c.in_channels) {
              return fail("(" + std::to_string(c.in_channels) + ", H, W)");
            }
            try {
              return Shape{c.out_channels,
                           conv_output_extent(in[1], c.kernel_h, c.stride, c.padding),
                           conv_output_extent(in[2], c.kernel_w, c.stride, c.padding)};
            } catch (const ShapeMismatch& e) {
              throw ShapeMismatch(where(index, layer) + ": " + e.what());
            }
          },
          [&](const ReLU&) { return in; },
          [&](const Tanh&) { return in; },
          [&](const Flatten&) { return Shape{in.element_count()}; },
          [&](const MaxPool2d& p) -> Shape {
            if (p.kernel == 0 || p.stride == 0) {
              throw InvalidArgument(where(index, layer) + ": zero extent");
            }
            if (in.rank() != 3 || in[1] < p.kernel || in[2] < p.kernel) {
              return fail("(C, H >= " + std::to_string(p.kernel) +
                          ", W >= " + std::to_string(p.kernel) + ")");
            }
            return Shape{in[0], (in[1] - p.kernel) / p.stride + 1,
                         (in[2] - p.kernel) / p.stride + 1};
          },
      },
      layer);
}

// --- batched layer kernels --------------------------------------------------

Tensor dense_forward(const Tensor& x, const LayerParams& p) {
  const std::size_t n = x.shape()[0];
  const std::size_t in = p.weight.shape()[1], out = p.weight.shape()[0];
  Tensor y(Shape{n, out});
  auto X = x.data();
  auto W = p.weight.data();
  auto B = p.bias.data();
  auto Y = y.data();
  for (std::size_t s = 0; s < n; ++s) {
    const double* xrow = &X[s * in];
    for (std::size_t o = 0; o < out; ++o) {
      const double* wrow = &W[o * in];
      double acc = 0.0;
      for (std::size_t i = 0; i < in; ++i) acc += xrow[i] * wrow[i];
      Y[s * out + o] = acc + B[o];
    }
  }
  return y;
}

void dense_backward(const Tensor& x, const LayerParams& p, const Tensor& dy,
                    LayerParams& grads, Tensor& dx) {
  const std::size_t n = x.shape()[0];
  const std::size_t in = p.weight.shape()[1], out = p.weight.shape()[0];
  grads.weight = Tensor(p.weight.shape());
  grads.bias = Tensor(p.bias.shape());
  dx = Tensor(x.shape());
  auto X = x.data();
  auto W = p.weight.data();
  auto DY = dy.data();
  auto DW = grads.weight.data();
  auto DB = grads.bias.data();
  auto DX = dx.data();
  for (std::size_t s = 0; s < n; ++s) {
    const double* xrow = &X[s * in];
    double* dxrow = &DX[s * in];
    for (std::size_t o = 0; o < out; ++o) {
      const double g = DY[s * out + o];
      const double* wrow = &W[o * in];
      double* dwrow = &DW[o * in];
      DB[o] += g;
      for (std::size_t i = 0; i < in; ++i) {
        dwrow[i] += g * xrow[i];
        dxrow[i] += g * wrow[i];
      }
    }
  }
}

Tensor conv_forward(const Tensor& x, const Conv2d& c, const LayerParams& p) {
  Tensor y = conv2d(x, p.weight, c.stride, c.padding);
  const std::size_t n = y.shape()[0], o = y.shape()[1];
  const std::size_t plane = y.shape()[2] * y.shape()[3];
  auto Y = y.data();
  auto B = p.bias.data();
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t oc = 0; oc < o; ++oc) {
      double* yp = &Y[(s * o + oc) * plane];
      for (std::size_t k = 0; k < plane; ++k) yp[k] += B[oc];
    }
  }
  return y;
}

void conv_backward(const Tensor& x, const Conv2d& c, const LayerParams& p,
                   const Tensor& dy, LayerParams& grads, Tensor& dx) {
  const auto& xs = x.shape();
  const auto& ys = dy.shape();
  const std::size_t n = xs[0], ch = xs[1], h = xs[2], w = xs[3];
  const std::size_t o = ys[1], oh = ys[2], ow = ys[3];
  const std::size_t kh = c.kernel_h, kw = c.kernel_w, stride = c.stride;
  const auto pad = static_cast<std::ptrdiff_t>(c.padding);
  const auto sh = static_cast<std::ptrdiff_t>(h);
  const auto sw = static_cast<std::ptrdiff_t>(w);

  grads.weight = Tensor(p.weight.shape());
  grads.bias = Tensor(p.bias.shape());
  dx = Tensor(xs);
  auto X = x.data();
  auto K = p.weight.data();
  auto DY = dy.data();
  auto DK = grads.weight.data();
  auto DB = grads.bias.data();
  auto DX = dx.data();

  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t oc = 0; oc < o; ++oc) {
      const double* gplane = &DY[(s * o + oc) * oh * ow];
      double bias_acc = 0.0;
      for (std::size_t k = 0; k < oh * ow; ++k) bias_acc += gplane[k];
      DB[oc] += bias_acc;
      for (std::size_t ic = 0; ic < ch; ++ic) {
        const double* xplane = &X[(s * ch + ic) * h * w];
        double* dxplane = &DX[(s * ch + ic) * h * w];
        for (std::size_t ky = 0; ky < kh; ++ky) {
          for (std::size_t kx = 0; kx < kw; ++kx) {
            const std::size_t kidx = ((oc * ch + ic) * kh + ky) * kw + kx;
            const double kv = K[kidx];
            double acc = 0.0;
            for (std::size_t y = 0; y < oh; ++y) {
              const auto iy = static_cast<std::ptrdiff_t>(y * stride + ky) - pad;
              if (iy < 0 || iy >= sh) continue;
              const double* grow = gplane + y * ow;
              for (std::size_t xx = 0; xx < ow; ++xx) {
                const auto ix = static_cast<std::ptrdiff_t>(xx * stride + kx) - pad;
                if (ix < 0 || ix >= sw) continue;
                const auto off = iy * sw + ix;
                acc += grow[xx] * xplane[off];
                dxplane[off] += grow[xx] * kv;
              }
            }
            DK[kidx] += acc;
          }
        }
      }
    }
  }
}

Tensor maxpool_forward(const Tensor& x, const MaxPool2d& p,
                       std::vector<std::size_t>& argmax) {
  const auto& xs = x.shape();
  const std::size_t n = xs[0], ch = xs[1], h = xs[2], w = xs[3];
  const std::size_t oh = (h - p.kernel) / p.stride + 1;
  const std::size_t ow = (w - p.kernel) / p.stride + 1;
  Tensor y(Shape{n, ch, oh, ow});
  argmax.assign(y.size(), 0);
  auto X = x.data();
  auto Y = y.data();
  std::size_t out_idx = 0;
  for (std::size_t plane = 0; plane < n * ch; ++plane) {
    const std::size_t base = plane * h * w;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox, ++out_idx) {
        std::size_t best = base + oy * p.stride * w + ox * p.stride;
        for (std::size_t ky = 0; ky < p.kernel; ++ky) {
          for (std::size_t kx = 0; kx < p.kernel; ++kx) {
            const std::size_t idx =
                base + (oy * p.stride + ky) * w + ox * p.stride + kx;
            if (X[idx] > X[best]) best = idx;
          }
        }
        Y[out_idx] = X[best];
        argmax[out_idx] = best;
      }
    }
  }
  return y;
}

}  // namespace

std::string layer_name(const LayerSpec& layer) {
  return std::visit(
      Overloaded{
          [](const Dense& d) {
            return "dense(" + std::to_string(d.in) + "->" + std::to_string(d.out) + ")";
          },
          [](const Conv2d& c) {
            return "conv(" + std::to_string(c.in_channels) + "->" +
                   std::to_string(c.out_channels) + ", " +
                   std::to_string(c.kernel_h) + "x" + std::to_string(c.kernel_w) +
                   ", stride " + std::to_string(c.stride) + ", pad " +
                   std::to_string(c.padding) + ")";
          },
          [](const ReLU&) { return std::string("relu"); },
          [](const Tanh&) { return std::string("tanh"); },
          [](const Flatten&) { return std::string("flatten"); },
          [](const MaxPool2d& p) {
            return "maxpool(" + std::to_string(p.kernel) + ", stride " +
                   std::to_string(p.stride) + ")";
          },
      },
      layer);
}

// --- Network ----------------------------------------------------------------

Network::Network(Shape input_shape, std::vector<LayerSpec> layers)
    : input_shape_(std::move(input_shape)),
      layers_(std::move(layers)),
      id_(next_network_id()) {
  shapes_.reserve(layers_.size() + 1);
  shapes_.push_back(input_shape_);
  params_.resize(layers_.size());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    shapes_.push_back(infer_shape(i, layers_[i], shapes_.back()));
    if (const auto* d = std::get_if<Dense>(&layers_[i])) {
      params_[i].weight = Tensor(Shape{d->out, d->in});
      params_[i].bias = Tensor(Shape{d->out});
    } else if (const auto* c = std::get_if<Conv2d>(&layers_[i])) {
      params_[i].weight =
          Tensor(Shape{c->out_channels, c->in_channels, c->kernel_h, c->kernel_w});
      params_[i].bias = Tensor(Shape{c->out_channels});
    } else {
      params_[i].trainable = false;
    }
  }
}

Network::Network(const Network& other)
    : input_shape_(other.input_shape_),
      layers_(other.layers_),
      shapes_(other.shapes_),
      params_(other.params_),
      id_(next_network_id()) {}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    input_shape_ = other.input_shape_;
    layers_ = other.layers_;
    shapes_ = other.shapes_;
    params_ = other.params_;
    id_ = next_network_id();
  }
  return *this;
}

// --- forward / backward -----------------------------------------------------

ForwardResult forward(const Network& network, const Tensor& input) {
  ForwardResult result;
  auto& cache = result.cache;
  cache.network_id = network.id();

  const Shape& expected = network.input_shape();
  Tensor x;
  if (input.shape() == expected) {
    cache.batched = false;
    x = input.reshaped(prepend(1, expected));
  } else {
    const auto& dims = input.shape().dims();
    if (dims.size() != expected.rank() + 1 ||
        !std::equal(dims.begin() + 1, dims.end(), expected.dims().begin())) {
      const std::string layer =
          network.size() ? where(0, network.layers()[0]) : std::string("input");
      throw ShapeMismatch(layer + ": expected input " + expected.str() +
                          " or a batch of it, got " + input.shape().str());
    }
    x = input;
  }

  cache.inputs.reserve(network.size());
  cache.pool_argmax.resize(network.size());
  for (std::size_t i = 0; i < network.size(); ++i) {
    const LayerSpec& layer = network.layers()[i];
    const LayerParams& p = network.params()[i];
    if (p.has_params()) {
      const bool ok = std::holds_alternative<Dense>(layer)
                          ? p.weight.shape() == Shape{std::get<Dense>(layer).out,
                                                      std::get<Dense>(layer).in}
                          : p.weight.shape().rank() == 4;
      if (!ok) {
        throw ShapeMismatch(where(i, layer) + ": weight shape " +
                            p.weight.shape().str() + " does not match layer");
      }
    }
    cache.inputs.push_back(x);
    const std::size_t n = x.shape()[0];
    x = std::visit(
        Overloaded{
            [&](const Dense&) { return dense_forward(x, p); },
            [&](const Conv2d& c) { return conv_forward(x, c, p); },
            [&](const ReLU&) { return relu(x); },
            [&](const Tanh&) { return tanh(x); },
            [&](const Flatten&) {
              return x.reshaped(Shape{n, x.size() / n});
            },
            [&](const MaxPool2d& mp) {
              return maxpool_forward(x, mp, cache.pool_argmax[i]);
            },
        },
        layer);
  }
  result.output =
      cache.batched ? std::move(x) : x.reshaped(network.output_shape());
  return result;
}

Tensor predict_logits(const Network& network, const Tensor& input) {
  return forward(network, input).output;
}

Gradients backward(const Network& network, const ForwardCache& cache,
                   const Tensor& loss_grad) {
  if (cache.network_id != network.id() ||
      cache.inputs.size() != network.size() ||
      cache.pool_argmax.size() != network.size()) {
    throw StaleCache("backward: cache was not produced by this network");
  }
  std::size_t n = 1;
  if (network.size() > 0) n = cache.inputs.front().shape()[0];
  const Shape batched_out = prepend(n, network.output_shape());
  const Shape expected = cache.batched ? batched_out : network.output_shape();
  if (loss_grad.shape() != expected) {
    throw ShapeMismatch("backward: loss gradient " + loss_grad.shape().str() +
                        " does not match output " + expected.str());
  }

  Gradients grads;
  grads.params.resize(network.size());
  Tensor dy = loss_grad.reshaped(batched_out);
  for (std::size_t r = network.size(); r-- > 0;) {
    const LayerSpec& layer = network.layers()[r];
    const LayerParams& p = network.params()[r];
    const Tensor& x = cache.inputs[r];
    if (x.shape() != prepend(n, network.shape_before(r))) {
      throw StaleCache(where(r, layer) + ": cached input does not match network");
    }
    Tensor dx;
    std::visit(
        Overloaded{
            [&](const Dense&) { dense_backward(x, p, dy, grads.params[r], dx); },
            [&](const Conv2d& c) { conv_backward(x, c, p, dy, grads.params[r], dx); },
            [&](const ReLU&) {
              dx = dy;
              auto X = x.data();
              auto D = dx.data();
              for (std::size_t k = 0; k < D.size(); ++k) {
                if (!(X[k] > 0.0)) D[k] = 0.0;
              }
            },
            [&](const Tanh&) {
              dx = dy;
              auto X = x.data();
              auto D = dx.data();
              for (std::size_t k = 0; k < D.size(); ++k) {
                const double t = std::tanh(X[k]);
                D[k] *= 1.0 - t * t;
              }
            },
            [&](const Flatten&) { dx = dy.reshaped(x.shape()); },
            [&](const MaxPool2d&) {
              dx = Tensor(x.shape());
              const auto& argmax = cache.pool_argmax[r];
              if (argmax.size() != dy.size()) {
                throw StaleCache(where(r, layer) + ": pooling cache mismatch");
              }
              auto D = dx.data();
              auto G = dy.data();
              for (std::size_t k = 0; k < G.size(); ++k) D[argmax[k]] += G[k];
            },
        },
        layer);
    dy = std::move(dx);
  }
  grads.input = cache.batched ? std::move(dy) : dy.reshaped(network.input_shape());
  return grads;
}

// --- losses -----------------------------------------------------------------

LossResult cross_entropy_loss(const Tensor& logits, std::span<const int> labels) {
  if (logits.shape().rank() != 2 || logits.shape()[0] != labels.size()) {
    throw ShapeMismatch("cross_entropy_loss: logits " + logits.shape().str() +
                        " do not match " + std::to_string(labels.size()) +
                        " labels");
  }
  const std::size_t n = logits.shape()[0], classes = logits.shape()[1];
  LossResult result{0.0, Tensor(logits.shape())};
  auto Z = logits.data();
  auto G = result.grad.data();
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t s = 0; s < n; ++s) {
    const int label = labels[s];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw InvalidArgument("cross_entropy_loss: label " + std::to_string(label) +
                            " outside [0, " + std::to_string(classes) + ")");
    }
    const double* z = &Z[s * classes];
    double* g = &G[s * classes];
    const double zmax = *std::max_element(z, z + classes);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      g[c] = std::exp(z[c] - zmax);
      sum += g[c];
    }
    const double log_sum = zmax + std::log(sum);
    result.loss += (log_sum - z[label]) * inv_n;
    for (std::size_t c = 0; c < classes; ++c) g[c] = g[c] / sum * inv_n;
    g[label] -= inv_n;
  }
  return result;
}

LossResult squared_loss(const Tensor& output, const Tensor& target) {
  if (output.shape() != target.shape()) {
    throw ShapeMismatch("squared_loss: output " + output.shape().str() +
                        " vs target " + target.shape().str());
  }
  const double n =
      output.shape().rank() > 1 ? static_cast<double>(output.shape()[0]) : 1.0;
  LossResult result{0.0, Tensor(output.shape())};
  auto O = output.data();
  auto T = target.data();
  auto G = result.grad.data();
  for (std::size_t k = 0; k < O.size(); ++k) {
    const double d = O[k] - T[k];
    result.loss += 0.5 * d * d / n;
    G[k] = d / n;
  }
  return result;
}

// --- optimizers -------------------------------------------------------------

Optimizer::Optimizer(const Network& network, OptimizerConfig config,
                     double learning_rate)
    : config_(config), learning_rate_(learning_rate) {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("learning rate must be finite and >= 0");
  }
  if (const auto* adam = std::get_if<AdamConfig>(&config_)) {
    if (!(adam->beta1 >= 0.0 && adam->beta1 < 1.0 && adam->beta2 >= 0.0 &&
          adam->beta2 < 1.0 && adam->epsilon > 0.0)) {
      throw InvalidArgument("Adam requires 0 <= beta < 1 and epsilon > 0");
    }
  } else if (const auto* sgd = std::get_if<SgdConfig>(&config_)) {
    if (!(sgd->momentum >= 0.0 && sgd->momentum < 1.0)) {
      throw InvalidArgument("SGD requires 0 <= momentum < 1");
    }
  }
  for (const auto& p : network.params()) {
    LayerParams zero;
    if (p.has_params()) {
      zero.weight = Tensor(p.weight.shape());
      zero.bias = Tensor(p.bias.shape());
    }
    first_.push_back(zero);
    second_.push_back(zero);
  }
}

void Optimizer::step(Network& network, const Gradients& grads) {
  auto& params = network.params();
  if (grads.params.size() != params.size() || first_.size() != params.size()) {
    throw ShapeMismatch("optimizer: gradient layout does not match network");
  }
  ++steps_;
  const double lr = learning_rate_;
  const auto t = static_cast<double>(steps_);

  auto update = [&](Tensor& p, const Tensor& g, Tensor& m, Tensor& v) {
    if (p.shape() != g.shape()) {
      throw ShapeMismatch("optimizer: gradient " + g.shape().str() +
                          " vs parameter " + p.shape().str());
    }
    auto P = p.data();
    auto G = g.data();
    auto M = m.data();
    auto V = v.data();
    std::visit(
        Overloaded{
            [&](const AdamConfig& a) {
              const double bc1 = 1.0 - std::pow(a.beta1, t);
              const double bc2 = 1.0 - std::pow(a.beta2, t);
              for (std::size_t k = 0; k < P.size(); ++k) {
                M[k] = a.beta1 * M[k] + (1.0 - a.beta1) * G[k];
                V[k] = a.beta2 * V[k] + (1.0 - a.beta2) * G[k] * G[k];
                const double mhat = M[k] / bc1;
                const double vhat = V[k] / bc2;
                P[k] -= lr * mhat / (std::sqrt(vhat) + a.epsilon);
              }
            },
            [&](const SgdConfig& s) {
              for (std::size_t k = 0; k < P.size(); ++k) {
                M[k] = s.momentum * M[k] + G[k];
                P[k] -= lr * M[k];
              }
            },
        },
        config_);
  };

  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].trainable || !params[i].has_params()) continue;
    update(params[i].weight, grads.params[i].weight, first_[i].weight,
           second_[i].weight);
    update(params[i].bias, grads.params[i].bias, first_[i].bias, second_[i].bias);
  }
}

// --- training ---------------------------------------------------------------

void TrainConfig::validate() const {
  if (batch_size == 0) throw InvalidArgument("batch_size must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("learning_rate must be finite and >= 0");
  }
  if (const auto* adam = std::get_if<AdamConfig>(&optimizer)) {
    if (!(adam->beta1 >= 0.0 && adam->beta1 < 1.0 && adam->beta2 >= 0.0 &&
          adam->beta2 < 1.0)) {
      throw InvalidArgument("Adam betas must lie in [0, 1)");
    }
  } else if (const auto* sgd = std::get_if<SgdConfig>(&optimizer)) {
    if (!(sgd->momentum >= 0.0 && sgd->momentum < 1.0)) {
      throw InvalidArgument("SGD momentum must lie in [0, 1)");
    }
  }
}

double TrainingHistory::final_val_acc() const {
  return epochs.empty() ? 0.0 : epochs.back().val_acc;
}

double TrainingHistory::best_val_acc() const {
  double best = 0.0;
  for (const auto& e : epochs) best = std::max(best, e.val_acc);
  return best;
}

std::string TrainingHistory::to_jsonl() const {
  std::string out;
  for (const auto& e : epochs) {
    nlohmann::ordered_json j;
    j["epoch"] = e.epoch;
    j["train_loss"] = e.train_loss;
    j["val_loss"] = e.val_loss;
    j["val_acc"] = e.val_acc;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<int> predict_classes(const Network& network, const Dataset& data) {
  constexpr std::size_t kChunk = 256;
  std::vector<int> predictions;
  predictions.reserve(data.size());
  for (std::size_t begin = 0; begin < data.size(); begin += kChunk) {
    const std::size_t end = std::min(data.size(), begin + kChunk);
    const Tensor logits = predict_logits(network, data.slice(begin, end));
    const std::size_t classes = logits.shape()[1];
    auto Z = logits.data();
    for (std::size_t s = 0; s < end - begin; ++s) {
      const double* z = &Z[s * classes];
      predictions.push_back(
          static_cast<int>(std::max_element(z, z + classes) - z));
    }
  }
  return predictions;
}

std::pair<double, double> evaluate(const Network& network, const Dataset& data) {
  constexpr std::size_t kChunk = 256;
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t begin = 0; begin < data.size(); begin += kChunk) {
    const std::size_t end = std::min(data.size(), begin + kChunk);
    const Tensor logits = predict_logits(network, data.slice(begin, end));
    const std::span<const int> labels(data.labels.data() + begin, end - begin);
    loss += cross_entropy_loss(logits, labels).loss *
            static_cast<double>(end - begin);
    const std::size_t classes = logits.shape()[1];
    auto Z = logits.data();
    for (std::size_t s = 0; s < labels.size(); ++s) {
      const double* z = &Z[s * classes];
      if (std::max_element(z, z + classes) - z == labels[s]) ++correct;
    }
  }
  const auto n = static_cast<double>(data.size());
  return {loss / n, static_cast<double>(correct) / n};
}

TrainingHistory train(Network& network, const Dataset& train_set,
                      const Dataset& val_set, const TrainConfig& config) {
  config.validate();
  train_set.validate();
  val_set.validate();
  if (train_set.sample_shape() != network.input_shape() ||
      val_set.sample_shape() != network.input_shape()) {
    throw ShapeMismatch("train: dataset samples " +
                        train_set.sample_shape().str() +
                        " do not match network input " +
                        network.input_shape().str());
  }

  const std::size_t n = train_set.size();
  RngStream shuffle_rng(config.seed, kShuffleStream);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto reshuffle = [&] {
    for (std::size_t i = n; i-- > 1;) {
      std::swap(order[i], order[shuffle_rng.next_below(i + 1)]);
    }
  };

  Optimizer optimizer(network, config.optimizer, config.learning_rate);
  TrainingHistory history;
  std::size_t cursor = n;  // forces a shuffle before the first batch
  std::vector<std::size_t> rows;
  std::vector<int> labels;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t seen = 0;
    auto run_batch = [&](std::span<const std::size_t> batch_rows) {
      labels.clear();
      for (auto r : batch_rows) labels.push_back(train_set.labels[r]);
      auto fwd = forward(network, train_set.batch(batch_rows));
      auto loss = cross_entropy_loss(fwd.output, labels);
      if (!std::isfinite(loss.loss)) {
        throw Diverged(epoch, "training diverged at epoch " +
                                  std::to_string(epoch) + ": non-finite loss");
      }
      const Gradients grads = backward(network, fwd.cache, loss.grad);
      optimizer.step(network, grads);
      loss_sum += loss.loss * static_cast<double>(batch_rows.size());
      seen += batch_rows.size();
    };

    if (config.batches_per_epoch == 0) {
      reshuffle();
      cursor = n;
      for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
        const std::size_t end = std::min(n, begin + config.batch_size);
        run_batch(std::span<const std::size_t>(order.data() + begin, end - begin));
      }
    } else {
      for (std::size_t b = 0; b < config.batches_per_epoch; ++b) {
        if (cursor >= n) {
          reshuffle();
          cursor = 0;
        }
        const std::size_t end = std::min(n, cursor + config.batch_size);
        run_batch(std::span<const std::size_t>(order.data() + cursor, end - cursor));
        cursor = end;
      }
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = seen ? loss_sum / static_cast<double>(seen) : 0.0;
    std::tie(record.val_loss, record.val_acc) = evaluate(network, val_set);
    if (!std::isfinite(record.val_loss)) {
      throw Diverged(epoch, "training diverged at epoch " +
                                std::to_string(epoch) +
                                ": non-finite validation loss");
    }
    history.epochs.push_back(record);
  }
  return history;
}

}  // namespace initlab
