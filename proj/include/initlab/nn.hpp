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

#ifndef INITLAB_NN_HPP
#define INITLAB_NN_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "initlab/dataset.hpp"
#include "initlab/tensor.hpp"

namespace initlab {

// ---------------------------------------------------------------------------
// Layers

/// Fully connected layer. Weight shape is (out, in); y = x W^T + b.
struct Dense {
  std::size_t in = 0;
  std::size_t out = 0;
};

/// Weight shape is (out_channels, in_channels, kernel_h, kernel_w).
struct Conv2d {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel_h = 0;
  std::size_t kernel_w = 0;
  std::size_t stride = 1;
  std::size_t padding = 0;
};

struct ReLU {};
struct Tanh {};
struct Flatten {};

/// Unpadded max pooling over kernel x kernel windows.
struct MaxPool2d {
  std::size_t kernel = 2;
  std::size_t stride = 2;
};

using LayerSpec = std::variant<Dense, Conv2d, ReLU, Tanh, Flatten, MaxPool2d>;

std::string layer_name(const LayerSpec& layer);

/// Per-layer parameters. Layers without parameters hold empty tensors.
struct LayerParams {
  Tensor weight;
  Tensor bias;
  bool trainable = true;

  bool has_params() const noexcept { return weight.size() > 0; }
};

// ---------------------------------------------------------------------------
// Network

class Network {
 public:
  /// Checks that adjacent layers conform for a sample of `input_shape` and
  /// allocates zero-filled weights and biases.
  Network(Shape input_shape, std::vector<LayerSpec> layers);

  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const Shape& input_shape() const noexcept { return input_shape_; }
  const Shape& output_shape() const noexcept { return shapes_.back(); }
  /// Per-sample shape entering layer i; index size() is the output shape.
  const Shape& shape_before(std::size_t layer) const { return shapes_.at(layer); }

  std::size_t size() const noexcept { return layers_.size(); }
  const std::vector<LayerSpec>& layers() const noexcept { return layers_; }

  std::vector<LayerParams>& params() noexcept { return params_; }
  const std::vector<LayerParams>& params() const noexcept { return params_; }

  /// Identity used to match forward caches; copies get a fresh id.
  std::uint64_t id() const noexcept { return id_; }

 private:
  Shape input_shape_;
  std::vector<LayerSpec> layers_;
  std::vector<Shape> shapes_;
  std::vector<LayerParams> params_;
  std::uint64_t id_;
};

/// Activations saved by forward() for use by backward().
struct ForwardCache {
  std::uint64_t network_id = 0;
  bool batched = true;
  /// inputs[i] is the batched tensor that entered layer i.
  std::vector<Tensor> inputs;
  /// Flat argmax indices into the pooling input, one list per layer.
  std::vector<std::vector<std::size_t>> pool_argmax;
};

struct ForwardResult {
  Tensor output;
  ForwardCache cache;
};

/// Accepts a batch (N, input_shape...) or a single sample (input_shape...).
/// Shape problems raise ShapeMismatch naming the layer index.
ForwardResult forward(const Network& network, const Tensor& input);

/// Output only; no cache kept.
Tensor predict_logits(const Network& network, const Tensor& input);

struct Gradients {
  /// Same layout as Network::params(); empty tensors for parameter-free layers.
  std::vector<LayerParams> params;
  Tensor input;
};

/// Exact reverse-mode gradients. `loss_grad` has the shape of the forward
/// output. Throws StaleCache if `cache` came from another network.
Gradients backward(const Network& network, const ForwardCache& cache,
                   const Tensor& loss_grad);

// ---------------------------------------------------------------------------
// Losses

struct LossResult {
  double loss = 0.0;
  Tensor grad;
};

/// Softmax cross-entropy averaged over the batch. logits is (batch, classes).
LossResult cross_entropy_loss(const Tensor& logits, std::span<const int> labels);

/// 0.5 * mean over batch of squared error summed over features.
LossResult squared_loss(const Tensor& output, const Tensor& target);

// ---------------------------------------------------------------------------
// Optimizers

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct SgdConfig {
  double momentum = 0.0;
};

using OptimizerConfig = std::variant<AdamConfig, SgdConfig>;

/// Per-parameter optimizer state for one network.
class Optimizer {
 public:
  Optimizer(const Network& network, OptimizerConfig config,
            double learning_rate);

  void step(Network& network, const Gradients& grads);
  std::size_t steps_taken() const noexcept { return steps_; }

 private:
  OptimizerConfig config_;
  double learning_rate_;
  std::size_t steps_ = 0;
  // first/second moments (Adam) or velocity (SGD), same layout as params.
  std::vector<LayerParams> first_;
  std::vector<LayerParams> second_;
};

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  /// 0 means one full pass over the training data per epoch. A positive
  /// value fixes the number of batches per epoch instead.
  std::size_t batches_per_epoch = 0;
  double learning_rate = 1e-4;
  OptimizerConfig optimizer = AdamConfig{};
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;

  double final_val_acc() const;
  double best_val_acc() const;
  /// One JSON object per line: {epoch, train_loss, val_loss, val_acc}.
  std::string to_jsonl() const;

  friend bool operator==(const TrainingHistory&, const TrainingHistory&) = default;
};

/// Mini-batch training with cross-entropy loss. Shuffling is Fisher-Yates on
/// a stream derived from config.seed. Throws Diverged on a non-finite loss.
TrainingHistory train(Network& network, const Dataset& train_set,
                      const Dataset& val_set, const TrainConfig& config);

/// Argmax class per sample, evaluated in chunks.
std::vector<int> predict_classes(const Network& network, const Dataset& data);

/// Returns {mean cross-entropy, accuracy}.
std::pair<double, double> evaluate(const Network& network, const Dataset& data);

// Stream ids reserved for training; per-layer init streams use the layer index.
inline constexpr std::uint64_t kShuffleStream = 0x5348554646000000ull;

}  // namespace initlab

#endif  // INITLAB_NN_HPP
