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

// Finite-difference gradient checks, one small network per layer kind.

#ifndef INITLAB_TESTS_GRADCHECK_HPP
#define INITLAB_TESTS_GRADCHECK_HPP

#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"

#include "initlab/nn.hpp"

namespace gradcheck {

struct Case {
  std::string kind;
  initlab::Shape input;
  std::vector<initlab::LayerSpec> layers;
};

inline std::vector<Case> layer_kind_cases() {
  using namespace initlab;
  return {
      {"dense", Shape{6}, {Dense{6, 4}}},
      {"conv", Shape{2, 6, 5}, {Conv2d{2, 3, 3, 2, 2, 1}}},
      {"relu", Shape{6}, {Dense{6, 5}, ReLU{}, Dense{5, 3}}},
      {"tanh", Shape{6}, {Dense{6, 5}, Tanh{}, Dense{5, 3}}},
      {"flatten", Shape{2, 4, 4}, {Conv2d{2, 2, 3, 3}, Flatten{}, Dense{8, 3}}},
      {"maxpool", Shape{2, 6, 6},
       {Conv2d{2, 3, 3, 3, 1, 1}, MaxPool2d{2, 2}, Flatten{}, Dense{27, 2}}},
  };
}

// Worst relative error over `instances` random draws of weights, biases,
// inputs and regression targets, using the squared loss.
inline oracle::GradCheck run(const Case& c, std::size_t instances, std::uint64_t seed) {
  using namespace initlab;
  std::mt19937_64 gen(seed);
  oracle::GradCheck worst;
  constexpr std::size_t kBatch = 3;
  for (std::size_t k = 0; k < instances; ++k) {
    Network net(c.input, c.layers);
    for (auto& p : net.params()) {
      if (!p.has_params()) continue;
      oracle::fill_normal(p.weight, gen, 0.5);
      oracle::fill_normal(p.bias, gen, 0.5);
    }
    std::vector<std::size_t> dims{kBatch};
    for (std::size_t d : c.input.dims()) dims.push_back(d);
    Tensor x{Shape(dims)};
    oracle::fill_normal(x, gen);
    std::vector<std::size_t> out_dims{kBatch};
    for (std::size_t d : net.output_shape().dims()) out_dims.push_back(d);
    Tensor target{Shape(out_dims)};
    oracle::fill_normal(target, gen);

    auto fwd = forward(net, x);
    const auto loss = squared_loss(fwd.output, target);
    const Gradients g = backward(net, fwd.cache, loss.grad);
    const auto r = oracle::finite_difference(
        net, x, [&] { return squared_loss(predict_logits(net, x), target).loss; }, g);
    worst.max_rel_error = std::max(worst.max_rel_error, r.max_rel_error);
    worst.checked += r.checked;
  }
  return worst;
}

}  // namespace gradcheck

#endif  // INITLAB_TESTS_GRADCHECK_HPP
