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

#ifndef INITLAB_DATASET_HPP
#define INITLAB_DATASET_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "initlab/tensor.hpp"

namespace initlab {

enum class Split { kAll, kTrain, kVal, kTest };

std::string split_name(Split split);

/// Labelled images, stored as one (N, channels, height, width) tensor.
struct Dataset {
  Tensor images;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  Split split = Split::kAll;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t class_count() const noexcept { return class_names.size(); }
  /// Shape of a single sample, i.e. images.shape() without the batch axis.
  Shape sample_shape() const;

  /// Gathers the given rows into a batch tensor.
  Tensor batch(std::span<const std::size_t> rows) const;
  /// Rows [begin, end) in storage order.
  Tensor slice(std::size_t begin, std::size_t end) const;

  /// New dataset holding the given rows, in the given order.
  Dataset subset(std::span<const std::size_t> rows, Split tag) const;

  /// Throws InvalidArgument if labels are out of range, N is zero or the
  /// image tensor does not match the label count.
  void validate() const;
};

}  // namespace initlab

#endif  // INITLAB_DATASET_HPP
