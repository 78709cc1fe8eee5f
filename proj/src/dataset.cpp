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

#include "initlab/dataset.hpp"

#include <algorithm>

#include "initlab/error.hpp"

namespace initlab {

std::string split_name(Split split) {
  switch (split) {
    case Split::kAll: return "all";
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "unknown";
}

Shape Dataset::sample_shape() const {
  const auto& dims = images.shape().dims();
  return Shape(std::vector<std::size_t>(dims.begin() + 1, dims.end()));
}

Tensor Dataset::batch(std::span<const std::size_t> rows) const {
  const std::size_t stride = images.shape().element_count() / size();
  std::vector<std::size_t> dims = images.shape().dims();
  dims[0] = rows.size();
  Tensor out{Shape(std::move(dims))};
  auto src = images.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(rows[i] * stride),
                stride, dst.begin() + static_cast<std::ptrdiff_t>(i * stride));
  }
  return out;
}

Tensor Dataset::slice(std::size_t begin, std::size_t end) const {
  std::vector<std::size_t> rows(end - begin);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = begin + i;
  return batch(rows);
}

Dataset Dataset::subset(std::span<const std::size_t> rows, Split tag) const {
  Dataset out;
  out.images = batch(rows);
  out.labels.reserve(rows.size());
  for (auto r : rows) out.labels.push_back(labels.at(r));
  out.class_names = class_names;
  out.split = tag;
  return out;
}

void Dataset::validate() const {
  if (labels.empty()) {
    throw InvalidArgument(split_name(split) + " split is empty");
  }
  if (images.shape().rank() < 2 || images.shape()[0] != labels.size()) {
    throw ShapeMismatch("dataset images " + images.shape().str() +
                        " do not match " + std::to_string(labels.size()) +
                        " labels");
  }
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= class_names.size()) {
      throw InvalidArgument("label " + std::to_string(label) +
                            " outside [0, " +
                            std::to_string(class_names.size()) + ")");
    }
  }
}

}  // namespace initlab
