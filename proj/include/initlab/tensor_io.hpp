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

#ifndef INITLAB_TENSOR_IO_HPP
#define INITLAB_TENSOR_IO_HPP

#include <filesystem>
#include <iosfwd>

#include "initlab/tensor.hpp"

namespace initlab {

// ITNS dump: "ITNS", u8 rank, rank x u32 LE extents, f64 LE payload.

void write_itns(std::ostream& out, const Tensor& tensor);
Tensor read_itns(std::istream& in);

void save_itns(const std::filesystem::path& path, const Tensor& tensor);
Tensor load_itns(const std::filesystem::path& path);

}  // namespace initlab

#endif  // INITLAB_TENSOR_IO_HPP
