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

#ifndef INITLAB_RNG_HPP
#define INITLAB_RNG_HPP

#include <array>
#include <cstdint>

#include "initlab/tensor.hpp"

namespace initlab {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Deterministic random stream keyed by (seed, stream_id).
///
/// The seed is the Philox key; the stream id occupies the upper half of the
/// counter, so streams never overlap and need no state sharing. Output is
/// bit-identical across platforms: conversion to doubles uses only integer
/// arithmetic for uniforms, and the Box-Muller transform for normals.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double next_unit() noexcept;

  /// Uniform on [low, high). Requires low < high.
  double next_uniform(double low, double high);

  double next_standard_normal() noexcept;

  /// Uniform integer on [0, bound). bound must be positive.
  std::uint64_t next_below(std::uint64_t bound);

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// i.i.d. samples from U[low, high). Throws InvalidArgument if low >= high.
Tensor uniform(RngStream& rng, double low, double high, const Shape& shape);

/// i.i.d. samples from N(mean, sigma^2). sigma == 0 yields a constant tensor.
/// Throws InvalidArgument if sigma < 0.
Tensor normal(RngStream& rng, double mean, double sigma, const Shape& shape);

}  // namespace initlab

#endif  // INITLAB_RNG_HPP
