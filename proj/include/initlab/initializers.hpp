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

#ifndef INITLAB_INITIALIZERS_HPP
#define INITLAB_INITIALIZERS_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "initlab/nn.hpp"
#include "initlab/rng.hpp"
#include "initlab/tensor.hpp"

namespace initlab {

/// Input and output connection counts of a weight tensor.
struct FanPair {
  std::size_t fan_in = 1;
  std::size_t fan_out = 1;

  FanPair() = default;
  /// Throws InvalidArgument unless both counts are >= 1.
  FanPair(std::size_t in, std::size_t out);

  friend bool operator==(const FanPair&, const FanPair&) = default;
};

enum class SchemeKind {
  kAllZeros,
  kConstant,
  kStandardNormal,
  kLecun,
  kRandomUniform,
  kXavier,
  kHe,
  kProposedUniform,
  kProposedNormal,
};

/// A weight initialization rule. Only kConstant (value) and kRandomUniform
/// (half-width) carry a parameter.
class InitScheme {
 public:
  static constexpr double kDefaultConstant = 0.1;
  static constexpr double kDefaultRange = 0.05;

  static InitScheme zeros() { return InitScheme(SchemeKind::kAllZeros, 0.0); }
  static InitScheme constant(double value = kDefaultConstant);
  static InitScheme standard_normal() { return InitScheme(SchemeKind::kStandardNormal, 0.0); }
  static InitScheme lecun() { return InitScheme(SchemeKind::kLecun, 0.0); }
  static InitScheme random_uniform(double range = kDefaultRange);
  static InitScheme xavier() { return InitScheme(SchemeKind::kXavier, 0.0); }
  static InitScheme he() { return InitScheme(SchemeKind::kHe, 0.0); }
  static InitScheme proposed() { return InitScheme(SchemeKind::kProposedUniform, 0.0); }
  static InitScheme proposed_normal() { return InitScheme(SchemeKind::kProposedNormal, 0.0); }

  SchemeKind kind() const noexcept { return kind_; }
  /// Constant value or uniform half-width; 0 for parameter-free schemes.
  double parameter() const noexcept { return parameter_; }

  /// Registered CLI/config name, e.g. "proposed".
  std::string_view name() const noexcept;

  bool is_uniform() const noexcept;
  bool is_deterministic() const noexcept;

  friend bool operator==(const InitScheme&, const InitScheme&) = default;

 private:
  InitScheme(SchemeKind kind, double parameter) : kind_(kind), parameter_(parameter) {}

  SchemeKind kind_;
  double parameter_;
};

/// All registered names in a fixed order.
const std::vector<std::string>& scheme_names();

/// Looks up a scheme by registered name. `constant_value` and `range` feed
/// the parameterised schemes. Throws InvalidArgument listing valid names.
InitScheme parse_scheme(std::string_view name,
                        double constant_value = InitScheme::kDefaultConstant,
                        double range = InitScheme::kDefaultRange);

/// Dense weight (out, in) -> (in, out). Conv kernel (out, in, kh, kw) ->
/// (in*kh*kw, out*kh*kw). Any other rank raises UnsupportedLayer.
FanPair compute_fans(const Shape& weight_shape);

/// Half-width of the proposed uniform interval:
/// sqrt(2 / fan_in) + sqrt(2 / (fan_in + fan_out)).
double proposed_bound(const FanPair& fans);

double analytic_mean(const InitScheme& scheme);
double analytic_variance(const InitScheme& scheme, const FanPair& fans);

/// Interval half-width for uniform schemes, standard deviation for normal
/// schemes, the value itself for constant schemes.
double scale_parameter(const InitScheme& scheme, const FanPair& fans);

/// Draws `shape` values from the scheme's distribution for the given fans,
/// without checking that the shape itself has those fans.
Tensor sample_distribution(const InitScheme& scheme, const FanPair& fans,
                           const Shape& shape, RngStream& rng);

/// Like sample_distribution, but requires compute_fans(shape) == fans.
Tensor sample_weights(const InitScheme& scheme, const FanPair& fans,
                      const Shape& shape, RngStream& rng);

/// Re-samples the weight of every dense and conv layer, each from
/// RngStream(seed, layer_index). Biases and every other parameter are left
/// as they are; Network allocates biases as zeros.
Network apply_initializer(Network network, const InitScheme& scheme,
                          std::uint64_t seed);

}  // namespace initlab

#endif  // INITLAB_INITIALIZERS_HPP
