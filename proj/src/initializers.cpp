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

#include "initlab/initializers.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "initlab/error.hpp"

namespace initlab {

namespace {

struct Registration {
  std::string_view name;
  SchemeKind kind;
};

// Order matters: it is the order shown by --help and scheme_names().
constexpr std::array<Registration, 9> kRegistry = {{
    {"zeros", SchemeKind::kAllZeros},
    {"constant", SchemeKind::kConstant},
    {"std-normal", SchemeKind::kStandardNormal},
    {"lecun", SchemeKind::kLecun},
    {"random", SchemeKind::kRandomUniform},
    {"xavier", SchemeKind::kXavier},
    {"he", SchemeKind::kHe},
    {"proposed", SchemeKind::kProposedUniform},
    {"proposed-normal", SchemeKind::kProposedNormal},
}};

double fan_sum(const FanPair& f) {
  return static_cast<double>(f.fan_in) + static_cast<double>(f.fan_out);
}

}  // namespace

FanPair::FanPair(std::size_t in, std::size_t out) : fan_in(in), fan_out(out) {
  if (in == 0 || out == 0) {
    throw InvalidArgument("fans must be >= 1, got (" + std::to_string(in) +
                          ", " + std::to_string(out) + ")");
  }
}

InitScheme InitScheme::constant(double value) {
  if (!std::isfinite(value)) {
    throw InvalidArgument("constant initializer value must be finite");
  }
  return InitScheme(SchemeKind::kConstant, value);
}

InitScheme InitScheme::random_uniform(double range) {
  if (!(range > 0.0) || !std::isfinite(range)) {
    throw InvalidArgument("random initializer range must be finite and > 0");
  }
  return InitScheme(SchemeKind::kRandomUniform, range);
}

std::string_view InitScheme::name() const noexcept {
  for (const auto& r : kRegistry) {
    if (r.kind == kind_) return r.name;
  }
  return "unknown";
}

bool InitScheme::is_uniform() const noexcept {
  return kind_ == SchemeKind::kRandomUniform || kind_ == SchemeKind::kXavier ||
         kind_ == SchemeKind::kProposedUniform;
}

bool InitScheme::is_deterministic() const noexcept {
  return kind_ == SchemeKind::kAllZeros || kind_ == SchemeKind::kConstant;
}

const std::vector<std::string>& scheme_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& r : kRegistry) out.emplace_back(r.name);
    return out;
  }();
  return names;
}

InitScheme parse_scheme(std::string_view name, double constant_value,
                        double range) {
  for (const auto& r : kRegistry) {
    if (r.name != name) continue;
    switch (r.kind) {
      case SchemeKind::kAllZeros: return InitScheme::zeros();
      case SchemeKind::kConstant: return InitScheme::constant(constant_value);
      case SchemeKind::kStandardNormal: return InitScheme::standard_normal();
      case SchemeKind::kLecun: return InitScheme::lecun();
      case SchemeKind::kRandomUniform: return InitScheme::random_uniform(range);
      case SchemeKind::kXavier: return InitScheme::xavier();
      case SchemeKind::kHe: return InitScheme::he();
      case SchemeKind::kProposedUniform: return InitScheme::proposed();
      case SchemeKind::kProposedNormal: return InitScheme::proposed_normal();
    }
  }
  std::string valid;
  for (const auto& n : scheme_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown scheme '" + std::string(name) +
                        "'; valid names: " + valid);
}

FanPair compute_fans(const Shape& weight_shape) {
  switch (weight_shape.rank()) {
    case 2:
      return FanPair(weight_shape[1], weight_shape[0]);
    case 4: {
      const std::size_t receptive = weight_shape[2] * weight_shape[3];
      return FanPair(weight_shape[1] * receptive, weight_shape[0] * receptive);
    }
    default:
      throw UnsupportedLayer("cannot compute fans of a rank-" +
                             std::to_string(weight_shape.rank()) + " tensor " +
                             weight_shape.str() +
                             "; expected a dense (out, in) or conv "
                             "(out, in, kh, kw) weight");
  }
}

double proposed_bound(const FanPair& fans) {
  const double n = static_cast<double>(fans.fan_in);
  return std::sqrt(2.0 / n) + std::sqrt(2.0 / fan_sum(fans));
}

double analytic_mean(const InitScheme& scheme) {
  return scheme.kind() == SchemeKind::kConstant ? scheme.parameter() : 0.0;
}

double scale_parameter(const InitScheme& scheme, const FanPair& fans) {
  const double n = static_cast<double>(fans.fan_in);
  switch (scheme.kind()) {
    case SchemeKind::kAllZeros: return 0.0;
    case SchemeKind::kConstant: return scheme.parameter();
    case SchemeKind::kStandardNormal: return 1.0;
    case SchemeKind::kLecun: return std::sqrt(1.0 / n);
    case SchemeKind::kRandomUniform: return scheme.parameter();
    case SchemeKind::kXavier: return std::sqrt(6.0 / fan_sum(fans));
    case SchemeKind::kHe: return std::sqrt(2.0 / n);
    case SchemeKind::kProposedUniform: return proposed_bound(fans);
    case SchemeKind::kProposedNormal: return std::sqrt(2.0 / fan_sum(fans));
  }
  return 0.0;
}

double analytic_variance(const InitScheme& scheme, const FanPair& fans) {
  if (scheme.is_deterministic()) return 0.0;
  const double s = scale_parameter(scheme, fans);
  // U(-s, s) has variance s^2 / 3.
  return scheme.is_uniform() ? s * s / 3.0 : s * s;
}

Tensor sample_distribution(const InitScheme& scheme, const FanPair& fans,
                           const Shape& shape, RngStream& rng) {
  const double s = scale_parameter(scheme, fans);
  if (scheme.is_deterministic()) return Tensor(shape, s);
  if (scheme.is_uniform()) return uniform(rng, -s, s, shape);
  return normal(rng, 0.0, s, shape);
}

Tensor sample_weights(const InitScheme& scheme, const FanPair& fans,
                      const Shape& shape, RngStream& rng) {
  const FanPair actual = compute_fans(shape);
  if (actual != fans) {
    throw ShapeMismatch("weight shape " + shape.str() + " has fans (" +
                        std::to_string(actual.fan_in) + ", " +
                        std::to_string(actual.fan_out) + "), not (" +
                        std::to_string(fans.fan_in) + ", " +
                        std::to_string(fans.fan_out) + ")");
  }
  return sample_distribution(scheme, fans, shape, rng);
}

Network apply_initializer(Network network, const InitScheme& scheme,
                          std::uint64_t seed) {
  for (std::size_t i = 0; i < network.size(); ++i) {
    const auto& layer = network.layers()[i];
    if (!std::holds_alternative<Dense>(layer) &&
        !std::holds_alternative<Conv2d>(layer)) {
      continue;
    }
    auto& weight = network.params()[i].weight;
    RngStream rng(seed, i);
    const FanPair fans = compute_fans(weight.shape());
    weight = sample_weights(scheme, fans, weight.shape(), rng);
  }
  return network;
}

}  // namespace initlab
