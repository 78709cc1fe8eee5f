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

#ifndef INITLAB_VARIANCE_HPP
#define INITLAB_VARIANCE_HPP

// Monte-Carlo checks of how weight variance scales signal variance through a
// linear unit y = sum_i x_i w_i (no bias, no activation):
//
//   forward:  Var[y]  = fan_in  * Var[x]  * Var[w]
//   backward: Var[dx] = fan_out * Var[dy] * Var[w]
//
// Inputs and seed gradients are standard normal, so each ratio equals
// fan * Var[w] directly.

#include <cstddef>
#include <string>
#include <vector>

#include "initlab/initializers.hpp"
#include "initlab/rng.hpp"

namespace initlab {

/// Samples needed for the 5% band: the relative standard error of a
/// variance estimate is about sqrt(2 / N), ~0.45% at 1e5.
inline constexpr std::size_t kMinProbeSamples = 10000;
inline constexpr double kLawTolerance = 0.05;

struct ProbeResult {
  double measured_ratio = 0.0;
  double predicted_ratio = 0.0;
  /// Pooled variance of every weight drawn by the probe.
  double weight_variance_measured = 0.0;
};

/// `samples` independent (x, w) pairs, x ~ N(0, I_fan_in); returns the
/// empirical Var[y] and fan_in * Var_analytic[w].
ProbeResult probe_forward(const InitScheme& scheme, const FanPair& fans,
                          std::size_t samples, RngStream& rng);

/// `samples` independent (dy, w) pairs, dy ~ N(0, I_fan_out);
/// dx_1 = sum_j dy_j w_j1. Returns Var[dx_1] and fan_out * Var_analytic[w].
ProbeResult probe_backward(const InitScheme& scheme, const FanPair& fans,
                           std::size_t samples, RngStream& rng);

/// True when measured/predicted lies in [1 - tol, 1 + tol], or both are 0.
bool within_law(double measured, double predicted, double tol = kLawTolerance);

struct VarianceRecord {
  std::size_t layer = 0;
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  double predicted_forward_ratio = 0.0;
  double measured_forward_ratio = 0.0;
  double predicted_backward_ratio = 0.0;
  double measured_backward_ratio = 0.0;
  double weight_variance_measured = 0.0;
  double weight_variance_analytic = 0.0;
  /// Depth sweeps only: variance of the activations leaving this layer and
  /// of the gradient leaving it during the backward sweep. Probes report the
  /// single-unit values (input variance 1).
  double activation_variance = 0.0;
  double gradient_variance = 0.0;

  friend bool operator==(const VarianceRecord&, const VarianceRecord&) = default;
};

struct VarianceReport {
  std::string scheme;
  std::size_t sample_count = 0;
  std::vector<VarianceRecord> layers;

  /// Header: layer,fan_in,fan_out,pred_fwd,meas_fwd,pred_bwd,meas_bwd,
  /// var_w_meas,var_w_analytic
  std::string to_csv() const;
  std::string to_json() const;
  static VarianceReport from_json(const std::string& text);

  friend bool operator==(const VarianceReport&, const VarianceReport&) = default;
};

inline constexpr const char* kVarianceCsvHeader =
    "layer,fan_in,fan_out,pred_fwd,meas_fwd,pred_bwd,meas_bwd,var_w_meas,"
    "var_w_analytic";

/// Forward and backward probe at one fan pair, as a one-row report.
/// Uses RngStream(seed, 0) for the forward probe and (seed, 1) for backward.
VarianceReport probe_report(const InitScheme& scheme, const FanPair& fans,
                            std::size_t samples, std::uint64_t seed);

struct SweepOptions {
  /// Insert ReLU between layers. Exploratory only: the variance laws above
  /// are stated for purely linear stacks.
  bool relu = false;
};

/// Pushes a (samples, widths[0]) standard-normal batch through `depth`
/// linear layers, then a unit-variance gradient back down. `widths` holds
/// either one width for every layer or depth + 1 entries (input first).
VarianceReport depth_sweep(const InitScheme& scheme,
                           const std::vector<std::size_t>& widths,
                           std::size_t depth, std::size_t samples,
                           RngStream& rng, SweepOptions options = {});

}  // namespace initlab

#endif  // INITLAB_VARIANCE_HPP
