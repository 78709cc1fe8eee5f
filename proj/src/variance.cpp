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

#include "initlab/variance.hpp"

#include <cmath>

#include "json.hpp"

#include "initlab/error.hpp"
#include "initlab/text.hpp"

namespace initlab {

namespace {

/// Running mean/variance (Welford).
class Moments {
 public:
  void add(double v) {
    ++n_;
    const double d = v - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (v - mean_);
  }
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

double tensor_variance(const Tensor& t) {
  Moments m;
  for (double v : t.data()) m.add(v);
  return m.variance();
}

void require_samples(std::size_t samples) {
  if (samples < kMinProbeSamples) {
    throw InvalidArgument("probes need at least " +
                          std::to_string(kMinProbeSamples) + " samples, got " +
                          std::to_string(samples));
  }
}

// One unit: dot product of `width` standard-normal signals with `width`
// weights drawn for `fans`, repeated `samples` times.
ProbeResult probe_unit(const InitScheme& scheme, const FanPair& fans,
                       std::size_t width, std::size_t samples, RngStream& rng) {
  require_samples(samples);
  Moments out;
  Moments weights;
  const Shape row{width};
  for (std::size_t s = 0; s < samples; ++s) {
    const Tensor w = sample_distribution(scheme, fans, row, rng);
    double acc = 0.0;
    for (double wi : w.data()) {
      acc += rng.next_standard_normal() * wi;
      weights.add(wi);
    }
    out.add(acc);
  }
  ProbeResult r;
  r.measured_ratio = out.variance();
  r.predicted_ratio =
      static_cast<double>(width) * analytic_variance(scheme, fans);
  r.weight_variance_measured = weights.variance();
  return r;
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

// y = x W^T for x (n, in), W (out, in).
Tensor linear(const Tensor& x, const Tensor& w) {
  const std::size_t n = x.shape()[0], in = x.shape()[1], out = w.shape()[0];
  Tensor y(Shape{n, out});
  auto X = x.data();
  auto W = w.data();
  auto Y = y.data();
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t o = 0; o < out; ++o) {
      double acc = 0.0;
      for (std::size_t i = 0; i < in; ++i) acc += X[s * in + i] * W[o * in + i];
      Y[s * out + o] = acc;
    }
  }
  return y;
}

}  // namespace

ProbeResult probe_forward(const InitScheme& scheme, const FanPair& fans,
                          std::size_t samples, RngStream& rng) {
  return probe_unit(scheme, fans, fans.fan_in, samples, rng);
}

ProbeResult probe_backward(const InitScheme& scheme, const FanPair& fans,
                           std::size_t samples, RngStream& rng) {
  return probe_unit(scheme, fans, fans.fan_out, samples, rng);
}

bool within_law(double measured, double predicted, double tol) {
  if (predicted == 0.0) return measured == 0.0;
  const double r = measured / predicted;
  return r >= 1.0 - tol && r <= 1.0 + tol;
}

VarianceReport probe_report(const InitScheme& scheme, const FanPair& fans,
                            std::size_t samples, std::uint64_t seed) {
  RngStream fwd_rng(seed, 0);
  RngStream bwd_rng(seed, 1);
  const ProbeResult fwd = probe_forward(scheme, fans, samples, fwd_rng);
  const ProbeResult bwd = probe_backward(scheme, fans, samples, bwd_rng);

  VarianceRecord rec;
  rec.layer = 0;
  rec.fan_in = fans.fan_in;
  rec.fan_out = fans.fan_out;
  rec.predicted_forward_ratio = fwd.predicted_ratio;
  rec.measured_forward_ratio = fwd.measured_ratio;
  rec.predicted_backward_ratio = bwd.predicted_ratio;
  rec.measured_backward_ratio = bwd.measured_ratio;
  rec.weight_variance_measured = fwd.weight_variance_measured;
  rec.weight_variance_analytic = analytic_variance(scheme, fans);
  rec.activation_variance = fwd.measured_ratio;
  rec.gradient_variance = bwd.measured_ratio;

  VarianceReport report;
  report.scheme = std::string(scheme.name());
  report.sample_count = samples;
  report.layers.push_back(rec);
  return report;
}

VarianceReport depth_sweep(const InitScheme& scheme,
                           const std::vector<std::size_t>& widths,
                           std::size_t depth, std::size_t samples,
                           RngStream& rng, SweepOptions options) {
  if (depth == 0) throw InvalidArgument("depth_sweep: depth must be >= 1");
  if (samples < 2) throw InvalidArgument("depth_sweep: need >= 2 samples");
  std::vector<std::size_t> w;
  if (widths.size() == 1) {
    w.assign(depth + 1, widths[0]);
  } else if (widths.size() == depth + 1) {
    w = widths;
  } else {
    throw InvalidArgument("depth_sweep: expected 1 or " +
                          std::to_string(depth + 1) + " widths, got " +
                          std::to_string(widths.size()));
  }

  VarianceReport report;
  report.scheme = std::string(scheme.name());
  report.sample_count = samples;
  report.layers.resize(depth);

  std::vector<Tensor> weights;
  std::vector<Tensor> pre;  // pre-activations, for the ReLU mask
  weights.reserve(depth);
  Tensor x = normal(rng, 0.0, 1.0, Shape{samples, w[0]});
  double var_in = tensor_variance(x);
  for (std::size_t l = 0; l < depth; ++l) {
    const FanPair fans(w[l], w[l + 1]);
    const Shape wshape{w[l + 1], w[l]};
    weights.push_back(sample_weights(scheme, fans, wshape, rng));
    Tensor y = linear(x, weights.back());
    const double var_out = tensor_variance(y);

    auto& rec = report.layers[l];
    rec.layer = l;
    rec.fan_in = fans.fan_in;
    rec.fan_out = fans.fan_out;
    rec.weight_variance_analytic = analytic_variance(scheme, fans);
    rec.weight_variance_measured = tensor_variance(weights.back());
    rec.predicted_forward_ratio =
        static_cast<double>(fans.fan_in) * rec.weight_variance_analytic;
    rec.predicted_backward_ratio =
        static_cast<double>(fans.fan_out) * rec.weight_variance_analytic;
    rec.measured_forward_ratio = ratio(var_out, var_in);
    rec.activation_variance = var_out;

    if (options.relu && l + 1 < depth) {
      pre.push_back(y);
      x = relu(y);
    } else {
      x = std::move(y);
    }
    var_in = tensor_variance(x);
  }

  Tensor grad = normal(rng, 0.0, 1.0, Shape{samples, w[depth]});
  double var_grad = tensor_variance(grad);
  for (std::size_t l = depth; l-- > 0;) {
    // dx = dy W for W (out, in).
    const Tensor& wl = weights[l];
    const std::size_t in = wl.shape()[1], out = wl.shape()[0];
    Tensor dx(Shape{samples, in});
    auto G = grad.data();
    auto W = wl.data();
    auto D = dx.data();
    for (std::size_t s = 0; s < samples; ++s) {
      for (std::size_t o = 0; o < out; ++o) {
        const double g = G[s * out + o];
        for (std::size_t i = 0; i < in; ++i) D[s * in + i] += g * W[o * in + i];
      }
    }
    const double var_dx = tensor_variance(dx);
    report.layers[l].measured_backward_ratio = ratio(var_dx, var_grad);
    report.layers[l].gradient_variance = var_dx;
    if (options.relu && l > 0) {
      auto P = pre[l - 1].data();
      for (std::size_t k = 0; k < D.size(); ++k) {
        if (!(P[k] > 0.0)) D[k] = 0.0;
      }
    }
    grad = std::move(dx);
    var_grad = tensor_variance(grad);
  }
  return report;
}

std::string VarianceReport::to_csv() const {
  std::string out = kVarianceCsvHeader;
  out += '\n';
  for (const auto& r : layers) {
    out += std::to_string(r.layer) + ',' + std::to_string(r.fan_in) + ',' +
           std::to_string(r.fan_out) + ',' +
           format_number(r.predicted_forward_ratio) + ',' +
           format_number(r.measured_forward_ratio) + ',' +
           format_number(r.predicted_backward_ratio) + ',' +
           format_number(r.measured_backward_ratio) + ',' +
           format_number(r.weight_variance_measured) + ',' +
           format_number(r.weight_variance_analytic) + '\n';
  }
  return out;
}

std::string VarianceReport::to_json() const {
  nlohmann::ordered_json j;
  j["scheme"] = scheme;
  j["sample_count"] = sample_count;
  j["layers"] = nlohmann::ordered_json::array();
  for (const auto& r : layers) {
    nlohmann::ordered_json row;
    row["layer"] = r.layer;
    row["fan_in"] = r.fan_in;
    row["fan_out"] = r.fan_out;
    row["pred_fwd"] = r.predicted_forward_ratio;
    row["meas_fwd"] = r.measured_forward_ratio;
    row["pred_bwd"] = r.predicted_backward_ratio;
    row["meas_bwd"] = r.measured_backward_ratio;
    row["var_w_meas"] = r.weight_variance_measured;
    row["var_w_analytic"] = r.weight_variance_analytic;
    row["activation_variance"] = r.activation_variance;
    row["gradient_variance"] = r.gradient_variance;
    j["layers"].push_back(row);
  }
  return j.dump(2) + "\n";
}

VarianceReport VarianceReport::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    VarianceReport report;
    report.scheme = j.at("scheme").get<std::string>();
    report.sample_count = j.at("sample_count").get<std::size_t>();
    for (const auto& row : j.at("layers")) {
      VarianceRecord r;
      r.layer = row.at("layer").get<std::size_t>();
      r.fan_in = row.at("fan_in").get<std::size_t>();
      r.fan_out = row.at("fan_out").get<std::size_t>();
      r.predicted_forward_ratio = row.at("pred_fwd").get<double>();
      r.measured_forward_ratio = row.at("meas_fwd").get<double>();
      r.predicted_backward_ratio = row.at("pred_bwd").get<double>();
      r.measured_backward_ratio = row.at("meas_bwd").get<double>();
      r.weight_variance_measured = row.at("var_w_meas").get<double>();
      r.weight_variance_analytic = row.at("var_w_analytic").get<double>();
      r.activation_variance = row.at("activation_variance").get<double>();
      r.gradient_variance = row.at("gradient_variance").get<double>();
      report.layers.push_back(r);
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("variance report: ") + e.what());
  }
}

}  // namespace initlab
