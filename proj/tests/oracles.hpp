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

// Reference implementations used by the tests. None of these call into the
// library's numeric kernels; they are written as plainly as possible.

#ifndef INITLAB_TESTS_ORACLES_HPP
#define INITLAB_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "initlab/nn.hpp"
#include "initlab/tensor.hpp"

namespace oracle {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

// Two-pass in long double.
inline Moments moments(std::span<const double> v) {
  long double sum = 0.0L;
  for (double x : v) sum += x;
  const long double mean = sum / static_cast<long double>(v.size());
  long double ss = 0.0L;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {static_cast<double>(mean),
          static_cast<double>(ss / static_cast<long double>(v.size() - 1))};
}

// Moments of U(lo, hi) recovered from a fine histogram: each sample is
// replaced by its bin centre, then the exact Sheppard correction h^2/12 is
// added back to the variance.
inline Moments histogram_moments(std::span<const double> v, double lo, double hi,
                                 std::size_t bins) {
  std::vector<std::size_t> counts(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double x : v) {
    auto b = static_cast<std::size_t>((x - lo) / width);
    counts[std::min(b, bins - 1)]++;
  }
  long double n = 0.0L, s = 0.0L, s2 = 0.0L;
  for (std::size_t b = 0; b < bins; ++b) {
    const long double c = lo + (static_cast<double>(b) + 0.5) * width;
    n += counts[b];
    s += counts[b] * c;
    s2 += counts[b] * c * c;
  }
  const long double mean = s / n;
  const long double var = s2 / n - mean * mean + width * width / 12.0L;
  return {static_cast<double>(mean), static_cast<double>(var)};
}

// Pearson statistic of samples against a CDF over equal-probability bins.
inline double chi_square(std::span<const double> v, const std::function<double(double)>& cdf,
                         std::size_t bins) {
  std::vector<double> counts(bins, 0.0);
  for (double x : v) {
    auto b = static_cast<std::size_t>(cdf(x) * static_cast<double>(bins));
    counts[std::min(b, bins - 1)] += 1.0;
  }
  const double expected = static_cast<double>(v.size()) / static_cast<double>(bins);
  double chi = 0.0;
  for (double c : counts) chi += (c - expected) * (c - expected) / expected;
  return chi;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Upper critical value of chi-square with k dof at roughly the 1e-4 level
// (Wilson-Hilferty with z = 3.72).
inline double chi_square_critical(double k) {
  const double z = 3.72;
  const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  return k * t * t * t;
}

// y[n][o] = sum_i x[n][i] * w[o][i] + b[o]
inline std::vector<double> dense(const std::vector<double>& x, std::size_t batch,
                                 const std::vector<double>& w,
                                 const std::vector<double>& b, std::size_t in,
                                 std::size_t out) {
  std::vector<double> y(batch * out);
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      for (std::size_t i = 0; i < in; ++i) acc += x[n * in + i] * w[o * in + i];
      y[n * out + o] = acc;
    }
  }
  return y;
}

// Direct cross-correlation on one (C, H, W) sample.
inline std::vector<double> conv(const std::vector<double>& x, std::size_t c, std::size_t h,
                                std::size_t w, const std::vector<double>& k, std::size_t o,
                                std::size_t kh, std::size_t kw, std::size_t stride,
                                std::size_t pad, std::size_t& oh, std::size_t& ow) {
  oh = (h + 2 * pad - kh) / stride + 1;
  ow = (w + 2 * pad - kw) / stride + 1;
  std::vector<double> y(o * oh * ow, 0.0);
  for (std::size_t oc = 0; oc < o; ++oc) {
    for (std::size_t r = 0; r < oh; ++r) {
      for (std::size_t s = 0; s < ow; ++s) {
        double acc = 0.0;
        for (std::size_t ic = 0; ic < c; ++ic) {
          for (std::size_t u = 0; u < kh; ++u) {
            for (std::size_t v = 0; v < kw; ++v) {
              const long long yy = static_cast<long long>(r * stride + u) - static_cast<long long>(pad);
              const long long xx = static_cast<long long>(s * stride + v) - static_cast<long long>(pad);
              if (yy < 0 || xx < 0 || yy >= static_cast<long long>(h) ||
                  xx >= static_cast<long long>(w)) {
                continue;
              }
              acc += x[(ic * h + yy) * w + xx] * k[((oc * c + ic) * kh + u) * kw + v];
            }
          }
        }
        y[(oc * oh + r) * ow + s] = acc;
      }
    }
  }
  return y;
}

inline void fill_normal(initlab::Tensor& t, std::mt19937_64& gen, double sigma = 1.0) {
  std::normal_distribution<double> d(0.0, sigma);
  for (double& v : t.data()) v = d(gen);
}

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

// Relative error with a floor on the denominator so that gradients that are
// zero on both sides count as agreement.
inline double rel_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

// Central differences of `loss(network)` against `analytic` for every
// parameter and every input entry.
inline GradCheck finite_difference(initlab::Network& net, initlab::Tensor& input,
                                   const std::function<double()>& loss,
                                   const initlab::Gradients& analytic, double h = 1e-5) {
  GradCheck out;
  auto probe = [&](double& slot, double g) {
    const double saved = slot;
    slot = saved + h;
    const double up = loss();
    slot = saved - h;
    const double down = loss();
    slot = saved;
    const double numeric = (up - down) / (2.0 * h);
    out.max_rel_error = std::max(out.max_rel_error, rel_error(g, numeric));
    out.checked++;
  };
  for (std::size_t l = 0; l < net.size(); ++l) {
    auto& p = net.params()[l];
    if (!p.has_params()) continue;
    for (std::size_t i = 0; i < p.weight.size(); ++i) {
      probe(p.weight[i], analytic.params[l].weight[i]);
    }
    for (std::size_t i = 0; i < p.bias.size(); ++i) {
      probe(p.bias[i], analytic.params[l].bias[i]);
    }
  }
  for (std::size_t i = 0; i < input.size(); ++i) probe(input[i], analytic.input[i]);
  return out;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("initlab_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace oracle

#endif  // INITLAB_TESTS_ORACLES_HPP
