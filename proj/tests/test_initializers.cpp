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

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

#include "initlab/error.hpp"
#include "initlab/initializers.hpp"

using namespace initlab;

TEST_CASE("fans of dense and conv weights") {
  CHECK(compute_fans(Shape{4, 3}) == FanPair(3, 4));
  CHECK(compute_fans(Shape{16, 3, 3, 3}) == FanPair(27, 144));
  CHECK(compute_fans(Shape{8, 2, 5, 1}) == FanPair(10, 40));
  CHECK_THROWS_AS(compute_fans(Shape{7}), UnsupportedLayer);
  CHECK_THROWS_AS(compute_fans(Shape{2, 2, 2}), UnsupportedLayer);
  CHECK_THROWS_AS(FanPair(0, 3), InvalidArgument);
}

TEST_CASE("proposed bound by hand") {
  CHECK(proposed_bound(FanPair(2, 2)) == doctest::Approx(1.7071067811865475).epsilon(1e-15));
  CHECK(std::abs(proposed_bound(FanPair(2, 2)) - (1.0 + std::sqrt(0.5))) < 1e-12);
  CHECK(proposed_bound(FanPair(512, 10)) == doctest::Approx(0.1243983).epsilon(1e-6));
  CHECK(std::abs(proposed_bound(FanPair(512, 10)) -
                 (std::sqrt(2.0 / 512.0) + std::sqrt(2.0 / 522.0))) < 1e-12);
  CHECK(proposed_bound(FanPair(1, 1)) == doctest::Approx(2.4142135623).epsilon(1e-10));
  CHECK(proposed_bound(FanPair(27, 144)) == doctest::Approx(0.38031).epsilon(1e-4));
}

TEST_CASE("proposed bound shrinks as either fan grows") {
  for (std::size_t n = 1; n < 300; n += 7) {
    for (std::size_t m = 1; m < 300; m += 11) {
      const double b = proposed_bound(FanPair(n, m));
      CHECK(proposed_bound(FanPair(n + 1, m)) < b);
      CHECK(proposed_bound(FanPair(n, m + 1)) < b);
      // Always wider than the first term alone.
      CHECK(b > std::sqrt(2.0 / static_cast<double>(n)));
    }
  }
}

TEST_CASE("analytic variances") {
  const FanPair f(100, 100);
  CHECK(analytic_variance(InitScheme::xavier(), f) == doctest::Approx(0.01));
  CHECK(analytic_variance(InitScheme::he(), f) == doctest::Approx(0.02));
  CHECK(analytic_variance(InitScheme::lecun(), f) == doctest::Approx(0.01));
  CHECK(analytic_variance(InitScheme::proposed_normal(), f) == doctest::Approx(0.01));
  CHECK(analytic_variance(InitScheme::standard_normal(), f) == 1.0);
  CHECK(analytic_variance(InitScheme::zeros(), f) == 0.0);
  CHECK(analytic_variance(InitScheme::constant(0.3), f) == 0.0);
  CHECK(analytic_variance(InitScheme::random_uniform(0.3), f) == doctest::Approx(0.03));
  const double b = std::sqrt(0.02) + std::sqrt(0.01);
  CHECK(analytic_variance(InitScheme::proposed(), f) == doctest::Approx(b * b / 3.0));
  CHECK(analytic_mean(InitScheme::constant(0.3)) == 0.3);
  CHECK(analytic_mean(InitScheme::proposed()) == 0.0);
}

TEST_CASE("scheme names round trip") {
  CHECK(scheme_names().size() == 9);
  for (const auto& name : scheme_names()) CHECK(parse_scheme(name).name() == name);
  CHECK(parse_scheme("constant", 0.7).parameter() == 0.7);
  CHECK(parse_scheme("random", 0.1, 0.2).parameter() == 0.2);
  try {
    parse_scheme("bogus");
    FAIL("expected InvalidArgument");
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    for (const auto& name : scheme_names()) CHECK(msg.find(name) != std::string::npos);
  }
}

TEST_CASE("zeros and constant are deterministic") {
  RngStream rng(1, 0);
  const Tensor z = sample_weights(InitScheme::zeros(), FanPair(3, 3), Shape{3, 3}, rng);
  CHECK(z == Tensor(Shape{3, 3}, 0.0));
  const Tensor c = sample_weights(InitScheme::constant(), FanPair(3, 3), Shape{3, 3}, rng);
  CHECK(c == Tensor(Shape{3, 3}, 0.1));
}

TEST_CASE("sample_weights checks the fans") {
  RngStream rng(1, 0);
  CHECK_THROWS_AS(sample_weights(InitScheme::xavier(), FanPair(3, 4), Shape{3, 4}, rng),
                  ShapeMismatch);
}

TEST_CASE("proposed uniform variance at 128x64") {
  RngStream rng(1, 0);
  const FanPair f(128, 64);
  const Tensor t = sample_distribution(InitScheme::proposed(), f, Shape{1000000}, rng);
  const double bound = std::sqrt(2.0 / 128.0) + std::sqrt(2.0 / 192.0);
  const auto m = oracle::moments(t.data());
  CHECK(std::abs(m.variance / (bound * bound / 3.0) - 1.0) <= 0.02);
  for (double v : t.data()) {
    REQUIRE(v >= -bound);
    REQUIRE(v <= bound);
  }
  // Shape of the distribution, not only its second moment.
  const double chi = oracle::chi_square(
      t.data(), [&](double x) { return (x + bound) / (2.0 * bound); }, 64);
  CHECK(chi < oracle::chi_square_critical(63));
}

TEST_CASE("xavier variance at 100x100") {
  RngStream rng(2, 0);
  const Tensor t =
      sample_distribution(InitScheme::xavier(), FanPair(100, 100), Shape{1000000}, rng);
  const auto m = oracle::moments(t.data());
  CHECK(std::abs(m.variance / 0.01 - 1.0) <= 0.02);
  const double limit = std::sqrt(6.0 / 200.0);
  for (double v : t.data()) REQUIRE(std::abs(v) <= limit);
}

TEST_CASE("normal schemes match their sigma") {
  const FanPair f(64, 32);
  for (const auto& s : {InitScheme::he(), InitScheme::lecun(), InitScheme::proposed_normal()}) {
    RngStream rng(3, 0);
    const Tensor t = sample_distribution(s, f, Shape{200000}, rng);
    const double sigma = scale_parameter(s, f);
    CHECK(sigma * sigma == doctest::Approx(analytic_variance(s, f)));
    const double chi = oracle::chi_square(
        t.data(), [&](double x) { return oracle::normal_cdf(x / sigma); }, 50);
    CHECK(chi < oracle::chi_square_critical(49));
  }
}

namespace {

Network dense_relu_dense() {
  Network net(Shape{5}, {Dense{5, 4}, ReLU{}, Dense{4, 3}});
  for (std::size_t l : {0u, 2u}) net.params()[l].bias.fill(0.25);
  return net;
}

}  // namespace

TEST_CASE("zeros initializer leaves biases alone") {
  const Network net = apply_initializer(dense_relu_dense(), InitScheme::zeros(), 1);
  for (std::size_t l : {0u, 2u}) {
    for (double w : net.params()[l].weight.data()) CHECK(w == 0.0);
    for (double b : net.params()[l].bias.data()) CHECK(b == 0.25);
  }
  CHECK(!net.params()[1].has_params());
}

TEST_CASE("apply_initializer is deterministic per seed") {
  const Network a = apply_initializer(dense_relu_dense(), InitScheme::proposed(), 9);
  const Network b = apply_initializer(dense_relu_dense(), InitScheme::proposed(), 9);
  const Network c = apply_initializer(dense_relu_dense(), InitScheme::proposed(), 10);
  for (std::size_t l : {0u, 2u}) {
    CHECK(a.params()[l].weight == b.params()[l].weight);
    CHECK(a.params()[l].weight != c.params()[l].weight);
  }
  // Distinct layers draw from distinct streams.
  CHECK(a.params()[0].weight[0] != a.params()[2].weight[0]);
}

TEST_CASE("proposed conv weights stay inside the bound") {
  Network net(Shape{3, 8, 8}, {Conv2d{3, 16, 3, 3}});
  net = apply_initializer(std::move(net), InitScheme::proposed(), 4);
  const double bound = std::sqrt(2.0 / 27.0) + std::sqrt(2.0 / 171.0);
  CHECK(bound == doctest::Approx(0.38031).epsilon(1e-4));
  const auto& w = net.params()[0].weight;
  double max_abs = 0.0;
  for (double v : w.data()) max_abs = std::max(max_abs, std::abs(v));
  CHECK(max_abs <= bound);
  CHECK(max_abs < 0.4306);
  // 432 draws from U(-b, b): the extremes get close to the edge.
  CHECK(max_abs > 0.9 * bound);
}
