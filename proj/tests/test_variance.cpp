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

#include "initlab/error.hpp"
#include "initlab/variance.hpp"

using namespace initlab;

TEST_CASE("forward probe for xavier at 100x100") {
  RngStream rng(1, 0);
  const auto r = probe_forward(InitScheme::xavier(), FanPair(100, 100), 100000, rng);
  CHECK(r.predicted_ratio == doctest::Approx(1.0));
  CHECK(within_law(r.measured_ratio, r.predicted_ratio));
  CHECK(r.weight_variance_measured == doctest::Approx(0.01).epsilon(0.02));
}

TEST_CASE("forward probe for proposed at 100x100") {
  RngStream rng(2, 0);
  const auto r = probe_forward(InitScheme::proposed(), FanPair(100, 100), 100000, rng);
  const double bound = std::sqrt(0.02) + std::sqrt(0.01);
  CHECK(r.predicted_ratio == doctest::Approx(100.0 * bound * bound / 3.0).epsilon(1e-12));
  CHECK(r.predicted_ratio == doctest::Approx(1.9428).epsilon(1e-4));
  CHECK(within_law(r.measured_ratio, r.predicted_ratio));
}

TEST_CASE("backward probe for he at 64x128") {
  RngStream rng(3, 1);
  const auto r = probe_backward(InitScheme::he(), FanPair(64, 128), 100000, rng);
  CHECK(r.predicted_ratio == doctest::Approx(4.0));
  CHECK(within_law(r.measured_ratio, r.predicted_ratio));
}

TEST_CASE("backward probe for proposed at 64x64") {
  RngStream rng(4, 1);
  const auto r = probe_backward(InitScheme::proposed(), FanPair(64, 64), 100000, rng);
  const double bound = std::sqrt(2.0 / 64.0) + std::sqrt(2.0 / 128.0);
  CHECK(r.predicted_ratio == doctest::Approx(64.0 * bound * bound / 3.0).epsilon(1e-12));
  CHECK(within_law(r.measured_ratio, r.predicted_ratio));
}

TEST_CASE("all-zero weights give exactly zero") {
  RngStream rng(5, 0);
  const auto f = probe_forward(InitScheme::zeros(), FanPair(30, 70), 10000, rng);
  const auto b = probe_backward(InitScheme::zeros(), FanPair(30, 70), 10000, rng);
  CHECK(f.measured_ratio == 0.0);
  CHECK(b.measured_ratio == 0.0);
  CHECK(within_law(f.measured_ratio, f.predicted_ratio));
}

TEST_CASE("probes demand enough samples") {
  RngStream rng(5, 0);
  CHECK_THROWS_AS(probe_forward(InitScheme::he(), FanPair(3, 3), 100, rng), InvalidArgument);
}

TEST_CASE("square layers under proposed amplify by a fixed constant") {
  const double c = (std::sqrt(2.0) + 1.0) * (std::sqrt(2.0) + 1.0) / 3.0;
  CHECK(c == doctest::Approx(1.942809).epsilon(1e-7));
  for (std::size_t n : {16u, 64u, 256u}) {
    const double predicted =
        static_cast<double>(n) * analytic_variance(InitScheme::proposed(), FanPair(n, n));
    CHECK(std::abs(predicted - c) < 1e-9);
  }
}

TEST_CASE("within_law band") {
  CHECK(within_law(1.04, 1.0));
  CHECK(within_law(0.96, 1.0));
  CHECK_FALSE(within_law(1.06, 1.0));
  CHECK_FALSE(within_law(0.1, 0.0));
  CHECK(within_law(0.0, 0.0));
}

TEST_CASE("xavier stays stable through ten square layers") {
  RngStream rng(6, 0);
  const auto r = depth_sweep(InitScheme::xavier(), {100}, 10, 4000, rng);
  REQUIRE(r.layers.size() == 10);
  const double v = r.layers.back().activation_variance;
  CHECK(v >= 0.5);
  CHECK(v <= 2.0);
  for (const auto& rec : r.layers) CHECK(rec.predicted_forward_ratio == doctest::Approx(1.0));
}

TEST_CASE("standard normal explodes within five layers") {
  RngStream rng(7, 0);
  const auto r = depth_sweep(InitScheme::standard_normal(), {100}, 5, 2000, rng);
  CHECK(r.layers.back().activation_variance >= 1e6);
}

TEST_CASE("depth sweep accepts explicit widths") {
  RngStream rng(8, 0);
  const auto r = depth_sweep(InitScheme::he(), {20, 40, 10}, 2, 2000, rng);
  REQUIRE(r.layers.size() == 2);
  CHECK(r.layers[0].fan_in == 20);
  CHECK(r.layers[0].fan_out == 40);
  CHECK(r.layers[1].fan_in == 40);
  CHECK(r.layers[1].fan_out == 10);
  CHECK_THROWS_AS(depth_sweep(InitScheme::he(), {20, 40}, 2, 2000, rng), InvalidArgument);
}

TEST_CASE("relu sweep halves the he forward gain") {
  RngStream rng(9, 0);
  const auto r = depth_sweep(InitScheme::he(), {200}, 6, 4000, rng, {true});
  const double v = r.layers.back().activation_variance;
  CHECK(v > 0.3);
  CHECK(v < 3.0);
}

TEST_CASE("report serialisation") {
  const VarianceReport r = probe_report(InitScheme::proposed(), FanPair(2, 2), 20000, 1);
  REQUIRE(r.layers.size() == 1);
  CHECK(r.layers[0].predicted_forward_ratio == doctest::Approx(2.0 * 1.70711 * 1.70711 / 3.0).epsilon(1e-5));
  CHECK(r.layers[0].weight_variance_analytic ==
        doctest::Approx(proposed_bound(FanPair(2, 2)) * proposed_bound(FanPair(2, 2)) / 3.0));
  const std::string csv = r.to_csv();
  CHECK(csv.rfind(std::string(kVarianceCsvHeader) + "\n", 0) == 0);
  CHECK(VarianceReport::from_json(r.to_json()) == r);
  CHECK_THROWS_AS(VarianceReport::from_json("{"), IoError);
  CHECK(probe_report(InitScheme::proposed(), FanPair(2, 2), 20000, 1).to_json() == r.to_json());
}
