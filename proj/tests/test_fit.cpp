// Copyright 2026 The fluxsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <vector>

#include "fluxsim/fit.hpp"
#include "fluxsim/rng.hpp"
#include "fluxsim/units.hpp"
#include "test_support.hpp"

using namespace fluxsim;
using fluxsim::testing::device_rates;
using fluxsim::testing::device_readout;

namespace {

DecayDataset synthesize_decay(const RateMatrix& rates, int points, double t_max,
                              double noise_sigma, std::uint64_t seed) {
  DecayDataset data;
  RngStream rng(seed, 0);
  for (int series = 0; series < 2; ++series) {
    PopulationState init = series == 0 ? PopulationState{0, 1, 0} : PopulationState{0, 0, 1};
    auto& out = series == 0 ? data.init1 : data.init2;
    for (int k = 1; k <= points; ++k) {
      double t = t_max * k / points;
      PopulationState s = evolve_populations(rates, init, t);
      DecayPoint pt;
      pt.t = t;
      pt.p0 = std::clamp(s.p0 + noise_sigma * rng.normal(), 0.0, 1.0);
      pt.p1 = std::clamp(s.p1 + noise_sigma * rng.normal(), 0.0, 1.0);
      pt.p2 = std::clamp(s.p2 + noise_sigma * rng.normal(), 0.0, 1.0);
      pt.sigma = noise_sigma;
      out.push_back(pt);
    }
  }
  return data;
}

}  // namespace

TEST_SUITE_BEGIN("fit");

TEST_CASE("noiseless rate recovery is exact to 1e-6") {
  RateMatrix truth{kTwoPi * 1.1e3, kTwoPi * 0.7e3, kTwoPi * 0.35e3, kTwoPi * 1.4e3};
  DecayDataset data = synthesize_decay(truth, 14, 350e-6, 0.0, 5);
  RateMatrix guess{kTwoPi * 2e3, kTwoPi * 0.4e3, kTwoPi * 0.2e3, kTwoPi * 2e3};
  FitResult fit = fit_rates(data, guess);
  REQUIRE(fit.converged);
  CHECK(fit.parameter("g10") == doctest::Approx(truth.g10).epsilon(1e-6));
  CHECK(fit.parameter("g12") == doctest::Approx(truth.g12).epsilon(1e-6));
  CHECK(fit.parameter("g20") == doctest::Approx(truth.g20).epsilon(1e-6));
  CHECK(fit.parameter("g21") == doctest::Approx(truth.g21).epsilon(1e-6));
  for (bool flag : fit.unidentifiable) CHECK_FALSE(flag);
}

TEST_CASE("noisy joint fit recovers identifiable rates, flags g20 at zero") {
  RateMatrix truth = device_rates();  // g20 = 0
  DecayDataset data = synthesize_decay(truth, 16, 400e-6, 0.02, 11);
  RateMatrix guess{kTwoPi * 1e3, kTwoPi * 1e3, kTwoPi * 0.1e3, kTwoPi * 1e3};
  FitResult fit = fit_rates(data, guess);
  REQUIRE(fit.converged);
  CHECK(fit.parameter("g10") == doctest::Approx(truth.g10).epsilon(0.10));
  CHECK(fit.parameter("g12") == doctest::Approx(truth.g12).epsilon(0.10));
  CHECK(fit.parameter("g21") == doctest::Approx(truth.g21).epsilon(0.10));
  // the direct 2->0 rate cannot be extracted when it is truly zero
  CHECK(fit.is_unidentifiable("g20"));
  CHECK(fit.standard_error("g20") > fit.parameter("g20"));
}

TEST_CASE("linear and log parameterizations agree on well-identified problems") {
  RateMatrix truth{kTwoPi * 1.3e3, kTwoPi * 0.9e3, kTwoPi * 0.5e3, kTwoPi * 1.1e3};
  DecayDataset data = synthesize_decay(truth, 12, 300e-6, 0.0, 17);
  RateMatrix guess{kTwoPi * 1e3, kTwoPi * 1e3, kTwoPi * 0.4e3, kTwoPi * 1e3};
  FitResult log_fit = fit_rates(data, guess, RateParameterization::kLog);
  FitResult lin_fit = fit_rates(data, guess, RateParameterization::kLinear);
  REQUIRE(log_fit.converged);
  REQUIRE(lin_fit.converged);
  for (const char* name : {"g10", "g12", "g20", "g21"}) {
    CHECK(log_fit.parameter(name) == doctest::Approx(lin_fit.parameter(name)).epsilon(1e-6));
  }
}

TEST_CASE("accepted residuals never increase") {
  RateMatrix truth = device_rates();
  DecayDataset data = synthesize_decay(truth, 12, 300e-6, 0.01, 23);
  FitResult fit = fit_rates(data, RateMatrix{8e3, 4e3, 1e2, 9e3});
  REQUIRE(fit.cost_history.size() > 2);
  for (std::size_t i = 1; i < fit.cost_history.size(); ++i) {
    CHECK(fit.cost_history[i] <= fit.cost_history[i - 1] * (1.0 + 1e-15));
  }
}

TEST_CASE("dataset validation") {
  DecayDataset bad;
  bad.init1.push_back(DecayPoint{1e-6, 0.6, 0.6, 0.6, 0.0});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  DecayDataset short_series = synthesize_decay(device_rates(), 4, 100e-6, 0.0, 3);
  CHECK_THROWS_AS(fit_rates(short_series, device_rates()), std::invalid_argument);
}

TEST_CASE("dephasing fit: noiseless and noisy recovery") {
  ReadoutConfig fixed = device_readout();
  double true_bare = fixed.omega_bare;
  double true_residual = 1.2e4;

  std::vector<DephasingPoint> clean;
  RngStream rng(77, 0);
  for (double n : {0.8, 1.6, 2.6}) {
    for (int k = 0; k < 8; ++k) {
      DephasingPoint pt;
      pt.photon_number = n;
      pt.drive_frequency = fixed.drive_frequency + kTwoPi * 1e6 * (-9.0 + 2.5 * k);
      ReadoutConfig cfg = fixed;
      cfg.photon_number = n;
      cfg.drive_frequency = pt.drive_frequency;
      pt.gamma_phi = dephasing_rate(cfg) + true_residual;
      clean.push_back(pt);
    }
  }

  FitResult exact = fit_dephasing(clean, fixed);
  REQUIRE(exact.converged);
  CHECK(exact.parameter("gamma_phi_residual") == doctest::Approx(true_residual).epsilon(1e-8));
  CHECK(exact.parameter("omega_bare") == doctest::Approx(true_bare).epsilon(1e-8));

  std::vector<DephasingPoint> noisy = clean;
  for (auto& pt : noisy) {
    pt.sigma = 0.05 * pt.gamma_phi;
    pt.gamma_phi += pt.sigma * rng.normal();
  }
  FitResult fit = fit_dephasing(noisy, fixed);
  REQUIRE(fit.converged);
  CHECK(fit.parameter("gamma_phi_residual") == doctest::Approx(true_residual).epsilon(0.03));
  CHECK(fit.parameter("omega_bare") == doctest::Approx(true_bare).epsilon(0.03));
  // the physically meaningful scale: recovered bare detuning from the drive
  CHECK(std::abs(fit.parameter("omega_bare") - true_bare) <
        0.25 * std::abs(true_bare - fixed.drive_frequency));
}

TEST_CASE("dephasing fit: zero chi_02 leaves the bare frequency unidentifiable") {
  ReadoutConfig fixed = device_readout();
  fixed.dressed[2] = fixed.dressed[0];  // chi_02 = 0 -> Gamma_m = 0
  std::vector<DephasingPoint> data;
  for (double n : {1.0, 2.0}) {
    for (int k = 0; k < 4; ++k) {
      data.push_back(DephasingPoint{n, fixed.drive_frequency + kTwoPi * 1e6 * k, 5.0e3, 0.0});
    }
  }
  FitResult fit = fit_dephasing(data, fixed);
  REQUIRE(fit.converged);
  CHECK(fit.parameter("gamma_phi_residual") == doctest::Approx(5.0e3).epsilon(1e-6));
  CHECK(fit.is_unidentifiable("omega_bare"));
}

TEST_CASE("exponential fit: exact, noisy, constant") {
  std::vector<XyPoint> exact;
  for (int k = 0; k < 10; ++k) {
    double t = 30e-6 * k;
    exact.push_back(XyPoint{t, std::exp(-t / 100e-6)});
  }
  FitResult fit = fit_exponential(exact);
  REQUIRE(fit.converged);
  CHECK(fit.parameter("t_decay") == doctest::Approx(100e-6).epsilon(1e-9));
  CHECK(fit.parameter("amplitude") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(fit.parameter("offset")) < 1e-9);

  RngStream rng(31, 0);
  std::vector<XyPoint> noisy = exact;
  for (auto& pt : noisy) pt.y += 0.01 * rng.normal();
  FitResult noisy_fit = fit_exponential(noisy);
  REQUIRE(noisy_fit.converged);
  CHECK(noisy_fit.parameter("t_decay") == doctest::Approx(100e-6).epsilon(0.03));

  std::vector<XyPoint> flat;
  for (int k = 0; k < 8; ++k) flat.push_back(XyPoint{k * 1e-6, 0.37});
  FitResult flat_fit = fit_exponential(flat);
  CHECK(flat_fit.has_flag("non_decaying"));

  CHECK_THROWS_AS(fit_exponential(std::vector<XyPoint>{{0, 1}, {1, 0.5}}), std::invalid_argument);
}

TEST_CASE("ramsey fit: exact and noisy recovery") {
  const double t2 = 70.4e-6;
  const double detuning = kTwoPi * 50e3;
  std::vector<XyPoint> exact;
  for (int k = 0; k < 60; ++k) {
    double t = k * 2.0e-6;
    exact.push_back(XyPoint{t, 0.5 + 0.5 * std::exp(-t / t2) * std::cos(detuning * t)});
  }
  FitResult fit = fit_ramsey(exact);
  REQUIRE(fit.converged);
  CHECK(fit.parameter("t2") == doctest::Approx(t2).epsilon(1e-6));
  CHECK(std::abs(fit.parameter("detuning")) == doctest::Approx(detuning).epsilon(1e-6));
  CHECK(fit.parameter("offset") == doctest::Approx(0.5).epsilon(1e-6));

  RngStream rng(41, 0);
  std::vector<XyPoint> noisy = exact;
  for (auto& pt : noisy) pt.y += 0.02 * rng.normal();
  FitResult noisy_fit = fit_ramsey(noisy);
  REQUIRE(noisy_fit.converged);
  CHECK(noisy_fit.parameter("t2") == doctest::Approx(t2).epsilon(0.05));
}

TEST_CASE("ramsey fit flags zero contrast and aliased detuning") {
  RngStream rng(43, 0);
  std::vector<XyPoint> flat;
  for (int k = 0; k < 20; ++k) flat.push_back(XyPoint{k * 2e-6, 0.5 + 1e-12 * rng.normal()});
  FitResult flat_fit = fit_ramsey(flat);
  CHECK(flat_fit.has_flag("zero_contrast"));
  CHECK(flat_fit.is_unidentifiable("t2"));

  // a handful of finely spaced points pin a detuning beyond the Nyquist rate
  // of the (much coarser) median spacing
  const double detuning = kTwoPi * 2.0e5;
  std::vector<XyPoint> uneven;
  for (int k = 0; k < 10; ++k) {
    double t = k * 4e-6;
    uneven.push_back(XyPoint{t, 0.5 + 0.4 * std::cos(detuning * t)});
    double t_fine = t + 0.5e-6;
    uneven.push_back(XyPoint{t_fine, 0.5 + 0.4 * std::cos(detuning * t_fine)});
  }
  FitResult aliased = fit_ramsey(uneven);
  REQUIRE(aliased.converged);
  CHECK(aliased.has_flag("aliased_detuning"));

  std::vector<XyPoint> too_few(5, XyPoint{0, 0.5});
  CHECK_THROWS_AS(fit_ramsey(too_few), std::invalid_argument);
}

TEST_SUITE_END();
