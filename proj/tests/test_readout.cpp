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

#include "fluxsim/readout.hpp"
#include "fluxsim/units.hpp"
#include "test_support.hpp"

using namespace fluxsim;
using fluxsim::testing::device_readout;
using fluxsim::testing::gauss_tail_quadrature;

TEST_SUITE_BEGIN("readout");

TEST_CASE("photon number: resonance, half-width, extended-precision value") {
  ReadoutConfig cfg = device_readout();

  ReadoutConfig on = cfg;
  on.drive_frequency = on.dressed[1];
  CHECK(photon_number(on, 1) == doctest::Approx(on.photon_number).epsilon(1e-12));

  ReadoutConfig half = cfg;
  half.drive_frequency = half.dressed[1] - half.kappa / 2.0;
  CHECK(photon_number(half, 1) == doctest::Approx(half.photon_number / 2.0).epsilon(1e-12));

  // drive 0.1 MHz below omega_1, long-double reference of the same formula
  long double kappa = cfg.kappa;
  long double delta = cfg.dressed[1] - cfg.drive_frequency;
  long double expected = 2.3L * kappa * kappa / (kappa * kappa + 4.0L * delta * delta);
  CHECK(photon_number(cfg, 1) == doctest::Approx(static_cast<double>(expected)).epsilon(1e-14));

  CHECK(std::abs(cavity_amplitude(cfg, 0)) ==
        doctest::Approx(std::sqrt(photon_number(cfg, 0))).epsilon(1e-12));
}

TEST_CASE("photon number is peaked and symmetric about the dressed frequency") {
  ReadoutConfig cfg = device_readout();
  double peak = cfg.dressed[2];
  double best = -1.0;
  for (int k = -6; k <= 6; ++k) {
    ReadoutConfig probe = cfg;
    probe.drive_frequency = peak + k * kTwoPi * 0.5e6;
    double n = photon_number(probe, 2);
    if (k == 0) best = n;
    CHECK(n <= best + 1e-15);
  }
  for (double off : {0.3e6, 1.1e6, 2.7e6}) {
    ReadoutConfig lo = cfg, hi = cfg;
    lo.drive_frequency = peak - kTwoPi * off;
    hi.drive_frequency = peak + kTwoPi * off;
    CHECK(photon_number(lo, 2) == doctest::Approx(photon_number(hi, 2)).epsilon(1e-12));
  }
}

TEST_CASE("dephasing rate at the operating point and its limits") {
  ReadoutConfig cfg = device_readout();
  CHECK(dephasing_rate(cfg) == doctest::Approx(45.0).epsilon(1e-9));

  ReadoutConfig no_chi = cfg;
  no_chi.dressed[2] = no_chi.dressed[0];  // chi_02 = 0
  CHECK(dephasing_rate(no_chi) == 0.0);

  ReadoutConfig dark = cfg;
  dark.photon_number = 0.0;
  CHECK(dephasing_rate(dark) == 0.0);

  // scales linearly in n
  ReadoutConfig twice = cfg;
  twice.photon_number *= 2.0;
  CHECK(dephasing_rate(twice) == doctest::Approx(2.0 * dephasing_rate(cfg)).epsilon(1e-12));

  // vanishes far off resonance in the bare detuning
  ReadoutConfig far = cfg;
  far.omega_bare = cfg.drive_frequency + kTwoPi * 2e9;
  CHECK(dephasing_rate(far) < 1e-4 * dephasing_rate(cfg));
}

TEST_CASE("dephasing error per check") {
  ReadoutConfig cfg = device_readout();
  CHECK(dephasing_error_per_check(cfg) == doctest::Approx(7.2e-5).epsilon(0.01));

  ReadoutConfig quiet = cfg;
  quiet.photon_number = 0.0;
  CHECK(dephasing_error_per_check(quiet) == 0.0);

  // Gamma_m t = ln 2 -> error 1/2: rescale t_meas accordingly
  ReadoutConfig halfway = cfg;
  halfway.t_meas = std::log(2.0) / dephasing_rate(cfg);
  CHECK(dephasing_error_per_check(halfway) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("separation SNR basics and the discrimination fidelity") {
  ReadoutConfig cfg = device_readout();

  ReadoutConfig same = cfg;
  same.dressed[0] = same.dressed[1];
  CHECK(separation_snr(same, 0, 1) == doctest::Approx(0.0));

  ReadoutConfig faint = cfg;
  faint.efficiency = 1e-10;
  CHECK(separation_snr(faint, 0, 1) < 1e-3);

  // drive on the |1> response; |1> vs |0> midpoint separation
  ReadoutConfig probe = cfg;
  probe.drive_frequency = cfg.dressed[1];
  double fidelity = midpoint_fidelity(probe, 0, 1);
  CHECK(std::abs(fidelity - 0.869) < 0.05);
  CHECK(separation_snr(probe, 0, 1) > 0.0);
}

TEST_CASE("empirical confusion rows") {
  ConfusionMatrix ideal = empirical_confusion(0.0, 0.0);
  CHECK(ideal.p(1, 1) == 1.0);
  CHECK(ideal.p(0, 0) == 1.0);
  CHECK(ideal.p(2, 0) == 1.0);

  ConfusionMatrix device = empirical_confusion(0.049, 0.567);
  CHECK(device.p(1, 0) == doctest::Approx(0.049));
  CHECK(device.p(1, 1) == doctest::Approx(0.951));
  CHECK(device.p(0, 1) == doctest::Approx(0.567));
  CHECK(device.p(2, 1) == doctest::Approx(0.567));

  ConfusionMatrix inverted = empirical_confusion(1.0, 1.0);
  CHECK(inverted.p(1, 0) == 1.0);
  CHECK(inverted.p(0, 1) == 1.0);

  CHECK_THROWS_AS(empirical_confusion(-0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(empirical_confusion(0.0, 1.5), std::invalid_argument);
}

TEST_CASE("symmetric EOL confusion") {
  ConfusionMatrix eol = eol_symmetric_confusion(0.861);
  for (int s = 0; s < 3; ++s) {
    CHECK(eol.p(s, s) == doctest::Approx(0.861));
    double off = 0.0;
    for (int l = 0; l < 3; ++l) {
      if (l != s) off += eol.p(s, l);
    }
    CHECK(off == doctest::Approx(1.0 - 0.861));
  }
}

TEST_CASE("model confusion: identity at infinite separation, midpoint overlap") {
  ReadoutConfig cfg = device_readout();
  cfg.drive_frequency = cfg.dressed[1];

  // enormous integration time drives the separation to infinity
  ReadoutConfig sharp = cfg;
  sharp.t_meas = 1e6;
  auto means_sharp = projected_means(sharp);
  double mid_sharp = 0.5 * (means_sharp[1] + 0.5 * (means_sharp[0] + means_sharp[2]));
  ConfusionMatrix crisp = confusion_from_model(sharp, std::vector<double>{mid_sharp});
  CHECK(crisp.p(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(crisp.p(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(crisp.p(2, 0) == doctest::Approx(1.0).epsilon(1e-12));

  // midpoint threshold between two equal-variance Gaussians at separation d
  auto means = projected_means(cfg);
  double centroid = 0.5 * (means[0] + means[2]);
  double d = means[1] - centroid;
  double midpoint = centroid + 0.5 * d;
  ConfusionMatrix mid = confusion_from_model(cfg, std::vector<double>{midpoint});
  double expected_error = 0.5 * std::erfc(std::abs(d) / (2.0 * std::sqrt(2.0)));
  CHECK(mid.p(1, 0) == doctest::Approx(expected_error).epsilon(1e-9));

  CHECK_THROWS_AS(confusion_from_model(cfg, std::vector<double>{1.0, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("biased threshold: false-negative pinned, false-positive from quadrature") {
  ReadoutConfig cfg = device_readout();
  double threshold = threshold_for_false_negative(cfg, 0.049);
  ConfusionMatrix biased = confusion_from_model(cfg, std::vector<double>{threshold});
  CHECK(biased.p(1, 0) == doctest::Approx(0.049).epsilon(1e-6));

  auto means = projected_means(cfg);
  double fp0_oracle = gauss_tail_quadrature(threshold, means[0]);
  double fp2_oracle = gauss_tail_quadrature(threshold, means[2]);
  CHECK(biased.p(0, 1) == doctest::Approx(fp0_oracle).epsilon(1e-6));
  CHECK(biased.p(2, 1) == doctest::Approx(fp2_oracle).epsilon(1e-6));

  for (int s = 0; s < 3; ++s) {
    CHECK(biased.p(s, 0) + biased.p(s, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("threshold motion trades false positives for false negatives") {
  ReadoutConfig cfg = device_readout();
  auto means = projected_means(cfg);
  double centroid = 0.5 * (means[0] + means[2]);
  double prev_fp = 1.0, prev_fn = -1.0;
  for (double f : {0.2, 0.4, 0.6, 0.8}) {
    double threshold = centroid + f * (means[1] - centroid);
    ConfusionMatrix c = confusion_from_model(cfg, std::vector<double>{threshold});
    CHECK(c.p(0, 1) < prev_fp);
    CHECK(c.p(1, 0) > prev_fn);
    prev_fp = c.p(0, 1);
    prev_fn = c.p(1, 0);
  }
}

TEST_CASE("qnd error estimator") {
  CHECK(qnd_error(1.0, 1.0, 29) == 0.0);
  // frozen extended-precision reference for (0.97, 0.97, 29)
  CHECK(std::abs(qnd_error(0.97, 0.97, 29) - 1.0497661091e-3) < 1e-6);
  CHECK(qnd_error(0.81, 0.81, 1) == doctest::Approx(0.19).epsilon(1e-12));
  CHECK_THROWS_AS(qnd_error(0.9, 0.9, 0), std::invalid_argument);

  // monotone: better survival -> smaller error; fewer checks -> larger error
  CHECK(qnd_error(0.98, 0.98, 29) < qnd_error(0.95, 0.95, 29));
  CHECK(qnd_error(0.97, 0.97, 5) > qnd_error(0.97, 0.97, 29));
}

TEST_CASE("backaction calibration tracks the actual photon number") {
  ReadoutConfig cfg = device_readout();
  BackactionModel model = calibrate_backaction(cfg, 1e-3);
  double mean_comp = 0.5 * (model.kick_probability(cfg, 0) + model.kick_probability(cfg, 2));
  CHECK(mean_comp == doctest::Approx(1e-3).epsilon(1e-12));

  // kick probability per state peaks when driving that state's resonance
  for (int s = 0; s < 3; ++s) {
    ReadoutConfig on = cfg;
    on.drive_frequency = cfg.dressed[s];
    ReadoutConfig off = cfg;
    off.drive_frequency = cfg.dressed[s] + kTwoPi * 2e6;
    CHECK(model.kick_probability(on, s) > model.kick_probability(off, s));
  }
}

TEST_SUITE_END();
