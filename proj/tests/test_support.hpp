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

#ifndef FLUXSIM_TESTS_TEST_SUPPORT_HPP
#define FLUXSIM_TESTS_TEST_SUPPORT_HPP

#include <Eigen/Dense>
#include <cmath>

#include "fluxsim/dynamics.hpp"
#include "fluxsim/readout.hpp"
#include "fluxsim/spectrum.hpp"
#include "fluxsim/units.hpp"

namespace fluxsim::testing {

// Measured device values used as shared fixtures across the suites.
inline CircuitParams device_circuit() {
  CircuitParams p;
  p.e_c = kTwoPi * 1.72e9;
  p.e_j = kTwoPi * 7.07e9;
  p.e_l = kTwoPi * 0.32e9;
  p.phi_ext = 0.0;
  p.basis_size = 120;
  return p;
}

inline RateMatrix device_rates() {
  return RateMatrix{kTwoPi * 1.22e3, kTwoPi * 0.88e3, 0.0, kTwoPi * 1.21e3};
}

// Dressed frequencies consistent with chi_01 = -2pi x 4.096 MHz and
// chi_02 = -2pi x 147 kHz around the 6.993 GHz operating point; omega_bare is
// the fit-consistent value that puts the subspace dephasing rate at 45 1/s.
inline ReadoutConfig device_readout() {
  ReadoutConfig cfg;
  cfg.kappa = kTwoPi * 1.02e6;
  cfg.drive_frequency = kTwoPi * 6.993e9;
  cfg.dressed[1] = cfg.drive_frequency + kTwoPi * 0.1e6;
  cfg.dressed[0] = cfg.dressed[1] - kTwoPi * 4.096e6;
  cfg.dressed[2] = cfg.dressed[0] + kTwoPi * 0.147e6;
  cfg.omega_bare = kTwoPi * 7.000656951085086e9;
  cfg.efficiency = 0.298;
  cfg.photon_number = 2.3;
  cfg.t_meas = 1.6e-6;
  return cfg;
}

// Independent fine-step RK4 integration of dP/dt = G P, used as the oracle
// for the matrix-exponential propagator.
inline PopulationState integrate_populations_rk4(const RateMatrix& rates,
                                                 const PopulationState& init, double t,
                                                 double dt) {
  Eigen::Matrix3d g = rate_generator(rates);
  Eigen::Vector3d p(init.p0, init.p1, init.p2);
  auto steps = static_cast<long long>(std::ceil(t / dt));
  if (steps < 1) steps = 1;
  double h = t / static_cast<double>(steps);
  for (long long i = 0; i < steps; ++i) {
    Eigen::Vector3d k1 = g * p;
    Eigen::Vector3d k2 = g * (p + 0.5 * h * k1);
    Eigen::Vector3d k3 = g * (p + 0.5 * h * k2);
    Eigen::Vector3d k4 = g * (p + h * k3);
    p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return PopulationState{p(0), p(1), p(2)};
}

// Gaussian tail P(X > x), X ~ N(mean, 1), by Simpson quadrature of the
// density; independent of the erfc-based production path.
inline double gauss_tail_quadrature(double x, double mean) {
  double lo = x;
  double hi = mean + 12.0;
  if (hi <= lo) return 0.0;
  const int n = 4000;  // even
  double h = (hi - lo) / n;
  auto density = [&](double u) {
    double z = u - mean;
    return std::exp(-0.5 * z * z) / std::sqrt(kTwoPi);
  };
  double sum = density(lo) + density(hi);
  for (int i = 1; i < n; ++i) sum += density(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

inline double binomial_sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace fluxsim::testing

#endif  // FLUXSIM_TESTS_TEST_SUPPORT_HPP
