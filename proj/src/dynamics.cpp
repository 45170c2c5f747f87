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

#include "fluxsim/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fluxsim/units.hpp"

namespace fluxsim {

void RateMatrix::validate() const {
  if (!(g10 >= 0.0 && g12 >= 0.0 && g20 >= 0.0 && g21 >= 0.0)) {
    throw std::invalid_argument("RateMatrix: rates must be >= 0");
  }
}

void PopulationState::validate() const {
  auto in_unit = [](double p) { return p >= -1e-12 && p <= 1.0 + 1e-12; };
  if (!in_unit(p0) || !in_unit(p1) || !in_unit(p2)) {
    throw std::invalid_argument("PopulationState: probabilities must lie in [0, 1]");
  }
  if (std::abs(p0 + p1 + p2 - 1.0) > 1e-12) {
    throw std::invalid_argument("PopulationState: probabilities must sum to 1");
  }
}

Eigen::Matrix3d rate_generator(const RateMatrix& r) {
  r.validate();
  Eigen::Matrix3d g;
  g << 0.0, r.g10, r.g20,
       0.0, -(r.g10 + r.g12), r.g21,
       0.0, r.g12, -(r.g20 + r.g21);
  return g;
}

PopulationState evolve_populations(const RateMatrix& rates, const PopulationState& init,
                                   double t) {
  init.validate();
  if (t < 0.0) throw std::invalid_argument("evolve_populations: negative time");
  Eigen::Matrix3d propagator = (t * rate_generator(rates)).exp();
  Eigen::Vector3d p = propagator * Eigen::Vector3d(init.p0, init.p1, init.p2);
  // clip rounding residue; the propagator is stochastic to machine precision
  for (int i = 0; i < 3; ++i) p(i) = std::min(1.0, std::max(0.0, p(i)));
  double sum = p.sum();
  return PopulationState{p(0) / sum, p(1) / sum, p(2) / sum};
}

CharacteristicTimes characteristic_times(const RateMatrix& r) {
  r.validate();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  CharacteristicTimes out{kInf, kInf, kInf};
  if (r.g10 + r.g12 > 0.0) out.t_erasure_state = 1.0 / (r.g10 + r.g12);
  if (r.g21 > 0.0) out.t_eras_onset = 1.0 / r.g21;

  // Nonzero eigenvalues of G live in the lower-right 2x2 block.
  double a = r.g10 + r.g12;
  double d = r.g20 + r.g21;
  double tr = -(a + d);
  double det = a * d - r.g21 * r.g12;
  double disc = tr * tr - 4.0 * det;
  disc = disc > 0.0 ? std::sqrt(disc) : 0.0;
  double l1 = 0.5 * (tr + disc);
  double l2 = 0.5 * (tr - disc);
  double scale = std::max({std::abs(l1), std::abs(l2), 1e-300});
  double slowest = 0.0;
  for (double l : {l1, l2}) {
    if (std::abs(l) > 1e-12 * scale && (slowest == 0.0 || l > slowest)) slowest = l;
  }
  if (slowest < 0.0) out.t_slowest = -1.0 / slowest;
  return out;
}

namespace {

int check_state_index(int s) {
  if (s < 0 || s > 2) throw std::invalid_argument("state index must be 0, 1 or 2");
  return s;
}

}  // namespace

int TrajectoryPath::state_at(double t) const {
  int s = initial_state;
  for (const auto& j : jumps) {
    if (j.time > t) break;
    s = j.state;
  }
  return s;
}

int advance_state(const RateMatrix& r, int state, double dt, RngStream& rng) {
  check_state_index(state);
  while (dt > 0.0) {
    double exit_rate, branch_first;  // branch_first = rate of the first channel below
    int first, second;
    if (state == 1) {
      exit_rate = r.g10 + r.g12;
      branch_first = r.g10;
      first = 0;
      second = 2;
    } else if (state == 2) {
      exit_rate = r.g20 + r.g21;
      branch_first = r.g20;
      first = 0;
      second = 1;
    } else {
      return 0;  // |0> is absorbing
    }
    if (exit_rate <= 0.0) return state;
    double wait = rng.exponential(exit_rate);
    if (wait > dt) return state;
    dt -= wait;
    state = (rng.uniform() * exit_rate < branch_first) ? first : second;
  }
  return state;
}

TrajectoryPath sample_trajectory(const RateMatrix& rates, int init_state, double duration,
                                 RngStream& rng) {
  rates.validate();
  check_state_index(init_state);
  if (duration < 0.0) throw std::invalid_argument("sample_trajectory: negative duration");

  TrajectoryPath path;
  path.initial_state = init_state;
  path.duration = duration;
  double t = 0.0;
  int state = init_state;
  while (true) {
    double exit_rate, branch_first;
    int first, second;
    if (state == 1) {
      exit_rate = rates.g10 + rates.g12;
      branch_first = rates.g10;
      first = 0;
      second = 2;
    } else if (state == 2) {
      exit_rate = rates.g20 + rates.g21;
      branch_first = rates.g20;
      first = 0;
      second = 1;
    } else {
      break;
    }
    if (exit_rate <= 0.0) break;
    double wait = rng.exponential(exit_rate);
    if (t + wait >= duration) break;
    t += wait;
    state = (rng.uniform() * exit_rate < branch_first) ? first : second;
    path.jumps.push_back(TrajectoryJump{t, state});
  }
  return path;
}

void RampSpec::validate() const {
  if (!(frequency_gap >= 0.0)) throw std::invalid_argument("RampSpec: frequency_gap must be >= 0");
  if (!(detuning_span > 0.0)) throw std::invalid_argument("RampSpec: detuning_span must be > 0");
  if (!(ramp_duration > 0.0)) throw std::invalid_argument("RampSpec: ramp_duration must be > 0");
}

double lz_error(const RampSpec& ramp, LzRateConvention convention) {
  ramp.validate();
  double rate = ramp.detuning_span / ramp.ramp_duration;
  if (convention == LzRateConvention::kSymmetricSpan) rate *= 2.0;
  double pi = kTwoPi / 2.0;
  return std::exp(-pi * ramp.frequency_gap * ramp.frequency_gap / rate);
}

}  // namespace fluxsim
