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

#ifndef FLUXSIM_DYNAMICS_HPP
#define FLUXSIM_DYNAMICS_HPP

#include <Eigen/Dense>
#include <vector>

#include "fluxsim/rng.hpp"

namespace fluxsim {

/// Spontaneous transition rates (1/s) among the lowest three levels.
/// g10: |1>->|0>, g12: |1>->|2>, g20: |2>->|0>, g21: |2>->|1>.
/// Spontaneous excitation out of |0> is neglected by model assumption.
struct RateMatrix {
  double g10 = 0.0;
  double g12 = 0.0;
  double g20 = 0.0;
  double g21 = 0.0;

  void validate() const;
};

struct PopulationState {
  double p0 = 1.0;
  double p1 = 0.0;
  double p2 = 0.0;

  void validate() const;
  double operator[](int i) const { return i == 0 ? p0 : (i == 1 ? p1 : p2); }
};

/// Generator G of dP/dt = G P for the three-state rate model. Columns sum
/// to zero.
Eigen::Matrix3d rate_generator(const RateMatrix& rates);

/// P(t) = exp(t G) P(0), computed by scaling-and-squaring on the 3x3
/// generator. Throws std::invalid_argument for t < 0.
PopulationState evolve_populations(const RateMatrix& rates, const PopulationState& init, double t);

struct CharacteristicTimes {
  double t_erasure_state;  // 1 / (g10 + g12)
  double t_eras_onset;     // 1 / g21
  double t_slowest;        // -1 / (largest nonzero eigenvalue of G)
};

/// Divisions by zero are reported per-field as +infinity.
CharacteristicTimes characteristic_times(const RateMatrix& rates);

struct TrajectoryJump {
  double time;     // s
  int state;       // state entered at `time`
};

/// One continuous-time Markov realization of the rate model.
struct TrajectoryPath {
  int initial_state = 0;
  double duration = 0.0;
  std::vector<TrajectoryJump> jumps;

  int state_at(double t) const;
};

/// Exact Gillespie sampling: exponential waiting time with the total exit
/// rate of the current state, channel chosen proportional to its rate.
/// |0> never jumps.
TrajectoryPath sample_trajectory(const RateMatrix& rates, int init_state, double duration,
                                 RngStream& rng);

/// Advances a single state through dt of the rate model and returns the state
/// at the end; statistically identical to following sample_trajectory but
/// without materializing the path.
int advance_state(const RateMatrix& rates, int state, double dt, RngStream& rng);

/// Linear flux-ramp model through the |1>,|2> avoided crossing.
struct RampSpec {
  double frequency_gap = 0.0;   // rad/s, the omega_12 gap
  double detuning_span = 0.0;   // rad/s, maximum shift of omega_12 over the ramp
  double ramp_duration = 0.0;   // s

  void validate() const;
};

/// Convention for the sweep rate entering the non-adiabatic exponent.
/// kShiftOverDuration (default): rate = detuning_span / ramp_duration, i.e.
/// the stated maximum frequency shift is reached over the stated duration.
/// kSymmetricSpan: rate = 2 * detuning_span / ramp_duration, reading the span
/// as -detuning_span..+detuning_span within the same duration.
enum class LzRateConvention {
  kShiftOverDuration,
  kSymmetricSpan,
};

/// Non-adiabatic transition probability exp(-pi gap^2 / rate) in (0, 1].
double lz_error(const RampSpec& ramp,
                LzRateConvention convention = LzRateConvention::kShiftOverDuration);

}  // namespace fluxsim

#endif  // FLUXSIM_DYNAMICS_HPP
