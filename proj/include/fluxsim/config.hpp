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

#ifndef FLUXSIM_CONFIG_HPP
#define FLUXSIM_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fluxsim/dynamics.hpp"
#include "fluxsim/fit.hpp"
#include "fluxsim/readout.hpp"
#include "fluxsim/spectrum.hpp"

namespace fluxsim {

// Run configuration: JSON with // and /* */ comments allowed. Every frequency
// or rate value must be a string tagged with hz, rad_per_s or two_pi_hz; plain
// numbers are rejected for those fields. Unknown keys are rejected with the
// full key path. Times are plain seconds, probabilities plain numbers.

struct ErasureSection {
  double false_negative = 0.0;
  double false_positive = 0.0;
  double eol_fidelity = 1.0;
  double qnd_error_per_check = 0.0;
  double t_ec = 5e-6;
  int m = 1;
  int init_state = 2;
  int flag_policy = 1;
  std::vector<int> m_grid;  // empty means {m}
};

struct RamseySection {
  double t1_logical = 0.0;
  double gamma_phi_residual = 0.0;  // rad/s tagged in the file
  double detuning = 0.0;
  bool readout_during_delay = false;
  std::vector<double> delays;
  std::int64_t stochastic_shots = 0;  // 0 = analytic only
};

struct DriveSection {
  int levels = 6;
  double duration = 480e-9;
  int repeats = 1;
  std::vector<double> amplitudes;
  std::vector<double> detunings;
};

struct LzSection {
  double gap = 0.0;
  double span = 0.0;
  double duration = 0.0;
  LzRateConvention convention = LzRateConvention::kShiftOverDuration;
};

struct TecSweepSection {
  std::vector<double> grid;
  double max_t_tot = 360e-6;
  int points_per_curve = 10;
};

struct QndSection {
  int checks = 29;
  double t_tot = 50e-6;
  double backaction_eps = 1e-3;
  std::vector<double> strengths;
  std::vector<double> frequencies;
};

struct DephasingMapSection {
  std::vector<double> strengths;
  std::vector<double> frequencies;
};

struct DecaySection {
  int init_state = 2;
  std::vector<double> times;
  std::int64_t trajectories = 0;
  double dataset_noise = 0.0;
};

struct FitSection {
  std::optional<RateMatrix> rate_guess;
  RateParameterization parameterization = RateParameterization::kLog;
};

struct RunConfig {
  std::optional<CircuitParams> circuit;
  std::optional<RateMatrix> rates;
  std::optional<ReadoutConfig> readout;
  std::optional<ErasureSection> erasure;
  std::optional<RamseySection> ramsey;
  std::optional<DriveSection> drive;
  std::optional<std::vector<double>> flux_grid;
  std::optional<LzSection> lz;
  std::optional<TecSweepSection> tec_sweep;
  std::optional<QndSection> qnd;
  std::optional<DephasingMapSection> dephasing_map;
  std::optional<DecaySection> decay;
  std::optional<FitSection> fit;
  std::uint64_t master_seed = 1;
  std::int64_t shots = 100000;
  std::string output_dir;  // empty = resolve from env / cwd at run time

  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_text(const std::string& text, const std::string& origin);

  /// Canonical unit-resolved form (all frequencies in rad_per_s strings);
  /// excludes output_dir so artifacts hash identically wherever they land.
  std::string resolved_json() const;
  std::string config_hash() const;
};

}  // namespace fluxsim

#endif  // FLUXSIM_CONFIG_HPP
