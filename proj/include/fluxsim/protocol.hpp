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

#ifndef FLUXSIM_PROTOCOL_HPP
#define FLUXSIM_PROTOCOL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fluxsim/dynamics.hpp"
#include "fluxsim/fit.hpp"
#include "fluxsim/readout.hpp"

namespace fluxsim {

/// Repeated erasure checks followed by an end-of-line measurement.
///
/// Timing: each of the m check periods is a free-evolution gap of t_ec
/// followed by a measurement window of t_meas, so t_tot = m (t_ec + t_meas).
/// The check label derives from the true state at the window midpoint; with
/// probability qnd_error_per_check the measurement kicks the state uniformly
/// onto one of the other two states at the window end.
struct ErasureExperimentConfig {
  RateMatrix rates;
  ConfusionMatrix erasure_confusion = ConfusionMatrix::identity_2label();
  ConfusionMatrix eol_confusion = ConfusionMatrix::identity_3label();
  double qnd_error_per_check = 0.0;
  double t_meas = 1.6e-6;
  double t_ec = 5e-6;
  int m = 1;
  int init_state = 2;
  std::int64_t shots = 100000;
  std::uint64_t master_seed = 1;
  int flag_policy = 1;  // flag a shot only on >= k consecutive erasure labels

  // Separates ensembles that share a master seed (curve points, map cells).
  // Not part of the user-facing config.
  std::uint32_t stream_salt = 0;

  double t_tot() const { return m * (t_meas + t_ec); }
  void validate() const;
};

struct ShotRecord {
  std::vector<std::uint8_t> check_labels;     // 1 = erasure label
  std::vector<std::uint8_t> midpoint_states;  // true state at each window midpoint
  std::uint8_t eol_label = 0;
  std::uint8_t true_final_state = 0;
  bool flagged = false;
};

/// Shot k draws from the counter-based substream (master_seed, k, salt), so
/// the ensemble is bit-identical for any thread count.
std::vector<ShotRecord> run_erasure_experiment(const ErasureExperimentConfig& cfg,
                                               int threads = 1);

struct SurvivalPoint {
  int m = 0;
  double t_tot = 0.0;
  double p2_unselected = 0.0;
  std::optional<double> p2_postselected;  // empty when no shot survives selection
  double survival_fraction = 0.0;
  std::int64_t shots_total = 0;
  std::int64_t shots_unflagged = 0;
  double sigma_unselected = 0.0;
  double sigma_postselected = 0.0;
};

/// One independent ensemble per check count; P(|2>) at the end of line over
/// all shots and over unflagged shots.
std::vector<SurvivalPoint> survival_curve(const ErasureExperimentConfig& cfg,
                                          std::span<const int> m_grid, int threads = 1);

struct CurvePoint {
  double t = 0.0;
  double p = 0.0;
  double sigma = 0.0;  // <= 0 means uniform weight
};

struct LifetimeEstimate {
  double t1l = 0.0;         // s; +inf when the curve does not decay
  double stderr_t1l = 0.0;  // s
  bool finite = true;
  FitResult fit;
};

/// Characteristic lifetime from a weighted a exp(-t/T) + c fit with the
/// offset bounded to [0, 0.5]. Curves that do not decay over the window are
/// reported as infinite rather than forced onto the model.
LifetimeEstimate logical_lifetime(std::span<const CurvePoint> points);

std::vector<CurvePoint> unselected_curve(std::span<const SurvivalPoint> curve);
std::vector<CurvePoint> postselected_curve(std::span<const SurvivalPoint> curve);

struct TecSweepRow {
  double t_ec = 0.0;
  LifetimeEstimate postselected;
  LifetimeEstimate unselected;
};

struct TecSweepResult {
  std::vector<TecSweepRow> rows;
  bool postselected_monotone_3sigma = false;
};

/// Survival curve + lifetime extraction per t_EC value. The m grid for each
/// t_EC spans up to max_t_tot with `points_per_curve` points. Reports whether
/// the postselected lifetime is non-increasing in t_EC within combined 3 sigma
/// fit uncertainties.
TecSweepResult lifetime_vs_tec(const ErasureExperimentConfig& cfg,
                               std::span<const double> tec_grid, double max_t_tot,
                               int points_per_curve, int threads = 1);

// --- QND map ------------------------------------------------------------------

struct QndSequenceConfig {
  RateMatrix rates;
  ReadoutConfig readout;  // dressed frequencies, kappa, t_meas; also the
                          // calibration point (photon_number, drive_frequency)
  ConfusionMatrix eol_confusion = ConfusionMatrix::identity_3label();
  int checks = 29;
  double t_tot = 50e-6;
  std::int64_t shots = 100000;
  std::uint64_t master_seed = 1;
  double backaction_eps_at_reference = 1e-3;

  void validate() const;
};

struct QndMaps {
  std::vector<double> strengths;
  std::vector<double> frequencies;
  // p_tilde[init](strength index, frequency index) =
  //   P(EOL label = init | n, omega_d) / P(EOL label = init | n = 0)
  std::array<Eigen::MatrixXd, 3> p_tilde;
  BackactionModel model;
};

/// Simulates the repeated-check sequence with the photon-number-tracking
/// backaction model, for each initial state over a strength x frequency grid.
/// The n = 0 normalizer is the exact master-equation prediction.
QndMaps qnd_sequence(const QndSequenceConfig& cfg, std::span<const double> strengths,
                     std::span<const double> frequencies, int threads = 1);

// --- Ramsey ---------------------------------------------------------------------

struct RamseyConfig {
  double t1_logical = 0.0;           // s; +inf allowed
  double gamma_phi_residual = 0.0;   // 1/s
  double detuning = 0.0;             // rad/s
  std::optional<ReadoutConfig> readout_during_delay;
  std::vector<double> delay_grid;    // s

  void validate() const;
  /// Gamma_phi = Gamma_phi_residual + Gamma_m(readout) when readout is applied.
  double total_dephasing_rate() const;
};

/// Analytic fringe: P(t) = 1/2 + 1/2 exp(-t (1/(2 T1L) + Gamma_phi)) cos(detuning t).
std::vector<XyPoint> ramsey_signal(const RamseyConfig& cfg);

/// Monte Carlo cross-check of the analytic form: the accumulated phase
/// diffuses with variance 2 Gamma_phi t per shot.
std::vector<XyPoint> ramsey_stochastic(const RamseyConfig& cfg, std::int64_t shots,
                                       std::uint64_t master_seed, int threads = 1);

}  // namespace fluxsim

#endif  // FLUXSIM_PROTOCOL_HPP
