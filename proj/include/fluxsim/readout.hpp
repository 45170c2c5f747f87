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

#ifndef FLUXSIM_READOUT_HPP
#define FLUXSIM_READOUT_HPP

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace fluxsim {

/// Dispersive readout operating point. Dressed resonator frequencies are
/// stored per qubit state; dispersive shifts chi_ij = omega_i - omega_j are
/// derived, never stored.
struct ReadoutConfig {
  double kappa = 0.0;              // resonator linewidth, rad/s
  double omega_bare = 0.0;         // bare resonator frequency, rad/s
  std::array<double, 3> dressed{}; // omega_0, omega_1, omega_2, rad/s
  double efficiency = 1.0;         // eta in (0, 1]
  double photon_number = 0.0;      // on-resonance intra-cavity photons
  double t_meas = 0.0;             // integration time, s
  double drive_frequency = 0.0;    // omega_d, rad/s

  double chi(int i, int j) const { return dressed[i] - dressed[j]; }
  void validate() const;
};

/// Actual intra-cavity photon number when the qubit is in state i:
/// n_i = n kappa^2 / (kappa^2 + 4 (omega_i - omega_d)^2).
double photon_number(const ReadoutConfig& cfg, int state);

/// Steady-state cavity amplitude for state i, normalized so |alpha_i|^2 = n_i.
std::complex<double> cavity_amplitude(const ReadoutConfig& cfg, int state);

/// Measurement-induced dephasing rate of the {|0>,|2>} subspace:
/// Gamma_m = (n_0 + n_2) kappa chi_02^2 / (kappa^2 + chi_02^2 + 4 (omega_r0 - omega_d)^2).
double dephasing_rate(const ReadoutConfig& cfg);

/// 1 - exp(-Gamma_m t_meas).
double dephasing_error_per_check(const ReadoutConfig& cfg);

/// Matched-filter discrimination SNR between the cavity responses of states
/// i and j: 2 |alpha_i - alpha_j| sqrt(eta kappa t_meas / 2).
double separation_snr(const ReadoutConfig& cfg, int i, int j);

/// Row-stochastic confusion matrix: rows are the true states {0,1,2}, columns
/// are assigned labels. Erasure checks carry 2 labels (0 = computational,
/// 1 = erasure); end-of-line readout carries 3 (state labels).
class ConfusionMatrix {
 public:
  ConfusionMatrix(int num_labels, std::vector<double> entries);
  static ConfusionMatrix identity_2label();
  static ConfusionMatrix identity_3label();

  int num_labels() const { return num_labels_; }
  double p(int true_state, int label) const;
  std::span<const double> row(int true_state) const;

 private:
  int num_labels_;
  std::vector<double> entries_;  // 3 x num_labels, row-major
};

/// Erasure-check confusion from measured error rates: state |1> is labeled
/// computational with probability fn_rate; states |0>, |2> are labeled
/// erasure with probability fp_rate.
ConfusionMatrix empirical_confusion(double fn_rate, double fp_rate);

/// 3-label confusion with uniform off-diagonal errors and the given mean
/// assignment fidelity on the diagonal.
ConfusionMatrix eol_symmetric_confusion(double fidelity);

// --- Gaussian discrimination model -----------------------------------------
//
// The three steady-state amplitudes are projected on the line joining the
// |1> response to the computational centroid (erasure side positive). With
// heterodyne detection the projected means separate by
// |delta alpha_proj| sqrt(eta kappa t_meas) in units of the unit noise sigma;
// labels follow from Gaussian tail integrals against the thresholds.

/// Projected 1D means (sigma = 1 units) for states 0, 1, 2.
std::array<double, 3> projected_means(const ReadoutConfig& cfg);

/// Erasure-check confusion from the Gaussian model: outcomes beyond the
/// single threshold (erasure side) are labeled erasure. Throws on unordered
/// thresholds when more than one is supplied.
ConfusionMatrix confusion_from_model(const ReadoutConfig& cfg, std::span<const double> thresholds);

/// Threshold placed so that P(computational | true |1>) equals fn_rate.
double threshold_for_false_negative(const ReadoutConfig& cfg, double fn_rate);

/// Midpoint-threshold assignment fidelity between states i and j under the
/// same projected-Gaussian model: 1 - erfc(d / (2 sqrt 2)) / 2.
double midpoint_fidelity(const ReadoutConfig& cfg, int i, int j);

/// Per-check QND error from normalized survival probabilities:
/// eps = 1 - ((p0_tilde + p2_tilde) / 2)^(1/m).
double qnd_error(double p0_tilde, double p2_tilde, int m);

/// Measurement backaction for QND-map simulation: while the qubit occupies
/// state i, one check disturbs it with probability c * n_i(strength, omega_d).
struct BackactionModel {
  double coefficient = 0.0;

  double kick_probability(const ReadoutConfig& cfg, int state) const;
};

/// Calibrates c so that the mean computational-subspace kick probability at
/// cfg's own (photon_number, drive_frequency) equals target_eps_qnd.
BackactionModel calibrate_backaction(const ReadoutConfig& cfg, double target_eps_qnd);

}  // namespace fluxsim

#endif  // FLUXSIM_READOUT_HPP
