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

#ifndef FLUXSIM_SPECTRUM_HPP
#define FLUXSIM_SPECTRUM_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

namespace fluxsim {

/// Fluxonium circuit energies. All three energies are angular frequencies in
/// rad/s (the Hamiltonian is taken with hbar divided out); phi_ext is the
/// external flux as a dimensionless fraction of the flux quantum.
struct CircuitParams {
  double e_c = 0.0;
  double e_j = 0.0;
  double e_l = 0.0;
  double phi_ext = 0.0;
  int basis_size = 120;

  /// Throws std::invalid_argument unless e_c > 0, e_j >= 0, e_l > 0 and
  /// basis_size >= 40 (convergence floor for the parameter regime this tool
  /// targets).
  void validate() const;
};

/// Eigenstructure of H = 4 E_C n^2 - E_J cos(phi) + E_L/2 (phi + 2 pi phi_ext)^2
/// in the harmonic-oscillator basis of the linear (E_C, E_L) sub-circuit.
///
/// Charge matrix elements are purely imaginary in the real eigenbasis used
/// here: <i|n|j> = i * W_ij with W real and antisymmetric. `charge_matrix()`
/// returns W (signs fixed by a deterministic eigenvector convention);
/// `charge_matrix_element()` returns |W_ij|.
class SpectrumResult {
 public:
  SpectrumResult(std::vector<double> levels, Eigen::MatrixXd charge,
                 std::optional<std::vector<int>> parity, int converged_basis_size);

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const std::vector<double>& levels() const { return levels_; }
  double level(int i) const;

  /// omega_ij = levels[j] - levels[i]; requires i < j.
  double transition_frequency(int i, int j) const;

  /// |<i|n|j>| >= 0.
  double charge_matrix_element(int i, int j) const;

  /// Signed antisymmetric W with <i|n|j> = i W_ij.
  const Eigen::MatrixXd& charge_matrix() const { return charge_; }

  /// +-1 per level; populated only at phi_ext in {0, 1/2} (mod 1).
  const std::optional<std::vector<int>>& parity() const { return parity_; }

  int converged_basis_size() const { return converged_basis_size_; }

 private:
  void check_index(int i) const;

  std::vector<double> levels_;
  Eigen::MatrixXd charge_;
  std::optional<std::vector<int>> parity_;
  int converged_basis_size_;
};

/// Diagonalizes the fluxonium Hamiltonian, doubling the basis until the first
/// six levels are stable to 1e-8 relative. Throws ConvergenceError after two
/// extra doublings, NumericalError if the assembled matrix is not symmetric
/// to 1e-12 relative.
SpectrumResult diagonalize(const CircuitParams& params);

struct FluxSweepRow {
  double phi_ext;
  double w01, w12, w02;   // rad/s
  double n01, n12, n02;   // |<i|n|j>|
};

/// One diagonalization per grid point, evaluated in parallel; row order
/// follows the input grid.
std::vector<FluxSweepRow> sweep_flux(const CircuitParams& params,
                                     std::span<const double> flux_grid,
                                     int threads = 1);

}  // namespace fluxsim

#endif  // FLUXSIM_SPECTRUM_HPP
