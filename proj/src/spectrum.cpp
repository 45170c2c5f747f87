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

#include "fluxsim/spectrum.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fluxsim/errors.hpp"
#include "fluxsim/parallel.hpp"
#include "fluxsim/units.hpp"

namespace fluxsim {

namespace {

constexpr int kStoredLevels = 10;
constexpr double kLevelConvergence = 1e-8;
constexpr double kSymmetryTolerance = 1e-12;
constexpr double kParityThreshold = 0.99;

struct RawSpectrum {
  std::vector<double> levels;
  Eigen::MatrixXd charge;          // signed W
  std::vector<double> parity_expectation;
};

// Single diagonalization at a fixed truncation.
//
// Basis: eigenstates of the LC sub-circuit, oscillator frequency
// sqrt(8 E_C E_L), phi_zpf = (2 E_C / E_L)^(1/4), n_zpf = (E_L / 32 E_C)^(1/4).
// The external flux is absorbed into the Josephson term by the displacement
// phi -> phi + 2 pi phi_ext, which keeps the oscillator centered on the
// quadratic minimum:
//   H = 4 E_C n^2 + E_L/2 phi^2 - E_J cos(phi - theta),  theta = 2 pi phi_ext.
// cos(phi - theta) is assembled from the spectral decomposition of phi, i.e.
// from the same unitary displacement structure as (D + D^dag)/2, so it is
// symmetric by construction.
RawSpectrum diagonalize_at(const CircuitParams& p, int basis) {
  const double phi_zpf = std::pow(2.0 * p.e_c / p.e_l, 0.25);
  const double n_zpf = std::pow(p.e_l / (32.0 * p.e_c), 0.25);
  const double theta = kTwoPi * p.phi_ext;

  Eigen::MatrixXd phi_op = Eigen::MatrixXd::Zero(basis, basis);
  for (int k = 1; k < basis; ++k) {
    double s = phi_zpf * std::sqrt(static_cast<double>(k));
    phi_op(k - 1, k) = s;
    phi_op(k, k - 1) = s;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> phi_eig(phi_op);
  const Eigen::VectorXd lam = phi_eig.eigenvalues();
  const Eigen::MatrixXd& v = phi_eig.eigenvectors();
  Eigen::VectorXd cos_lam(basis);
  for (int k = 0; k < basis; ++k) cos_lam(k) = std::cos(lam(k) - theta);
  Eigen::MatrixXd cos_phi = v * cos_lam.asDiagonal() * v.transpose();

  // n^2 = n_zpf^2 (2 a^dag a + 1 - a^dag a^dag - a a) in the oscillator basis
  Eigen::MatrixXd n2 = Eigen::MatrixXd::Zero(basis, basis);
  for (int k = 0; k < basis; ++k) n2(k, k) = n_zpf * n_zpf * (2.0 * k + 1.0);
  for (int k = 2; k < basis; ++k) {
    double s = -n_zpf * n_zpf * std::sqrt(static_cast<double>(k) * (k - 1));
    n2(k - 2, k) = s;
    n2(k, k - 2) = s;
  }

  Eigen::MatrixXd h = 4.0 * p.e_c * n2 + 0.5 * p.e_l * (phi_op * phi_op) - p.e_j * cos_phi;

  double scale = h.cwiseAbs().maxCoeff();
  double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    throw NumericalError("assembled fluxonium Hamiltonian is not symmetric: relative asymmetry " +
                         std::to_string(asym / scale));
  }
  h = 0.5 * (h + h.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  const int nlev = std::min(kStoredLevels, basis);

  Eigen::MatrixXd states = eig.eigenvectors().leftCols(nlev);
  // deterministic sign: largest-magnitude component positive
  for (int i = 0; i < nlev; ++i) {
    int arg = 0;
    states.col(i).cwiseAbs().maxCoeff(&arg);
    if (states(arg, i) < 0) states.col(i) *= -1.0;
  }

  RawSpectrum out;
  out.levels.resize(nlev);
  for (int i = 0; i < nlev; ++i) out.levels[i] = eig.eigenvalues()(i) - eig.eigenvalues()(0);

  // W with <i|n|j> = i W_ij, from n = i n_zpf (a^dag - a)
  Eigen::MatrixXd ad_minus_a = Eigen::MatrixXd::Zero(basis, basis);
  for (int k = 1; k < basis; ++k) {
    double s = std::sqrt(static_cast<double>(k));
    ad_minus_a(k, k - 1) = s;
    ad_minus_a(k - 1, k) = -s;
  }
  out.charge = n_zpf * (states.transpose() * ad_minus_a * states);

  out.parity_expectation.resize(nlev);
  for (int i = 0; i < nlev; ++i) {
    double e = 0.0;
    for (int k = 0; k < basis; ++k) {
      double c = states(k, i);
      e += (k % 2 == 0 ? 1.0 : -1.0) * c * c;
    }
    out.parity_expectation[i] = e;
  }
  return out;
}

bool levels_converged(const RawSpectrum& coarse, const RawSpectrum& fine) {
  for (int k = 1; k <= 5; ++k) {
    double a = coarse.levels[k];
    double b = fine.levels[k];
    if (std::abs(a - b) > kLevelConvergence * std::abs(b)) return false;
  }
  return true;
}

bool parity_defined(double phi_ext) {
  double r = std::remainder(phi_ext, 0.5);
  return std::abs(r) < 1e-12;
}

}  // namespace

void CircuitParams::validate() const {
  if (!(e_c > 0.0)) throw std::invalid_argument("CircuitParams: e_c must be > 0");
  if (!(e_j >= 0.0)) throw std::invalid_argument("CircuitParams: e_j must be >= 0");
  if (!(e_l > 0.0)) throw std::invalid_argument("CircuitParams: e_l must be > 0");
  if (basis_size < 40) throw std::invalid_argument("CircuitParams: basis_size must be >= 40");
}

SpectrumResult::SpectrumResult(std::vector<double> levels, Eigen::MatrixXd charge,
                               std::optional<std::vector<int>> parity, int converged_basis_size)
    : levels_(std::move(levels)),
      charge_(std::move(charge)),
      parity_(std::move(parity)),
      converged_basis_size_(converged_basis_size) {}

void SpectrumResult::check_index(int i) const {
  if (i < 0 || i >= num_levels()) {
    throw std::out_of_range("level index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(num_levels()) + ")");
  }
}

double SpectrumResult::level(int i) const {
  check_index(i);
  return levels_[static_cast<std::size_t>(i)];
}

double SpectrumResult::transition_frequency(int i, int j) const {
  check_index(i);
  check_index(j);
  if (i >= j) {
    throw std::out_of_range("transition_frequency requires i < j, got (" + std::to_string(i) +
                            ", " + std::to_string(j) + ")");
  }
  return levels_[static_cast<std::size_t>(j)] - levels_[static_cast<std::size_t>(i)];
}

double SpectrumResult::charge_matrix_element(int i, int j) const {
  check_index(i);
  check_index(j);
  return std::abs(charge_(i, j));
}

SpectrumResult diagonalize(const CircuitParams& params) {
  params.validate();

  int basis = params.basis_size;
  RawSpectrum coarse = diagonalize_at(params, basis);
  for (int attempt = 0; attempt < 2; ++attempt) {
    RawSpectrum fine = diagonalize_at(params, 2 * basis);
    if (levels_converged(coarse, fine)) {
      std::optional<std::vector<int>> parity;
      if (parity_defined(params.phi_ext)) {
        std::vector<int> labels(fine.parity_expectation.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
          double e = fine.parity_expectation[i];
          labels[i] = std::abs(e) >= kParityThreshold ? (e > 0 ? 1 : -1) : 0;
        }
        parity = std::move(labels);
      }
      return SpectrumResult(std::move(fine.levels), std::move(fine.charge), std::move(parity),
                            2 * basis);
    }
    basis *= 2;
    coarse = std::move(fine);
  }
  throw ConvergenceError("fluxonium levels did not converge after doubling the basis from " +
                         std::to_string(params.basis_size) + " to " + std::to_string(2 * basis));
}

std::vector<FluxSweepRow> sweep_flux(const CircuitParams& params,
                                     std::span<const double> flux_grid, int threads) {
  params.validate();
  if (flux_grid.empty()) throw std::invalid_argument("sweep_flux: empty flux grid");

  std::vector<FluxSweepRow> rows(flux_grid.size());
  parallel_for(static_cast<std::int64_t>(flux_grid.size()), threads, [&](std::int64_t i) {
    CircuitParams p = params;
    p.phi_ext = flux_grid[static_cast<std::size_t>(i)];
    SpectrumResult spec = diagonalize(p);
    rows[static_cast<std::size_t>(i)] = FluxSweepRow{
        p.phi_ext,
        spec.transition_frequency(0, 1),
        spec.transition_frequency(1, 2),
        spec.transition_frequency(0, 2),
        spec.charge_matrix_element(0, 1),
        spec.charge_matrix_element(1, 2),
        spec.charge_matrix_element(0, 2),
    };
  });
  return rows;
}

}  // namespace fluxsim
