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

#ifndef FLUXSIM_FIT_HPP
#define FLUXSIM_FIT_HPP

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fluxsim/dynamics.hpp"
#include "fluxsim/readout.hpp"

namespace fluxsim {

struct FitOptions {
  int max_iterations = 500;
  double rel_step_tol = 1e-10;
  double rel_residual_tol = 1e-12;
  double lambda_init = 1e-3;
  double lambda_raise = 10.0;
  double lambda_drop = 0.1;
  double jacobian_rel_step = 1e-6;
  double jacobian_abs_step = 1e-12;
};

struct FitResult {
  std::vector<std::string> parameter_names;
  Eigen::VectorXd parameters;
  Eigen::VectorXd standard_errors;  // sized only when converged
  std::vector<bool> unidentifiable;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> flags;
  std::vector<double> cost_history;  // accepted weighted SSE values, non-increasing

  int index_of(const std::string& name) const;
  double parameter(const std::string& name) const;
  double standard_error(const std::string& name) const;
  bool is_unidentifiable(const std::string& name) const;
  bool has_flag(const std::string& flag) const;
};

/// params -> predicted data vector (same length as y).
using ModelFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Damped Gauss-Newton (Levenberg-style adaptive damping) minimization of
/// sum_i w_i (y_i - f_i(p))^2 with central-difference Jacobians. Parameters
/// whose standard error is not resolvable from the Jacobian (rank-deficient
/// normal matrix) or exceeds 3x their estimate are flagged unidentifiable.
FitResult levenberg_fit(const ModelFunction& model, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& weights, const Eigen::VectorXd& p0,
                        const std::vector<std::string>& names, const FitOptions& options = {});

// --- rate fits ---------------------------------------------------------------

struct DecayPoint {
  double t = 0.0;
  double p0 = 0.0, p1 = 0.0, p2 = 0.0;
  double sigma = 0.0;  // per-point uncertainty; <= 0 means uniform weighting
};

/// Two relaxation series sharing one rate matrix: one prepared in |1>, one
/// in |2>. Measured populations need not normalize exactly; per-point sums
/// must stay within [0.9, 1.1].
struct DecayDataset {
  std::vector<DecayPoint> init1;
  std::vector<DecayPoint> init2;

  void validate() const;
};

enum class RateParameterization {
  kLog,     // default: nonnegativity by construction
  kLinear,  // provided for reparameterization cross-checks
};

/// Joint fit of (g10, g12, g20, g21) to both series via the master-equation
/// propagator. Runs 5 deterministically perturbed starts; best residual wins,
/// ties broken by the smaller parameter norm.
FitResult fit_rates(const DecayDataset& data, const RateMatrix& initial_guess,
                    RateParameterization parameterization = RateParameterization::kLog,
                    int threads = 1);

RateMatrix rates_from_fit(const FitResult& result);

// --- dephasing fit -----------------------------------------------------------

struct DephasingPoint {
  double photon_number = 0.0;  // on-resonance strength n
  double drive_frequency = 0.0;
  double gamma_phi = 0.0;      // measured dephasing rate, 1/s
  double sigma = 0.0;          // <= 0 means uniform weighting
};

/// Fits Gamma_phi = Gamma_m(n, omega_d; omega_bare) + Gamma_phi_residual.
/// Only the residual rate and the bare resonator frequency float; every other
/// readout parameter is taken from `fixed`. Requires >= 6 points spanning at
/// least two strengths.
FitResult fit_dephasing(std::span<const DephasingPoint> data, const ReadoutConfig& fixed);

// --- generic curve fits --------------------------------------------------------

struct XyPoint {
  double x = 0.0;
  double y = 0.0;
};

/// a exp(-t/T) + c with T > 0; data that does not decay is flagged
/// "non_decaying" instead of being forced onto the model.
FitResult fit_exponential(std::span<const XyPoint> points);

/// offset + amplitude exp(-t/T2) cos(detuning t + phase). The detuning start
/// is located by a coarse periodogram; a fitted detuning beyond the Nyquist
/// interval of the sampling grid is flagged "aliased_detuning", zero-contrast
/// data flags T2 unidentifiable.
FitResult fit_ramsey(std::span<const XyPoint> points);

}  // namespace fluxsim

#endif  // FLUXSIM_FIT_HPP
