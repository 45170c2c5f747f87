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

#ifndef FLUXSIM_DRIVEN_HPP
#define FLUXSIM_DRIVEN_HPP

#include <Eigen/Dense>
#include <span>

#include "fluxsim/spectrum.hpp"

namespace fluxsim {

/// Flat-top charge drive: H_drive(t) = amplitude cos(carrier t + phase) n.
struct DrivePulse {
  double amplitude = 0.0;  // rad/s, multiplies the charge operator
  double carrier = 0.0;    // rad/s
  double phase = 0.0;      // rad
  double duration = 0.0;   // s

  void validate() const;
};

/// Rotation R_theta^{ij}(phi) acting on the {|i>, |j>} subspace.
struct SubspaceRotation {
  int level_low = 0;
  int level_high = 1;
  double angle = 0.0;  // theta in [0, 2 pi)
  double phase = 0.0;  // phi

  void validate() const;
};

/// exp(-i theta/2 (cos phi X_ij + sin phi Y_ij)), identity outside the
/// subspace.
Eigen::MatrixXcd rotation_unitary(const SubspaceRotation& rotation, int dim);

/// Composite logical rotation in the {|0>, |2>} manifold built from allowed
/// single-photon rotations: R_pi^{01}(0) R_theta^{12}(phi) R_pi^{01}(0).
/// Population transfer |0> -> |2> equals sin^2(theta/2); inputs in
/// span{|0>,|2>} never end with |1> population.
Eigen::Matrix3cd compose_logical_rotation(double theta, double phi);

/// Propagates i d|psi>/dt = [diag(levels) + A cos(w t + phase) n] |psi>
/// truncated to `levels` states. The integration runs in the interaction
/// picture of the static part (free phases applied exactly, no rotating-wave
/// approximation), with fixed-step classical RK4 on the drive term; the norm
/// is conserved to well below 1e-8 per pulse. `step_scale` < 1 refines the
/// step, used by convergence checks.
Eigen::VectorXcd simulate_drive(const SpectrumResult& spec, int levels, const DrivePulse& pulse,
                                const Eigen::VectorXcd& init, double step_scale = 1.0,
                                int repeats = 1);

/// P(|2>) after `repeats` identical flat-top pulses starting from |0>, on a
/// (amplitude x detuning) grid. Detunings are measured from half the 0-2
/// transition frequency (two-photon resonance). Cells evaluate in parallel.
Eigen::MatrixXd chevron_scan(const SpectrumResult& spec, int levels, double duration,
                             std::span<const double> amplitudes,
                             std::span<const double> detunings, int repeats, int threads = 1,
                             double step_scale = 1.0);

}  // namespace fluxsim

#endif  // FLUXSIM_DRIVEN_HPP
