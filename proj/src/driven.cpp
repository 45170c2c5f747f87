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

#include "fluxsim/driven.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "fluxsim/errors.hpp"
#include "fluxsim/parallel.hpp"
#include "fluxsim/units.hpp"

namespace fluxsim {

namespace {

using Complex = std::complex<double>;

// Sampling density for the fastest phase in the interaction picture
// (max level splitting + carrier). 192 points per cycle keeps step-halving
// changes of final populations below 1e-8 for the pulse lengths used here.
constexpr double kStepsPerCycle = 192.0;
constexpr std::int64_t kMaxSteps = 2'000'000'000;

}  // namespace

void DrivePulse::validate() const {
  if (!(amplitude >= 0.0)) throw std::invalid_argument("DrivePulse: amplitude must be >= 0");
  if (!(duration > 0.0)) throw std::invalid_argument("DrivePulse: duration must be > 0");
  if (!(carrier >= 0.0)) throw std::invalid_argument("DrivePulse: carrier must be >= 0");
}

void SubspaceRotation::validate() const {
  if (level_low < 0 || level_high <= level_low) {
    throw std::invalid_argument("SubspaceRotation: requires 0 <= i < j");
  }
  if (!(angle >= 0.0 && angle < kTwoPi)) {
    throw std::invalid_argument("SubspaceRotation: angle must lie in [0, 2 pi)");
  }
}

Eigen::MatrixXcd rotation_unitary(const SubspaceRotation& rotation, int dim) {
  rotation.validate();
  if (rotation.level_high >= dim) {
    throw std::invalid_argument("rotation_unitary: subspace indices must be < dim");
  }
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  double half = 0.5 * rotation.angle;
  Complex c = std::cos(half);
  Complex minus_i_sin = Complex(0.0, -std::sin(half));
  int i = rotation.level_low;
  int j = rotation.level_high;
  u(i, i) = c;
  u(j, j) = c;
  u(i, j) = minus_i_sin * std::exp(Complex(0.0, -rotation.phase));
  u(j, i) = minus_i_sin * std::exp(Complex(0.0, rotation.phase));
  return u;
}

Eigen::Matrix3cd compose_logical_rotation(double theta, double phi) {
  Eigen::MatrixXcd r01 = rotation_unitary({0, 1, kTwoPi / 2.0, 0.0}, 3);
  SubspaceRotation mid{1, 2, 0.0, phi};
  // wrap theta into [0, 2 pi)
  mid.angle = theta - kTwoPi * std::floor(theta / kTwoPi);
  Eigen::MatrixXcd r12 = rotation_unitary(mid, 3);
  return r01 * r12 * r01;
}

Eigen::VectorXcd simulate_drive(const SpectrumResult& spec, int levels, const DrivePulse& pulse,
                                const Eigen::VectorXcd& init, double step_scale, int repeats) {
  pulse.validate();
  if (levels < 4) throw std::invalid_argument("simulate_drive: need at least 4 levels");
  if (levels > spec.num_levels()) {
    throw std::invalid_argument("simulate_drive: spectrum holds fewer levels than requested");
  }
  if (init.size() != levels) throw std::invalid_argument("simulate_drive: init size mismatch");
  if (std::abs(init.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("simulate_drive: init state must be normalized");
  }
  if (repeats < 1 || repeats > 2) throw std::invalid_argument("simulate_drive: repeats must be 1 or 2");

  const Eigen::MatrixXd& w = spec.charge_matrix();
  const std::vector<double>& energy = spec.levels();

  // active coupled pairs (j < k): dy_j/dt += g W_jk z_jk y_k,
  //                               dy_k/dt -= g W_jk conj(z_jk) y_j,
  // with z_jk = exp(i (E_j - E_k) t) and g = A cos(carrier t + phase).
  struct Pair {
    int j, k;
    double w_jk;
    double splitting;  // E_j - E_k
  };
  std::vector<Pair> pairs;
  for (int j = 0; j < levels; ++j) {
    for (int k = j + 1; k < levels; ++k) {
      if (std::abs(w(j, k)) > 1e-14) {
        pairs.push_back(Pair{j, k, w(j, k), energy[static_cast<std::size_t>(j)] -
                                                energy[static_cast<std::size_t>(k)]});
      }
    }
  }

  double omega_fast = energy[static_cast<std::size_t>(levels - 1)] + pulse.carrier;
  double dt = kTwoPi / (kStepsPerCycle * std::max(omega_fast, 1.0)) * step_scale;
  double total_time = pulse.duration * repeats;
  double steps_needed = std::ceil(total_time / dt);
  if (!(steps_needed > 0.0) || steps_needed > static_cast<double>(kMaxSteps)) {
    throw NumericalError("simulate_drive: step size underflow (" +
                         std::to_string(steps_needed) + " steps required)");
  }
  auto steps = static_cast<std::int64_t>(steps_needed);
  dt = total_time / static_cast<double>(steps);

  // Per-pair phase factors advance by a fixed rotation each half step; the
  // complex magnitudes are renormalized periodically to shed rounding drift.
  std::vector<Complex> z(pairs.size()), half_rot(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    z[p] = Complex(1.0, 0.0);
    half_rot[p] = std::exp(Complex(0.0, pairs[p].splitting * dt * 0.5));
  }

  Eigen::VectorXcd y = init;
  Eigen::VectorXcd k1(levels), k2(levels), k3(levels), k4(levels), scratch(levels);

  auto apply_rhs = [&](const Eigen::VectorXcd& state, double drive, std::size_t z_index,
                       const std::vector<std::vector<Complex>>& z_cache, Eigen::VectorXcd* out) {
    out->setZero();
    const std::vector<Complex>& zc = z_cache[z_index];
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const Pair& pr = pairs[p];
      Complex coupling = drive * pr.w_jk * zc[p];
      (*out)(pr.j) += coupling * state(pr.k);
      (*out)(pr.k) -= std::conj(coupling) * state(pr.j);
    }
  };

  std::vector<std::vector<Complex>> z_cache(3, std::vector<Complex>(pairs.size()));
  double t = 0.0;
  for (std::int64_t step = 0; step < steps; ++step) {
    // phases at t, t + dt/2, t + dt
    z_cache[0] = z;
    for (std::size_t p = 0; p < pairs.size(); ++p) z_cache[1][p] = z_cache[0][p] * half_rot[p];
    for (std::size_t p = 0; p < pairs.size(); ++p) z_cache[2][p] = z_cache[1][p] * half_rot[p];

    double g0 = pulse.amplitude * std::cos(pulse.carrier * t + pulse.phase);
    double gh = pulse.amplitude * std::cos(pulse.carrier * (t + 0.5 * dt) + pulse.phase);
    double g1 = pulse.amplitude * std::cos(pulse.carrier * (t + dt) + pulse.phase);

    apply_rhs(y, g0, 0, z_cache, &k1);
    scratch = y + (0.5 * dt) * k1;
    apply_rhs(scratch, gh, 1, z_cache, &k2);
    scratch = y + (0.5 * dt) * k2;
    apply_rhs(scratch, gh, 1, z_cache, &k3);
    scratch = y + dt * k3;
    apply_rhs(scratch, g1, 2, z_cache, &k4);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    z = z_cache[2];
    if ((step & 0xfff) == 0xfff) {
      for (auto& zp : z) zp /= std::abs(zp);
    }
    t += dt;
  }

  // back to the Schroedinger picture
  for (int j = 0; j < levels; ++j) {
    y(j) *= std::exp(Complex(0.0, -energy[static_cast<std::size_t>(j)] * total_time));
  }
  return y;
}

Eigen::MatrixXd chevron_scan(const SpectrumResult& spec, int levels, double duration,
                             std::span<const double> amplitudes,
                             std::span<const double> detunings, int repeats, int threads,
                             double step_scale) {
  if (amplitudes.empty() || detunings.empty()) {
    throw std::invalid_argument("chevron_scan: empty grid");
  }
  double two_photon_carrier = 0.5 * spec.transition_frequency(0, 2);

  Eigen::MatrixXd p2(amplitudes.size(), detunings.size());
  auto cells = static_cast<std::int64_t>(amplitudes.size() * detunings.size());
  parallel_for(cells, threads, [&](std::int64_t cell) {
    auto a = static_cast<Eigen::Index>(cell / static_cast<std::int64_t>(detunings.size()));
    auto d = static_cast<Eigen::Index>(cell % static_cast<std::int64_t>(detunings.size()));
    DrivePulse pulse;
    pulse.amplitude = amplitudes[static_cast<std::size_t>(a)];
    pulse.carrier = two_photon_carrier + detunings[static_cast<std::size_t>(d)];
    pulse.duration = duration;
    Eigen::VectorXcd init = Eigen::VectorXcd::Zero(levels);
    init(0) = 1.0;
    Eigen::VectorXcd final_state = simulate_drive(spec, levels, pulse, init, step_scale, repeats);
    p2(a, d) = std::norm(final_state(2));
  });
  return p2;
}

}  // namespace fluxsim
