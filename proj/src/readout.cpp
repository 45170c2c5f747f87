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

#include "fluxsim/readout.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fluxsim {

namespace {

int check_state(int s) {
  if (s < 0 || s > 2) throw std::out_of_range("readout state index must be 0, 1 or 2");
  return s;
}

/// P(X > x) for X ~ N(mean, 1).
double gauss_tail(double x, double mean) {
  return 0.5 * std::erfc((x - mean) / std::sqrt(2.0));
}

}  // namespace

void ReadoutConfig::validate() const {
  if (!(kappa > 0.0)) throw std::invalid_argument("ReadoutConfig: kappa must be > 0");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw std::invalid_argument("ReadoutConfig: efficiency must lie in (0, 1]");
  }
  if (!(photon_number >= 0.0)) {
    throw std::invalid_argument("ReadoutConfig: photon_number must be >= 0");
  }
  if (!(t_meas > 0.0)) throw std::invalid_argument("ReadoutConfig: t_meas must be > 0");
}

double photon_number(const ReadoutConfig& cfg, int state) {
  check_state(state);
  double delta = cfg.dressed[state] - cfg.drive_frequency;
  double k2 = cfg.kappa * cfg.kappa;
  return cfg.photon_number * k2 / (k2 + 4.0 * delta * delta);
}

std::complex<double> cavity_amplitude(const ReadoutConfig& cfg, int state) {
  check_state(state);
  double delta = cfg.dressed[state] - cfg.drive_frequency;
  double half_kappa = 0.5 * cfg.kappa;
  return std::sqrt(cfg.photon_number) * half_kappa /
         std::complex<double>(half_kappa, delta);
}

double dephasing_rate(const ReadoutConfig& cfg) {
  cfg.validate();
  double chi02 = cfg.chi(0, 2);
  double detuning = cfg.omega_bare - cfg.drive_frequency;
  double numerator = (photon_number(cfg, 0) + photon_number(cfg, 2)) * cfg.kappa * chi02 * chi02;
  double denominator =
      cfg.kappa * cfg.kappa + chi02 * chi02 + 4.0 * detuning * detuning;
  return numerator / denominator;
}

double dephasing_error_per_check(const ReadoutConfig& cfg) {
  return -std::expm1(-dephasing_rate(cfg) * cfg.t_meas);
}

double separation_snr(const ReadoutConfig& cfg, int i, int j) {
  cfg.validate();
  double d = std::abs(cavity_amplitude(cfg, i) - cavity_amplitude(cfg, j));
  return 2.0 * d * std::sqrt(cfg.efficiency * cfg.kappa * cfg.t_meas / 2.0);
}

ConfusionMatrix::ConfusionMatrix(int num_labels, std::vector<double> entries)
    : num_labels_(num_labels), entries_(std::move(entries)) {
  if (num_labels_ != 2 && num_labels_ != 3) {
    throw std::invalid_argument("ConfusionMatrix: supports 2 or 3 labels");
  }
  if (entries_.size() != static_cast<std::size_t>(3 * num_labels_)) {
    throw std::invalid_argument("ConfusionMatrix: expected 3 x " + std::to_string(num_labels_) +
                                " entries");
  }
  for (int s = 0; s < 3; ++s) {
    double sum = 0.0;
    for (int l = 0; l < num_labels_; ++l) {
      double v = entries_[static_cast<std::size_t>(s * num_labels_ + l)];
      if (v < -1e-15 || v > 1.0 + 1e-12) {
        throw std::invalid_argument("ConfusionMatrix: entries must lie in [0, 1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument("ConfusionMatrix: row " + std::to_string(s) +
                                  " sums to " + std::to_string(sum) + ", expected 1");
    }
  }
}

ConfusionMatrix ConfusionMatrix::identity_2label() {
  return ConfusionMatrix(2, {1, 0, 0, 1, 1, 0});
}

ConfusionMatrix ConfusionMatrix::identity_3label() {
  return ConfusionMatrix(3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
}

double ConfusionMatrix::p(int true_state, int label) const {
  check_state(true_state);
  if (label < 0 || label >= num_labels_) throw std::out_of_range("confusion label out of range");
  return entries_[static_cast<std::size_t>(true_state * num_labels_ + label)];
}

std::span<const double> ConfusionMatrix::row(int true_state) const {
  check_state(true_state);
  return {entries_.data() + static_cast<std::size_t>(true_state * num_labels_),
          static_cast<std::size_t>(num_labels_)};
}

ConfusionMatrix empirical_confusion(double fn_rate, double fp_rate) {
  if (fn_rate < 0.0 || fn_rate > 1.0 || fp_rate < 0.0 || fp_rate > 1.0) {
    throw std::invalid_argument("empirical_confusion: rates must lie in [0, 1]");
  }
  return ConfusionMatrix(2, {
                                1.0 - fp_rate, fp_rate,  // |0>
                                fn_rate, 1.0 - fn_rate,  // |1>
                                1.0 - fp_rate, fp_rate,  // |2>
                            });
}

ConfusionMatrix eol_symmetric_confusion(double fidelity) {
  if (fidelity < 0.0 || fidelity > 1.0) {
    throw std::invalid_argument("eol_symmetric_confusion: fidelity must lie in [0, 1]");
  }
  double off = (1.0 - fidelity) / 2.0;
  return ConfusionMatrix(3, {
                                fidelity, off, off,
                                off, fidelity, off,
                                off, off, fidelity,
                            });
}

std::array<double, 3> projected_means(const ReadoutConfig& cfg) {
  cfg.validate();
  std::complex<double> a0 = cavity_amplitude(cfg, 0);
  std::complex<double> a1 = cavity_amplitude(cfg, 1);
  std::complex<double> a2 = cavity_amplitude(cfg, 2);
  std::complex<double> centroid = 0.5 * (a0 + a2);
  std::complex<double> axis = a1 - centroid;
  double len = std::abs(axis);
  if (len == 0.0) {
    return {0.0, 0.0, 0.0};  // no which-state information on this axis
  }
  axis /= len;
  double gain = std::sqrt(cfg.efficiency * cfg.kappa * cfg.t_meas);
  auto proj = [&](std::complex<double> a) {
    return gain * (std::real(a - centroid) * std::real(axis) +
                   std::imag(a - centroid) * std::imag(axis));
  };
  return {proj(a0), proj(a1), proj(a2)};
}

ConfusionMatrix confusion_from_model(const ReadoutConfig& cfg,
                                     std::span<const double> thresholds) {
  if (thresholds.empty()) throw std::invalid_argument("confusion_from_model: no thresholds");
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1])) {
      throw std::invalid_argument("confusion_from_model: thresholds must be strictly increasing");
    }
  }
  // Erasure checks use the last (right-most) threshold; everything beyond it
  // on the |1> side is labeled erasure.
  double threshold = thresholds.back();
  std::array<double, 3> mean = projected_means(cfg);
  std::vector<double> entries;
  entries.reserve(6);
  for (int s = 0; s < 3; ++s) {
    double p_erase = gauss_tail(threshold, mean[static_cast<std::size_t>(s)]);
    entries.push_back(1.0 - p_erase);
    entries.push_back(p_erase);
  }
  return ConfusionMatrix(2, std::move(entries));
}

double threshold_for_false_negative(const ReadoutConfig& cfg, double fn_rate) {
  if (!(fn_rate > 0.0 && fn_rate < 1.0)) {
    throw std::invalid_argument("threshold_for_false_negative: rate must lie in (0, 1)");
  }
  std::array<double, 3> mean = projected_means(cfg);
  // P(label computational | 1) = P(X <= t) = 1 - gauss_tail(t, mean1) = fn
  // Solve by bisection on the monotone CDF.
  double lo = mean[1] - 12.0, hi = mean[1] + 12.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double fn = 1.0 - gauss_tail(mid, mean[1]);
    (fn < fn_rate ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double midpoint_fidelity(const ReadoutConfig& cfg, int i, int j) {
  check_state(i);
  check_state(j);
  std::array<double, 3> mean = projected_means(cfg);
  double d = std::abs(mean[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(j)]);
  return 1.0 - 0.5 * std::erfc(d / (2.0 * std::sqrt(2.0)));
}

double qnd_error(double p0_tilde, double p2_tilde, int m) {
  if (m < 1) throw std::invalid_argument("qnd_error: m must be >= 1");
  if (p0_tilde < 0.0 || p0_tilde > 1.0 || p2_tilde < 0.0 || p2_tilde > 1.0) {
    throw std::invalid_argument("qnd_error: survival probabilities must lie in [0, 1]");
  }
  return 1.0 - std::pow(0.5 * (p0_tilde + p2_tilde), 1.0 / static_cast<double>(m));
}

double BackactionModel::kick_probability(const ReadoutConfig& cfg, int state) const {
  return std::min(1.0, coefficient * photon_number(cfg, state));
}

BackactionModel calibrate_backaction(const ReadoutConfig& cfg, double target_eps_qnd) {
  cfg.validate();
  if (!(target_eps_qnd >= 0.0 && target_eps_qnd < 1.0)) {
    throw std::invalid_argument("calibrate_backaction: target must lie in [0, 1)");
  }
  double mean_comp = 0.5 * (photon_number(cfg, 0) + photon_number(cfg, 2));
  if (mean_comp <= 0.0) {
    throw std::invalid_argument("calibrate_backaction: computational photon number is zero");
  }
  return BackactionModel{target_eps_qnd / mean_comp};
}

}  // namespace fluxsim
