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

#include "fluxsim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <set>
#include <stdexcept>

#include "fluxsim/parallel.hpp"
#include "fluxsim/rng.hpp"
#include "fluxsim/units.hpp"

namespace fluxsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

int FitResult::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < parameter_names.size(); ++i) {
    if (parameter_names[i] == name) return static_cast<int>(i);
  }
  throw std::out_of_range("FitResult: unknown parameter " + name);
}

double FitResult::parameter(const std::string& name) const {
  return parameters(index_of(name));
}

double FitResult::standard_error(const std::string& name) const {
  if (standard_errors.size() == 0) throw std::logic_error("FitResult: fit did not converge");
  return standard_errors(index_of(name));
}

bool FitResult::is_unidentifiable(const std::string& name) const {
  return unidentifiable[static_cast<std::size_t>(index_of(name))];
}

bool FitResult::has_flag(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

FitResult levenberg_fit(const ModelFunction& model, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& weights, const Eigen::VectorXd& p0,
                        const std::vector<std::string>& names, const FitOptions& opts) {
  const auto n = y.size();
  const auto np = p0.size();
  if (weights.size() != n) throw std::invalid_argument("levenberg_fit: weight/data size mismatch");
  if (static_cast<Eigen::Index>(names.size()) != np) {
    throw std::invalid_argument("levenberg_fit: name/parameter size mismatch");
  }

  Eigen::VectorXd sqrt_w = weights.cwiseSqrt();
  auto residual = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
    return sqrt_w.cwiseProduct(y - model(p));
  };

  FitResult result;
  result.parameter_names = names;

  Eigen::VectorXd p = p0;
  Eigen::VectorXd r = residual(p);
  double cost = r.squaredNorm();
  result.cost_history.push_back(cost);

  double lambda = opts.lambda_init;
  bool converged = false;
  int iter = 0;

  auto jacobian = [&](const Eigen::VectorXd& at) {
    Eigen::MatrixXd j(n, np);
    for (Eigen::Index k = 0; k < np; ++k) {
      double h = std::max(opts.jacobian_rel_step * std::abs(at(k)), opts.jacobian_abs_step);
      Eigen::VectorXd pk = at;
      pk(k) = at(k) + h;
      Eigen::VectorXd rp = residual(pk);
      pk(k) = at(k) - h;
      Eigen::VectorXd rm = residual(pk);
      j.col(k) = (rp - rm) / (2.0 * h);
    }
    return j;
  };

  for (; iter < opts.max_iterations && !converged; ++iter) {
    Eigen::MatrixXd j = jacobian(p);
    Eigen::MatrixXd a = j.transpose() * j;
    Eigen::VectorXd g = j.transpose() * r;

    bool accepted = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Eigen::MatrixXd damped = a;
      for (Eigen::Index k = 0; k < np; ++k) {
        damped(k, k) += lambda * std::max(a(k, k), 1e-30);
      }
      Eigen::VectorXd delta = damped.ldlt().solve(-g);
      if (!delta.allFinite()) {
        lambda *= opts.lambda_raise;
        continue;
      }
      Eigen::VectorXd p_try = p + delta;
      Eigen::VectorXd r_try = residual(p_try);
      double cost_try = r_try.squaredNorm();
      if (std::isfinite(cost_try) && cost_try <= cost) {
        double rel_step = delta.norm() / (p.norm() + 1e-300);
        double rel_drop = (cost - cost_try) / std::max(cost, 1e-300);
        p = std::move(p_try);
        r = std::move(r_try);
        cost = cost_try;
        result.cost_history.push_back(cost);
        lambda = std::max(lambda * opts.lambda_drop, 1e-14);
        accepted = true;
        if (rel_step < opts.rel_step_tol || rel_drop < opts.rel_residual_tol) converged = true;
        break;
      }
      lambda *= opts.lambda_raise;
      if (lambda > 1e18) break;
    }
    if (!accepted) {
      // no descent direction at numerical precision: stationary point
      converged = true;
    }
  }

  result.parameters = p;
  result.iterations = iter;
  result.converged = converged;
  result.residual_norm = std::sqrt(cost);
  result.unidentifiable.assign(static_cast<std::size_t>(np), false);

  if (converged) {
    Eigen::MatrixXd j = jacobian(p);
    Eigen::MatrixXd a = j.transpose() * j;
    double dof = std::max<double>(1.0, static_cast<double>(n - np));
    double s2 = cost / dof;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    double cutoff = std::max(eig.eigenvalues().maxCoeff(), 0.0) * 1e-12;
    result.standard_errors.resize(np);
    for (Eigen::Index k = 0; k < np; ++k) {
      double var = 0.0;
      double null_weight = 0.0;
      for (Eigen::Index m = 0; m < np; ++m) {
        double v = eig.eigenvectors()(k, m);
        if (eig.eigenvalues()(m) > cutoff) {
          var += v * v / eig.eigenvalues()(m);
        } else {
          null_weight += v * v;
        }
      }
      if (null_weight > 1e-8) {
        result.standard_errors(k) = kInf;
        result.unidentifiable[static_cast<std::size_t>(k)] = true;
      } else {
        result.standard_errors(k) = std::sqrt(var * s2);
      }
    }
  }
  return result;
}

// --- fit_rates ---------------------------------------------------------------

void DecayDataset::validate() const {
  auto check_series = [](const std::vector<DecayPoint>& series, const char* label) {
    for (const auto& pt : series) {
      auto in_unit = [](double v) { return v >= -1e-9 && v <= 1.0 + 1e-9; };
      if (!in_unit(pt.p0) || !in_unit(pt.p1) || !in_unit(pt.p2)) {
        throw std::invalid_argument(std::string("DecayDataset: population outside [0,1] in ") +
                                    label);
      }
      double sum = pt.p0 + pt.p1 + pt.p2;
      if (sum < 0.9 || sum > 1.1) {
        throw std::invalid_argument(std::string("DecayDataset: per-point sum outside [0.9, 1.1] in ") +
                                    label);
      }
      if (pt.t < 0.0) {
        throw std::invalid_argument(std::string("DecayDataset: negative time in ") + label);
      }
    }
  };
  check_series(init1, "init1 series");
  check_series(init2, "init2 series");
}

namespace {

struct RateModelContext {
  const DecayDataset* data;
  RateParameterization parameterization;

  RateMatrix rates_from(const Eigen::VectorXd& p) const {
    auto decode = [&](double v) {
      if (parameterization == RateParameterization::kLog) return std::exp(v);
      return std::max(v, 0.0);
    };
    return RateMatrix{decode(p(0)), decode(p(1)), decode(p(2)), decode(p(3))};
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& p) const {
    RateMatrix rates = rates_from(p);
    Eigen::VectorXd out(3 * static_cast<Eigen::Index>(data->init1.size() + data->init2.size()));
    Eigen::Index at = 0;
    for (int series = 0; series < 2; ++series) {
      const auto& pts = series == 0 ? data->init1 : data->init2;
      PopulationState init = series == 0 ? PopulationState{0, 1, 0} : PopulationState{0, 0, 1};
      for (const auto& pt : pts) {
        PopulationState s = evolve_populations(rates, init, pt.t);
        out(at++) = s.p0;
        out(at++) = s.p1;
        out(at++) = s.p2;
      }
    }
    return out;
  }
};

void stack_decay_data(const DecayDataset& data, Eigen::VectorXd* y, Eigen::VectorXd* w) {
  Eigen::Index n = 3 * static_cast<Eigen::Index>(data.init1.size() + data.init2.size());
  y->resize(n);
  w->resize(n);
  Eigen::Index at = 0;
  for (const auto* series : {&data.init1, &data.init2}) {
    for (const auto& pt : *series) {
      double weight = pt.sigma > 0.0 ? 1.0 / (pt.sigma * pt.sigma) : 1.0;
      (*y)(at) = pt.p0;
      (*w)(at++) = weight;
      (*y)(at) = pt.p1;
      (*w)(at++) = weight;
      (*y)(at) = pt.p2;
      (*w)(at++) = weight;
    }
  }
}

}  // namespace

FitResult fit_rates(const DecayDataset& data, const RateMatrix& initial_guess,
                    RateParameterization parameterization, int threads) {
  data.validate();
  if (data.init1.size() < 8 || data.init2.size() < 8) {
    throw std::invalid_argument("fit_rates: need at least 8 time points per series");
  }

  RateModelContext model{&data, parameterization};
  Eigen::VectorXd y, w;
  stack_decay_data(data, &y, &w);

  double rate_scale = std::max({initial_guess.g10, initial_guess.g12, initial_guess.g20,
                                initial_guess.g21, 1.0});
  auto encode = [&](double rate) {
    double floor_rate = 1e-6 * rate_scale;
    double v = std::max(rate, floor_rate);
    return parameterization == RateParameterization::kLog ? std::log(v) : v;
  };
  Eigen::VectorXd p0(4);
  p0 << encode(initial_guess.g10), encode(initial_guess.g12), encode(initial_guess.g20),
      encode(initial_guess.g21);

  const std::vector<std::string> names = {"g10", "g12", "g20", "g21"};

  // 5 deterministic starts: the caller's guess plus four perturbed copies.
  constexpr int kStarts = 5;
  std::vector<FitResult> candidates(kStarts);
  parallel_for(kStarts, threads, [&](std::int64_t k) {
    Eigen::VectorXd start = p0;
    if (k > 0) {
      RngStream rng(0x9e3779b97f4a7c15ull, static_cast<std::uint64_t>(k), 0xf17);
      for (Eigen::Index i = 0; i < 4; ++i) {
        double factor = std::exp(0.5 * rng.normal());
        if (parameterization == RateParameterization::kLog) {
          start(i) += std::log(factor);
        } else {
          start(i) *= factor;
        }
      }
    }
    candidates[static_cast<std::size_t>(k)] = levenberg_fit(model, y, w, start, names);
  });

  int best = 0;
  for (int k = 1; k < kStarts; ++k) {
    double a = candidates[static_cast<std::size_t>(k)].residual_norm;
    double b = candidates[static_cast<std::size_t>(best)].residual_norm;
    if (a < b * (1.0 - 1e-12)) {
      best = k;
    } else if (a <= b * (1.0 + 1e-12) &&
               candidates[static_cast<std::size_t>(k)].parameters.norm() <
                   candidates[static_cast<std::size_t>(best)].parameters.norm()) {
      best = k;
    }
  }
  FitResult result = std::move(candidates[static_cast<std::size_t>(best)]);

  // report rates in 1/s regardless of the internal parameterization
  if (parameterization == RateParameterization::kLog) {
    Eigen::VectorXd rates(4), errs(4);
    for (Eigen::Index i = 0; i < 4; ++i) {
      rates(i) = std::exp(result.parameters(i));
      if (result.converged) {
        double sigma_log = result.standard_errors(i);
        errs(i) = std::isfinite(sigma_log) ? rates(i) * sigma_log : kInf;
        // relative error > 300% means the data does not constrain this rate
        if (sigma_log > 3.0) result.unidentifiable[static_cast<std::size_t>(i)] = true;
      }
    }
    result.parameters = rates;
    if (result.converged) result.standard_errors = errs;
  } else if (result.converged) {
    for (Eigen::Index i = 0; i < 4; ++i) {
      if (result.standard_errors(i) > 3.0 * std::abs(result.parameters(i))) {
        result.unidentifiable[static_cast<std::size_t>(i)] = true;
      }
    }
  }
  return result;
}

RateMatrix rates_from_fit(const FitResult& result) {
  return RateMatrix{result.parameter("g10"), result.parameter("g12"), result.parameter("g20"),
                    result.parameter("g21")};
}

// --- fit_dephasing -----------------------------------------------------------

FitResult fit_dephasing(std::span<const DephasingPoint> data, const ReadoutConfig& fixed) {
  if (data.size() < 6) throw std::invalid_argument("fit_dephasing: need at least 6 points");
  std::set<double> strengths;
  for (const auto& pt : data) strengths.insert(pt.photon_number);
  if (strengths.size() < 2) {
    throw std::invalid_argument("fit_dephasing: need points spanning at least 2 strengths");
  }

  Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
  Eigen::VectorXd w(static_cast<Eigen::Index>(data.size()));
  double freq_center = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = data[i].gamma_phi;
    w(static_cast<Eigen::Index>(i)) =
        data[i].sigma > 0.0 ? 1.0 / (data[i].sigma * data[i].sigma) : 1.0;
    freq_center += data[i].drive_frequency;
  }
  freq_center /= static_cast<double>(data.size());

  // p = (log gamma_phi_residual, omega_bare)
  auto model = [&, fixed](const Eigen::VectorXd& p) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(data.size()));
    double residual_rate = std::exp(p(0));
    for (std::size_t i = 0; i < data.size(); ++i) {
      ReadoutConfig cfg = fixed;
      cfg.photon_number = data[i].photon_number;
      cfg.drive_frequency = data[i].drive_frequency;
      cfg.omega_bare = p(1);
      out(static_cast<Eigen::Index>(i)) = dephasing_rate(cfg) + residual_rate;
    }
    return out;
  };

  double gamma_floor = std::max(1e-6, y.minCoeff() > 0 ? 0.5 * y.minCoeff() : 1e-3);
  const std::vector<std::string> names = {"gamma_phi_residual", "omega_bare"};

  // The dephasing profile is symmetric about each drive frequency, so a bad
  // bare-frequency start can park the optimizer in a mirror minimum; probe a
  // deterministic ladder of offsets and keep the best.
  const double mhz = kTwoPi * 1e6;
  FitResult best;
  bool have_best = false;
  for (double offset : {-25.0 * mhz, -10.0 * mhz, -4.0 * mhz, 4.0 * mhz, 10.0 * mhz, 25.0 * mhz}) {
    Eigen::VectorXd p0(2);
    p0 << std::log(gamma_floor), freq_center + offset;
    FitResult fit = levenberg_fit(model, y, w, p0, names);
    if (!have_best || fit.residual_norm < best.residual_norm) {
      best = std::move(fit);
      have_best = true;
    }
  }

  double residual_rate = std::exp(best.parameters(0));
  if (best.converged) {
    double sigma_log = best.standard_errors(0);
    Eigen::VectorXd errs(2);
    errs << (std::isfinite(sigma_log) ? residual_rate * sigma_log : kInf),
        best.standard_errors(1);
    best.standard_errors = errs;
    if (sigma_log > 3.0) best.unidentifiable[0] = true;
    if (best.standard_errors(1) > 3.0 * std::abs(best.parameters(1))) best.unidentifiable[1] = true;
  }
  best.parameters(0) = residual_rate;
  return best;
}

// --- fit_exponential ---------------------------------------------------------

FitResult fit_exponential(std::span<const XyPoint> points) {
  if (points.size() < 4) throw std::invalid_argument("fit_exponential: need at least 4 points");

  Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
  Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(points.size()));
  double t_min = kInf, t_max = -kInf;
  for (std::size_t i = 0; i < points.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = points[i].y;
    t_min = std::min(t_min, points[i].x);
    t_max = std::max(t_max, points[i].x);
  }
  double span = std::max(t_max - t_min, 1e-300);
  double range = y.maxCoeff() - y.minCoeff();

  const std::vector<std::string> names = {"amplitude", "t_decay", "offset"};

  if (range <= 1e-14 * std::max(1.0, y.cwiseAbs().maxCoeff())) {
    FitResult flat;
    flat.parameter_names = names;
    flat.parameters = Eigen::Vector3d(0.0, kInf, y.mean());
    flat.converged = true;
    flat.standard_errors = Eigen::Vector3d(0.0, kInf, 0.0);
    flat.unidentifiable = {true, true, false};
    flat.flags.push_back("non_decaying");
    flat.cost_history.push_back(0.0);
    return flat;
  }

  // p = (a, log T, c)
  auto model = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(points.size()));
    double t_decay = std::exp(p(1));
    for (std::size_t i = 0; i < points.size(); ++i) {
      out(static_cast<Eigen::Index>(i)) = p(0) * std::exp(-points[i].x / t_decay) + p(2);
    }
    return out;
  };

  FitResult best;
  bool have_best = false;
  for (double t_start : {span / 6.0, span / 2.0, 2.0 * span}) {
    Eigen::VectorXd p0(3);
    p0 << points.front().y - points.back().y, std::log(t_start), points.back().y;
    FitResult fit = levenberg_fit(model, y, w, p0, names);
    if (!have_best || fit.residual_norm < best.residual_norm) {
      best = std::move(fit);
      have_best = true;
    }
  }

  double t_decay = std::exp(best.parameters(1));
  if (best.converged) {
    double sigma_log = best.standard_errors(1);
    best.standard_errors(1) = std::isfinite(sigma_log) ? t_decay * sigma_log : kInf;
    if (sigma_log > 3.0) best.unidentifiable[1] = true;
  }
  best.parameters(1) = t_decay;
  if (best.parameters(0) <= 0.0 || t_decay > 1e3 * span) {
    best.flags.push_back("non_decaying");
  }
  return best;
}

// --- fit_ramsey ----------------------------------------------------------------

FitResult fit_ramsey(std::span<const XyPoint> points) {
  if (points.size() < 10) throw std::invalid_argument("fit_ramsey: need at least 10 points");

  Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) y(static_cast<Eigen::Index>(i)) = points[i].y;
  Eigen::VectorXd w = Eigen::VectorXd::Ones(y.size());

  double t_min = kInf, t_max = -kInf, dt_min = kInf;
  std::vector<double> ts(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    ts[i] = points[i].x;
    t_min = std::min(t_min, points[i].x);
    t_max = std::max(t_max, points[i].x);
  }
  std::vector<double> sorted_t = ts;
  std::sort(sorted_t.begin(), sorted_t.end());
  std::vector<double> gaps;
  for (std::size_t i = 1; i < sorted_t.size(); ++i) {
    double d = sorted_t[i] - sorted_t[i - 1];
    if (d > 0.0) {
      gaps.push_back(d);
      dt_min = std::min(dt_min, d);
    }
  }
  double dt_med = gaps.empty() ? 1.0 : gaps[gaps.size() / 2];
  double span = std::max(t_max - t_min, 1e-300);

  double mean = y.mean();
  double amp0 = 0.5 * (y.maxCoeff() - y.minCoeff());

  // coarse periodogram for the detuning start
  double best_freq = 0.0, best_power = -1.0;
  std::complex<double> best_coef(1.0, 0.0);
  const int kFreqCandidates = 512;
  double freq_cap = (kTwoPi / 2.0) / dt_min;  // Nyquist of the densest spacing
  for (int k = 1; k <= kFreqCandidates; ++k) {
    double freq = freq_cap * k / kFreqCandidates;
    std::complex<double> s(0.0, 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      s += (points[i].y - mean) * std::exp(std::complex<double>(0.0, -freq * points[i].x));
    }
    double power = std::norm(s);
    if (power > best_power) {
      best_power = power;
      best_freq = freq;
      best_coef = s;
    }
  }

  const std::vector<std::string> names = {"amplitude", "t2", "detuning", "phase", "offset"};

  // p = (a, log T2, detuning, phase, offset)
  auto model = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(points.size()));
    double t2 = std::exp(p(1));
    for (std::size_t i = 0; i < points.size(); ++i) {
      out(static_cast<Eigen::Index>(i)) =
          p(4) + p(0) * std::exp(-points[i].x / t2) * std::cos(p(2) * points[i].x + p(3));
    }
    return out;
  };

  FitResult best;
  bool have_best = false;
  for (double t2_start : {span / 2.0, span, 4.0 * span}) {
    Eigen::VectorXd p0(5);
    p0 << amp0, std::log(t2_start), best_freq, std::arg(best_coef), mean;
    FitResult fit = levenberg_fit(model, y, w, p0, names);
    if (!have_best || fit.residual_norm < best.residual_norm) {
      best = std::move(fit);
      have_best = true;
    }
  }

  double t2 = std::exp(best.parameters(1));
  if (best.converged) {
    double sigma_log = best.standard_errors(1);
    best.standard_errors(1) = std::isfinite(sigma_log) ? t2 * sigma_log : kInf;
    if (sigma_log > 3.0) best.unidentifiable[1] = true;
  }
  best.parameters(1) = t2;

  double amp = std::abs(best.parameters(0));
  double y_scale = std::max(std::abs(y.maxCoeff()), std::abs(y.minCoeff()));
  bool zero_contrast = amp < 1e-6 * std::max(1.0, y_scale);
  if (best.converged && !zero_contrast) {
    zero_contrast = std::isfinite(best.standard_errors(0)) &&
                    best.standard_errors(0) > 3.0 * amp;
  }
  if (zero_contrast) {
    best.flags.push_back("zero_contrast");
    best.unidentifiable[1] = true;
  }
  if (std::abs(best.parameters(2)) > (kTwoPi / 2.0) / dt_med) {
    best.flags.push_back("aliased_detuning");
  }
  return best;
}

}  // namespace fluxsim
