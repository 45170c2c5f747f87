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

#include "fluxsim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fluxsim/errors.hpp"
#include "fluxsim/parallel.hpp"
#include "fluxsim/rng.hpp"
#include "fluxsim/units.hpp"

namespace fluxsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int sample_label(const ConfusionMatrix& confusion, int true_state, RngStream& rng) {
  std::span<const double> row = confusion.row(true_state);
  return rng.choose(row, 1.0);
}

int kick_destination(int state, RngStream& rng) {
  int offset = rng.uniform() < 0.5 ? 1 : 2;
  return (state + offset) % 3;
}

bool flagged_by_policy(const std::vector<std::uint8_t>& labels, int k) {
  int run = 0;
  for (std::uint8_t label : labels) {
    run = label ? run + 1 : 0;
    if (run >= k) return true;
  }
  return false;
}

double binomial_sigma(double p, std::int64_t n) {
  if (n <= 0) return 0.0;
  return std::sqrt(std::max(p * (1.0 - p), 1e-12) / static_cast<double>(n));
}

}  // namespace

void ErasureExperimentConfig::validate() const {
  rates.validate();
  if (!(t_meas > 0.0)) throw std::invalid_argument("ErasureExperimentConfig: t_meas must be > 0");
  if (!(t_ec >= 0.0)) throw std::invalid_argument("ErasureExperimentConfig: t_ec must be >= 0");
  if (m < 1) throw std::invalid_argument("ErasureExperimentConfig: m must be >= 1");
  if (shots < 1) throw std::invalid_argument("ErasureExperimentConfig: shots must be >= 1");
  if (flag_policy < 1) throw std::invalid_argument("ErasureExperimentConfig: flag_policy must be >= 1");
  if (init_state < 0 || init_state > 2) {
    throw std::invalid_argument("ErasureExperimentConfig: init_state must be 0, 1 or 2");
  }
  if (qnd_error_per_check < 0.0 || qnd_error_per_check > 1.0) {
    throw std::invalid_argument("ErasureExperimentConfig: qnd_error_per_check must lie in [0, 1]");
  }
  if (erasure_confusion.num_labels() != 2) {
    throw std::invalid_argument("ErasureExperimentConfig: erasure confusion needs 2 labels");
  }
  if (eol_confusion.num_labels() != 3) {
    throw std::invalid_argument("ErasureExperimentConfig: EOL confusion needs 3 labels");
  }
}

std::vector<ShotRecord> run_erasure_experiment(const ErasureExperimentConfig& cfg, int threads) {
  cfg.validate();
  std::vector<ShotRecord> records(static_cast<std::size_t>(cfg.shots));

  parallel_for(cfg.shots, threads, [&](std::int64_t shot) {
    RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(shot), cfg.stream_salt);
    ShotRecord& rec = records[static_cast<std::size_t>(shot)];
    rec.check_labels.resize(static_cast<std::size_t>(cfg.m));
    rec.midpoint_states.resize(static_cast<std::size_t>(cfg.m));

    int state = cfg.init_state;
    for (int w = 0; w < cfg.m; ++w) {
      state = advance_state(cfg.rates, state, cfg.t_ec + 0.5 * cfg.t_meas, rng);
      rec.midpoint_states[static_cast<std::size_t>(w)] = static_cast<std::uint8_t>(state);
      int label = sample_label(cfg.erasure_confusion, state, rng);
      rec.check_labels[static_cast<std::size_t>(w)] = static_cast<std::uint8_t>(label);
      state = advance_state(cfg.rates, state, 0.5 * cfg.t_meas, rng);
      if (cfg.qnd_error_per_check > 0.0 && rng.uniform() < cfg.qnd_error_per_check) {
        state = kick_destination(state, rng);
      }
    }
    rec.true_final_state = static_cast<std::uint8_t>(state);
    rec.eol_label = static_cast<std::uint8_t>(sample_label(cfg.eol_confusion, state, rng));
    rec.flagged = flagged_by_policy(rec.check_labels, cfg.flag_policy);
  });
  return records;
}

std::vector<SurvivalPoint> survival_curve(const ErasureExperimentConfig& cfg,
                                          std::span<const int> m_grid, int threads) {
  if (m_grid.empty()) throw std::invalid_argument("survival_curve: empty m grid");

  std::vector<SurvivalPoint> curve;
  curve.reserve(m_grid.size());
  for (std::size_t idx = 0; idx < m_grid.size(); ++idx) {
    ErasureExperimentConfig point_cfg = cfg;
    point_cfg.m = m_grid[idx];
    point_cfg.stream_salt = cfg.stream_salt + static_cast<std::uint32_t>(idx) + 1;
    std::vector<ShotRecord> records = run_erasure_experiment(point_cfg, threads);

    SurvivalPoint pt;
    pt.m = point_cfg.m;
    pt.t_tot = point_cfg.t_tot();
    pt.shots_total = static_cast<std::int64_t>(records.size());
    std::int64_t p2_all = 0, p2_unflagged = 0;
    for (const auto& rec : records) {
      if (rec.eol_label == 2) ++p2_all;
      if (!rec.flagged) {
        ++pt.shots_unflagged;
        if (rec.eol_label == 2) ++p2_unflagged;
      }
    }
    pt.p2_unselected = static_cast<double>(p2_all) / static_cast<double>(pt.shots_total);
    pt.survival_fraction =
        static_cast<double>(pt.shots_unflagged) / static_cast<double>(pt.shots_total);
    pt.sigma_unselected = binomial_sigma(pt.p2_unselected, pt.shots_total);
    if (pt.shots_unflagged > 0) {
      pt.p2_postselected =
          static_cast<double>(p2_unflagged) / static_cast<double>(pt.shots_unflagged);
      pt.sigma_postselected = binomial_sigma(*pt.p2_postselected, pt.shots_unflagged);
    }
    curve.push_back(std::move(pt));
  }
  return curve;
}

std::vector<CurvePoint> unselected_curve(std::span<const SurvivalPoint> curve) {
  std::vector<CurvePoint> out;
  out.reserve(curve.size());
  for (const auto& pt : curve) {
    out.push_back(CurvePoint{pt.t_tot, pt.p2_unselected, pt.sigma_unselected});
  }
  return out;
}

std::vector<CurvePoint> postselected_curve(std::span<const SurvivalPoint> curve) {
  std::vector<CurvePoint> out;
  for (const auto& pt : curve) {
    if (pt.p2_postselected.has_value()) {
      out.push_back(CurvePoint{pt.t_tot, *pt.p2_postselected, pt.sigma_postselected});
    }
  }
  return out;
}

LifetimeEstimate logical_lifetime(std::span<const CurvePoint> points) {
  if (points.size() < 4) {
    throw std::invalid_argument("logical_lifetime: need at least 4 nonempty points");
  }

  Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
  Eigen::VectorXd w(static_cast<Eigen::Index>(points.size()));
  double t_max = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = points[i].p;
    double sigma = points[i].sigma > 0.0 ? points[i].sigma : 1.0;
    w(static_cast<Eigen::Index>(i)) = 1.0 / (sigma * sigma);
    t_max = std::max(t_max, points[i].t);
  }
  double span = std::max(t_max, 1e-300);

  // p = (a, log T, u) with offset c = 0.5 / (1 + exp(-u)) in [0, 0.5]
  auto model = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(points.size()));
    double t_decay = std::exp(p(1));
    double c = 0.5 / (1.0 + std::exp(-p(2)));
    for (std::size_t i = 0; i < points.size(); ++i) {
      out(static_cast<Eigen::Index>(i)) = p(0) * std::exp(-points[i].t / t_decay) + c;
    }
    return out;
  };

  double c0 = std::clamp(y(y.size() - 1), 1e-3, 0.499);
  double u0 = std::log(c0 / (0.5 - c0));
  const std::vector<std::string> names = {"amplitude", "t1l", "offset_logit"};

  FitResult best;
  bool have_best = false;
  for (double t_start : {span / 4.0, span, 4.0 * span}) {
    Eigen::VectorXd p0(3);
    p0 << std::max(y.maxCoeff() - y.minCoeff(), 1e-6), std::log(t_start), u0;
    FitResult fit = levenberg_fit(model, y, w, p0, names);
    if (!have_best || fit.residual_norm < best.residual_norm) {
      best = std::move(fit);
      have_best = true;
    }
  }

  LifetimeEstimate estimate;
  double t1l = std::exp(best.parameters(1));
  double sigma_log = best.converged && std::isfinite(best.standard_errors(1))
                         ? best.standard_errors(1)
                         : kInf;
  estimate.stderr_t1l = std::isfinite(sigma_log) ? t1l * sigma_log : kInf;
  estimate.t1l = t1l;
  estimate.finite = true;
  if (best.parameters(0) <= 0.0 || t1l > 100.0 * span) {
    estimate.finite = false;
    estimate.t1l = kInf;
    best.flags.push_back("non_decaying");
  }
  // report c rather than its logit
  best.parameter_names[2] = "offset";
  best.parameters(2) = 0.5 / (1.0 + std::exp(-best.parameters(2)));
  best.parameters(1) = t1l;
  best.parameter_names[1] = "t1l";
  if (best.converged) {
    best.standard_errors(1) = estimate.stderr_t1l;
    best.standard_errors(2) = kInf;  // logit scale error not propagated
  }
  estimate.fit = std::move(best);
  return estimate;
}

TecSweepResult lifetime_vs_tec(const ErasureExperimentConfig& cfg,
                               std::span<const double> tec_grid, double max_t_tot,
                               int points_per_curve, int threads) {
  if (tec_grid.empty()) throw std::invalid_argument("lifetime_vs_tec: empty t_EC grid");
  if (points_per_curve < 4) {
    throw std::invalid_argument("lifetime_vs_tec: need at least 4 points per curve");
  }

  TecSweepResult result;
  for (std::size_t i = 0; i < tec_grid.size(); ++i) {
    ErasureExperimentConfig tec_cfg = cfg;
    tec_cfg.t_ec = tec_grid[i];
    tec_cfg.stream_salt = cfg.stream_salt + 1000u * (static_cast<std::uint32_t>(i) + 1);
    double period = tec_cfg.t_ec + tec_cfg.t_meas;
    int m_max = std::max(points_per_curve, static_cast<int>(std::floor(max_t_tot / period)));
    std::vector<int> m_grid;
    for (int k = 0; k < points_per_curve; ++k) {
      int m = 1 + static_cast<int>(std::llround(static_cast<double>(k) *
                                                (m_max - 1) / (points_per_curve - 1)));
      if (m_grid.empty() || m != m_grid.back()) m_grid.push_back(m);
    }
    std::vector<SurvivalPoint> curve = survival_curve(tec_cfg, m_grid, threads);

    TecSweepRow row;
    row.t_ec = tec_cfg.t_ec;
    std::vector<CurvePoint> post = postselected_curve(curve);
    std::vector<CurvePoint> unsel = unselected_curve(curve);
    if (post.size() < 4) {
      throw NumericalError("lifetime_vs_tec: fewer than 4 surviving curve points at t_EC = " +
                           std::to_string(tec_cfg.t_ec));
    }
    row.postselected = logical_lifetime(post);
    row.unselected = logical_lifetime(unsel);
    result.rows.push_back(std::move(row));
  }

  result.postselected_monotone_3sigma = true;
  for (std::size_t i = 0; i + 1 < result.rows.size(); ++i) {
    const LifetimeEstimate& a = result.rows[i].postselected;
    const LifetimeEstimate& b = result.rows[i + 1].postselected;
    if (!a.finite || !b.finite) continue;  // an unresolved lifetime cannot violate ordering
    double tolerance = 3.0 * std::hypot(a.stderr_t1l, b.stderr_t1l);
    if (std::isfinite(tolerance) && b.t1l > a.t1l + tolerance) {
      result.postselected_monotone_3sigma = false;
    }
  }
  return result;
}

// --- QND map -------------------------------------------------------------------

void QndSequenceConfig::validate() const {
  rates.validate();
  readout.validate();
  if (checks < 1) throw std::invalid_argument("QndSequenceConfig: checks must be >= 1");
  if (!(t_tot > 0.0)) throw std::invalid_argument("QndSequenceConfig: t_tot must be > 0");
  if (t_tot < checks * readout.t_meas) {
    throw std::invalid_argument("QndSequenceConfig: t_tot shorter than the stacked check windows");
  }
  if (shots < 1) throw std::invalid_argument("QndSequenceConfig: shots must be >= 1");
  if (eol_confusion.num_labels() != 3) {
    throw std::invalid_argument("QndSequenceConfig: EOL confusion needs 3 labels");
  }
}

QndMaps qnd_sequence(const QndSequenceConfig& cfg, std::span<const double> strengths,
                     std::span<const double> frequencies, int threads) {
  cfg.validate();
  if (strengths.empty() || frequencies.empty()) {
    throw std::invalid_argument("qnd_sequence: empty grid");
  }

  QndMaps maps;
  maps.strengths.assign(strengths.begin(), strengths.end());
  maps.frequencies.assign(frequencies.begin(), frequencies.end());
  maps.model = calibrate_backaction(cfg.readout, cfg.backaction_eps_at_reference);

  const double period = cfg.t_tot / cfg.checks;
  const double gap = period - cfg.readout.t_meas;

  // exact no-measurement normalizer per initial state
  std::array<double, 3> normalizer{};
  for (int init = 0; init < 3; ++init) {
    PopulationState start{init == 0 ? 1.0 : 0.0, init == 1 ? 1.0 : 0.0, init == 2 ? 1.0 : 0.0};
    PopulationState end = evolve_populations(cfg.rates, start, cfg.t_tot);
    double p = 0.0;
    for (int s = 0; s < 3; ++s) p += end[s] * cfg.eol_confusion.p(s, init);
    normalizer[static_cast<std::size_t>(init)] = p;
  }

  for (auto& map : maps.p_tilde) {
    map.resize(static_cast<Eigen::Index>(strengths.size()),
               static_cast<Eigen::Index>(frequencies.size()));
  }

  const auto cells = static_cast<std::int64_t>(3 * strengths.size() * frequencies.size());
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    auto init = static_cast<int>(cell % 3);
    auto rest = static_cast<std::size_t>(cell / 3);
    auto si = rest / frequencies.size();
    auto fi = rest % frequencies.size();

    ReadoutConfig probe = cfg.readout;
    probe.photon_number = strengths[si];
    probe.drive_frequency = frequencies[fi];
    std::array<double, 3> kick{};
    for (int s = 0; s < 3; ++s) kick[static_cast<std::size_t>(s)] = maps.model.kick_probability(probe, s);

    std::vector<std::int64_t> hits(static_cast<std::size_t>(cfg.shots), 0);
    parallel_for(cfg.shots, threads, [&](std::int64_t shot) {
      RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(shot),
                    0x51000000u + static_cast<std::uint32_t>(cell));
      int state = init;
      for (int w = 0; w < cfg.checks; ++w) {
        state = advance_state(cfg.rates, state, gap + 0.5 * probe.t_meas, rng);
        state = advance_state(cfg.rates, state, 0.5 * probe.t_meas, rng);
        double p_kick = kick[static_cast<std::size_t>(state)];
        if (p_kick > 0.0 && rng.uniform() < p_kick) state = kick_destination(state, rng);
      }
      int label = sample_label(cfg.eol_confusion, state, rng);
      hits[static_cast<std::size_t>(shot)] = (label == init) ? 1 : 0;
    });
    std::int64_t stayed = 0;
    for (std::int64_t h : hits) stayed += h;
    double p = static_cast<double>(stayed) / static_cast<double>(cfg.shots);
    maps.p_tilde[static_cast<std::size_t>(init)](static_cast<Eigen::Index>(si),
                                                 static_cast<Eigen::Index>(fi)) =
        p / normalizer[static_cast<std::size_t>(init)];
  }
  return maps;
}

// --- Ramsey ----------------------------------------------------------------------

void RamseyConfig::validate() const {
  if (!(t1_logical > 0.0)) throw std::invalid_argument("RamseyConfig: t1_logical must be > 0");
  if (!(gamma_phi_residual >= 0.0)) {
    throw std::invalid_argument("RamseyConfig: gamma_phi_residual must be >= 0");
  }
  if (delay_grid.empty()) throw std::invalid_argument("RamseyConfig: empty delay grid");
  for (double t : delay_grid) {
    if (t < 0.0) throw std::invalid_argument("RamseyConfig: negative delay");
  }
  if (readout_during_delay.has_value()) readout_during_delay->validate();
}

double RamseyConfig::total_dephasing_rate() const {
  double gamma = gamma_phi_residual;
  if (readout_during_delay.has_value()) gamma += dephasing_rate(*readout_during_delay);
  return gamma;
}

std::vector<XyPoint> ramsey_signal(const RamseyConfig& cfg) {
  cfg.validate();
  double decay_rate = 0.5 / cfg.t1_logical + cfg.total_dephasing_rate();
  std::vector<XyPoint> out;
  out.reserve(cfg.delay_grid.size());
  for (double t : cfg.delay_grid) {
    out.push_back(XyPoint{t, 0.5 + 0.5 * std::exp(-decay_rate * t) * std::cos(cfg.detuning * t)});
  }
  return out;
}

std::vector<XyPoint> ramsey_stochastic(const RamseyConfig& cfg, std::int64_t shots,
                                       std::uint64_t master_seed, int threads) {
  cfg.validate();
  if (shots < 1) throw std::invalid_argument("ramsey_stochastic: shots must be >= 1");
  double gamma_phi = cfg.total_dephasing_rate();

  std::vector<XyPoint> out(cfg.delay_grid.size());
  for (std::size_t d = 0; d < cfg.delay_grid.size(); ++d) {
    double t = cfg.delay_grid[d];
    double amp = 0.5 * std::exp(-0.5 * t / cfg.t1_logical);
    double phase_sigma = std::sqrt(2.0 * gamma_phi * t);
    std::vector<double> contributions(static_cast<std::size_t>(shots));
    parallel_for(shots, threads, [&](std::int64_t shot) {
      RngStream rng(master_seed, static_cast<std::uint64_t>(shot),
                    0x4a000000u + static_cast<std::uint32_t>(d));
      double phase = cfg.detuning * t + phase_sigma * rng.normal();
      contributions[static_cast<std::size_t>(shot)] = 0.5 + amp * std::cos(phase);
    });
    double sum = 0.0;
    for (double c : contributions) sum += c;
    out[d] = XyPoint{t, sum / static_cast<double>(shots)};
  }
  return out;
}

}  // namespace fluxsim
