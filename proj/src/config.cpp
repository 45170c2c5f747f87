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

#include "fluxsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fluxsim/errors.hpp"
#include "fluxsim/io.hpp"
#include "fluxsim/units.hpp"

namespace fluxsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config error at " + path + ": " + what);
}

const json& expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  return j;
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
  }
}

bool has(const json& obj, const char* key) { return obj.contains(key); }

double number_at(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required value");
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

std::int64_t integer_or(const json& obj, const char* key, const std::string& path,
                        std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::int64_t integer_at(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required value");
  return integer_or(obj, key, path, 0);
}

bool boolean_or(const json& obj, const char* key, const std::string& path, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

// Frequencies and rates must arrive as tagged strings.
double frequency_at(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required value");
  const json& v = obj.at(key);
  if (v.is_number()) {
    fail(path + "." + key,
         "bare number; frequencies/rates need a unit tag, e.g. \"1.0e6 hz\"");
  }
  if (!v.is_string()) fail(path + "." + key, "expected a unit-tagged string");
  return parse_frequency(v.get<std::string>(), path + "." + key);
}

double frequency_or(const json& obj, const char* key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  return frequency_at(obj, key, path);
}

// Grid forms: explicit array, or {"start": .., "stop": .., "points": n}.
std::vector<double> grid_at(const json& obj, const char* key, const std::string& path,
                            bool frequency_units) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required grid");
  const json& v = obj.at(key);
  std::string where = path + "." + key;
  auto scalar = [&](const json& x, const std::string& p) -> double {
    if (frequency_units) {
      if (!x.is_string()) fail(p, "expected a unit-tagged string");
      return parse_frequency(x.get<std::string>(), p);
    }
    if (!x.is_number()) fail(p, "expected a number");
    return x.get<double>();
  };
  if (v.is_array()) {
    if (v.empty()) fail(where, "grid must not be empty");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(scalar(v[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
  }
  if (v.is_object()) {
    check_keys(v, where, {"start", "stop", "points"});
    if (!v.contains("start") || !v.contains("stop")) fail(where, "grid needs start and stop");
    double start = scalar(v.at("start"), where + ".start");
    double stop = scalar(v.at("stop"), where + ".stop");
    std::int64_t points = integer_at(v, "points", where);
    if (points < 1) fail(where + ".points", "must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(points));
    for (std::int64_t i = 0; i < points; ++i) {
      out[static_cast<std::size_t>(i)] =
          points == 1 ? start : start + (stop - start) * static_cast<double>(i) / (points - 1);
    }
    return out;
  }
  fail(where, "expected an array or {start, stop, points}");
}

std::vector<int> int_list_at(const json& obj, const char* key, const std::string& path) {
  const json& v = obj.at(key);
  std::string where = path + "." + key;
  if (!v.is_array() || v.empty()) fail(where, "expected a non-empty integer array");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer()) fail(where + "[" + std::to_string(i) + "]", "expected an integer");
    out.push_back(v[i].get<int>());
  }
  return out;
}

RateMatrix parse_rates(const json& obj, const std::string& path) {
  check_keys(obj, path, {"g10", "g12", "g20", "g21"});
  RateMatrix r;
  r.g10 = frequency_at(obj, "g10", path);
  r.g12 = frequency_at(obj, "g12", path);
  r.g20 = frequency_at(obj, "g20", path);
  r.g21 = frequency_at(obj, "g21", path);
  r.validate();
  return r;
}

json rates_json(const RateMatrix& r) {
  return json{{"g10", format_rad_per_s(r.g10)},
              {"g12", format_rad_per_s(r.g12)},
              {"g20", format_rad_per_s(r.g20)},
              {"g21", format_rad_per_s(r.g21)}};
}

json grid_json_frequency(const std::vector<double>& values) {
  json arr = json::array();
  for (double v : values) arr.push_back(format_rad_per_s(v));
  return arr;
}

json grid_json_number(const std::vector<double>& values) {
  json arr = json::array();
  for (double v : values) arr.push_back(v);
  return arr;
}

}  // namespace

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str(), path);
}

RunConfig RunConfig::parse_text(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config error at " + origin + ": " + e.what());
  }
  expect_object(root, origin);
  check_keys(root, origin,
             {"circuit", "rates", "readout", "erasure", "ramsey", "drive", "sweep", "lz",
              "tec_sweep", "qnd", "dephasing_map", "decay", "fit", "master_seed", "shots",
              "output_dir"});

  RunConfig cfg;

  if (has(root, "circuit")) {
    const std::string path = "circuit";
    const json& c = expect_object(root.at("circuit"), path);
    check_keys(c, path, {"e_c", "e_j", "e_l", "phi_ext", "basis_size"});
    CircuitParams p;
    p.e_c = frequency_at(c, "e_c", path);
    p.e_j = frequency_at(c, "e_j", path);
    p.e_l = frequency_at(c, "e_l", path);
    p.phi_ext = number_or(c, "phi_ext", path, 0.0);
    p.basis_size = static_cast<int>(integer_or(c, "basis_size", path, 120));
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
    cfg.circuit = p;
  }

  if (has(root, "rates")) {
    cfg.rates = parse_rates(expect_object(root.at("rates"), "rates"), "rates");
  }

  if (has(root, "readout")) {
    const std::string path = "readout";
    const json& r = expect_object(root.at("readout"), path);
    check_keys(r, path,
               {"kappa", "omega_bare", "omega_0", "omega_1", "omega_2", "efficiency",
                "photon_number", "t_meas", "drive_frequency"});
    ReadoutConfig rc;
    rc.kappa = frequency_at(r, "kappa", path);
    rc.omega_bare = frequency_at(r, "omega_bare", path);
    rc.dressed = {frequency_at(r, "omega_0", path), frequency_at(r, "omega_1", path),
                  frequency_at(r, "omega_2", path)};
    rc.efficiency = number_at(r, "efficiency", path);
    rc.photon_number = number_at(r, "photon_number", path);
    rc.t_meas = number_at(r, "t_meas", path);
    rc.drive_frequency = frequency_at(r, "drive_frequency", path);
    try {
      rc.validate();
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
    cfg.readout = rc;
  }

  if (has(root, "erasure")) {
    const std::string path = "erasure";
    const json& e = expect_object(root.at("erasure"), path);
    check_keys(e, path,
               {"false_negative", "false_positive", "eol_fidelity", "qnd_error_per_check", "t_ec",
                "m", "init_state", "flag_policy", "m_grid"});
    ErasureSection s;
    s.false_negative = number_or(e, "false_negative", path, 0.0);
    s.false_positive = number_or(e, "false_positive", path, 0.0);
    s.eol_fidelity = number_or(e, "eol_fidelity", path, 1.0);
    s.qnd_error_per_check = number_or(e, "qnd_error_per_check", path, 0.0);
    s.t_ec = number_at(e, "t_ec", path);
    s.m = static_cast<int>(integer_or(e, "m", path, 1));
    s.init_state = static_cast<int>(integer_or(e, "init_state", path, 2));
    s.flag_policy = static_cast<int>(integer_or(e, "flag_policy", path, 1));
    if (has(e, "m_grid")) s.m_grid = int_list_at(e, "m_grid", path);
    cfg.erasure = s;
  }

  if (has(root, "ramsey")) {
    const std::string path = "ramsey";
    const json& r = expect_object(root.at("ramsey"), path);
    check_keys(r, path,
               {"t1_logical", "gamma_phi_residual", "detuning", "readout_during_delay", "delays",
                "stochastic_shots"});
    RamseySection s;
    s.t1_logical = number_at(r, "t1_logical", path);
    s.gamma_phi_residual = frequency_or(r, "gamma_phi_residual", path, 0.0);
    s.detuning = frequency_or(r, "detuning", path, 0.0);
    s.readout_during_delay = boolean_or(r, "readout_during_delay", path, false);
    s.delays = grid_at(r, "delays", path, /*frequency_units=*/false);
    s.stochastic_shots = integer_or(r, "stochastic_shots", path, 0);
    cfg.ramsey = s;
  }

  if (has(root, "drive")) {
    const std::string path = "drive";
    const json& d = expect_object(root.at("drive"), path);
    check_keys(d, path, {"levels", "duration", "repeats", "amplitudes", "detunings"});
    DriveSection s;
    s.levels = static_cast<int>(integer_or(d, "levels", path, 6));
    s.duration = number_or(d, "duration", path, 480e-9);
    s.repeats = static_cast<int>(integer_or(d, "repeats", path, 1));
    s.amplitudes = grid_at(d, "amplitudes", path, /*frequency_units=*/true);
    s.detunings = grid_at(d, "detunings", path, /*frequency_units=*/true);
    cfg.drive = s;
  }

  if (has(root, "sweep")) {
    const std::string path = "sweep";
    const json& s = expect_object(root.at("sweep"), path);
    check_keys(s, path, {"flux"});
    cfg.flux_grid = grid_at(s, "flux", path, /*frequency_units=*/false);
  }

  if (has(root, "lz")) {
    const std::string path = "lz";
    const json& l = expect_object(root.at("lz"), path);
    check_keys(l, path, {"gap", "span", "duration", "convention"});
    LzSection s;
    s.gap = frequency_at(l, "gap", path);
    s.span = frequency_at(l, "span", path);
    s.duration = number_at(l, "duration", path);
    if (has(l, "convention")) {
      const json& c = l.at("convention");
      if (!c.is_string()) fail(path + ".convention", "expected a string");
      std::string name = c.get<std::string>();
      if (name == "shift_over_duration") {
        s.convention = LzRateConvention::kShiftOverDuration;
      } else if (name == "symmetric_span") {
        s.convention = LzRateConvention::kSymmetricSpan;
      } else {
        fail(path + ".convention", "expected shift_over_duration or symmetric_span");
      }
    }
    cfg.lz = s;
  }

  if (has(root, "tec_sweep")) {
    const std::string path = "tec_sweep";
    const json& t = expect_object(root.at("tec_sweep"), path);
    check_keys(t, path, {"grid", "max_t_tot", "points_per_curve"});
    TecSweepSection s;
    s.grid = grid_at(t, "grid", path, /*frequency_units=*/false);
    s.max_t_tot = number_or(t, "max_t_tot", path, 360e-6);
    s.points_per_curve = static_cast<int>(integer_or(t, "points_per_curve", path, 10));
    cfg.tec_sweep = s;
  }

  if (has(root, "qnd")) {
    const std::string path = "qnd";
    const json& q = expect_object(root.at("qnd"), path);
    check_keys(q, path, {"checks", "t_tot", "backaction_eps", "strengths", "frequencies"});
    QndSection s;
    s.checks = static_cast<int>(integer_or(q, "checks", path, 29));
    s.t_tot = number_or(q, "t_tot", path, 50e-6);
    s.backaction_eps = number_or(q, "backaction_eps", path, 1e-3);
    s.strengths = grid_at(q, "strengths", path, /*frequency_units=*/false);
    s.frequencies = grid_at(q, "frequencies", path, /*frequency_units=*/true);
    cfg.qnd = s;
  }

  if (has(root, "dephasing_map")) {
    const std::string path = "dephasing_map";
    const json& d = expect_object(root.at("dephasing_map"), path);
    check_keys(d, path, {"strengths", "frequencies"});
    DephasingMapSection s;
    s.strengths = grid_at(d, "strengths", path, /*frequency_units=*/false);
    s.frequencies = grid_at(d, "frequencies", path, /*frequency_units=*/true);
    cfg.dephasing_map = s;
  }

  if (has(root, "decay")) {
    const std::string path = "decay";
    const json& d = expect_object(root.at("decay"), path);
    check_keys(d, path, {"init_state", "times", "trajectories", "dataset_noise"});
    DecaySection s;
    s.init_state = static_cast<int>(integer_or(d, "init_state", path, 2));
    s.times = grid_at(d, "times", path, /*frequency_units=*/false);
    s.trajectories = integer_or(d, "trajectories", path, 0);
    s.dataset_noise = number_or(d, "dataset_noise", path, 0.0);
    cfg.decay = s;
  }

  if (has(root, "fit")) {
    const std::string path = "fit";
    const json& f = expect_object(root.at("fit"), path);
    check_keys(f, path, {"rate_guess", "parameterization"});
    FitSection s;
    if (has(f, "rate_guess")) {
      s.rate_guess = parse_rates(expect_object(f.at("rate_guess"), path + ".rate_guess"),
                                 path + ".rate_guess");
    }
    if (has(f, "parameterization")) {
      const json& p = f.at("parameterization");
      if (!p.is_string()) fail(path + ".parameterization", "expected a string");
      std::string name = p.get<std::string>();
      if (name == "log") {
        s.parameterization = RateParameterization::kLog;
      } else if (name == "linear") {
        s.parameterization = RateParameterization::kLinear;
      } else {
        fail(path + ".parameterization", "expected log or linear");
      }
    }
    cfg.fit = s;
  }

  cfg.master_seed = static_cast<std::uint64_t>(integer_or(root, "master_seed", origin, 1));
  cfg.shots = integer_or(root, "shots", origin, 100000);
  if (cfg.shots < 1) fail("shots", "must be >= 1");
  if (has(root, "output_dir")) {
    const json& o = root.at("output_dir");
    if (!o.is_string()) fail("output_dir", "expected a string");
    cfg.output_dir = o.get<std::string>();
  }
  return cfg;
}

std::string RunConfig::resolved_json() const {
  json root;
  if (circuit) {
    root["circuit"] = json{{"e_c", format_rad_per_s(circuit->e_c)},
                           {"e_j", format_rad_per_s(circuit->e_j)},
                           {"e_l", format_rad_per_s(circuit->e_l)},
                           {"phi_ext", circuit->phi_ext},
                           {"basis_size", circuit->basis_size}};
  }
  if (rates) root["rates"] = rates_json(*rates);
  if (readout) {
    root["readout"] = json{{"kappa", format_rad_per_s(readout->kappa)},
                           {"omega_bare", format_rad_per_s(readout->omega_bare)},
                           {"omega_0", format_rad_per_s(readout->dressed[0])},
                           {"omega_1", format_rad_per_s(readout->dressed[1])},
                           {"omega_2", format_rad_per_s(readout->dressed[2])},
                           {"efficiency", readout->efficiency},
                           {"photon_number", readout->photon_number},
                           {"t_meas", readout->t_meas},
                           {"drive_frequency", format_rad_per_s(readout->drive_frequency)}};
  }
  if (erasure) {
    json e{{"false_negative", erasure->false_negative},
           {"false_positive", erasure->false_positive},
           {"eol_fidelity", erasure->eol_fidelity},
           {"qnd_error_per_check", erasure->qnd_error_per_check},
           {"t_ec", erasure->t_ec},
           {"m", erasure->m},
           {"init_state", erasure->init_state},
           {"flag_policy", erasure->flag_policy}};
    if (!erasure->m_grid.empty()) e["m_grid"] = erasure->m_grid;
    root["erasure"] = e;
  }
  if (ramsey) {
    root["ramsey"] = json{{"t1_logical", ramsey->t1_logical},
                          {"gamma_phi_residual", format_rad_per_s(ramsey->gamma_phi_residual)},
                          {"detuning", format_rad_per_s(ramsey->detuning)},
                          {"readout_during_delay", ramsey->readout_during_delay},
                          {"delays", grid_json_number(ramsey->delays)},
                          {"stochastic_shots", ramsey->stochastic_shots}};
  }
  if (drive) {
    root["drive"] = json{{"levels", drive->levels},
                         {"duration", drive->duration},
                         {"repeats", drive->repeats},
                         {"amplitudes", grid_json_frequency(drive->amplitudes)},
                         {"detunings", grid_json_frequency(drive->detunings)}};
  }
  if (flux_grid) root["sweep"] = json{{"flux", grid_json_number(*flux_grid)}};
  if (lz) {
    root["lz"] = json{{"gap", format_rad_per_s(lz->gap)},
                      {"span", format_rad_per_s(lz->span)},
                      {"duration", lz->duration},
                      {"convention", lz->convention == LzRateConvention::kShiftOverDuration
                                         ? "shift_over_duration"
                                         : "symmetric_span"}};
  }
  if (tec_sweep) {
    root["tec_sweep"] = json{{"grid", grid_json_number(tec_sweep->grid)},
                             {"max_t_tot", tec_sweep->max_t_tot},
                             {"points_per_curve", tec_sweep->points_per_curve}};
  }
  if (qnd) {
    root["qnd"] = json{{"checks", qnd->checks},
                       {"t_tot", qnd->t_tot},
                       {"backaction_eps", qnd->backaction_eps},
                       {"strengths", grid_json_number(qnd->strengths)},
                       {"frequencies", grid_json_frequency(qnd->frequencies)}};
  }
  if (dephasing_map) {
    root["dephasing_map"] = json{{"strengths", grid_json_number(dephasing_map->strengths)},
                                 {"frequencies", grid_json_frequency(dephasing_map->frequencies)}};
  }
  if (decay) {
    root["decay"] = json{{"init_state", decay->init_state},
                         {"times", grid_json_number(decay->times)},
                         {"trajectories", decay->trajectories},
                         {"dataset_noise", decay->dataset_noise}};
  }
  if (fit) {
    json f{{"parameterization",
            fit->parameterization == RateParameterization::kLog ? "log" : "linear"}};
    if (fit->rate_guess) f["rate_guess"] = rates_json(*fit->rate_guess);
    root["fit"] = f;
  }
  root["master_seed"] = master_seed;
  root["shots"] = shots;
  return root.dump(2);
}

std::string RunConfig::config_hash() const { return hash_hex(fnv1a64(resolved_json())); }

}  // namespace fluxsim
