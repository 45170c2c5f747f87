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

#ifndef FLUXSIM_UNITS_HPP
#define FLUXSIM_UNITS_HPP

#include <string>
#include <string_view>

namespace fluxsim {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// All frequencies and rates are stored internally as angular frequencies in
// rad/s. Config files and CLI flags must tag every frequency/rate value with
// an explicit unit so that a bare number can never be misread by a factor of
// 2*pi:
//
//   "5.77e9 hz"         cyclic frequency f, stored as 2*pi*f
//   "5.77e9 two_pi_hz"  value quoted in the "2*pi x f" notation, also 2*pi*f
//   "7.665e3 rad_per_s" angular frequency / rate, stored as-is
//
// "hz" and "two_pi_hz" apply the same conversion; both exist so that a config
// can mirror whichever notation its source used without silent reinterpretation.
enum class FrequencyUnit {
  kHz,
  kRadPerS,
  kTwoPiHz,
};

/// Converts a tagged value to rad/s.
double to_rad_per_s(double value, FrequencyUnit unit);

/// Parses strings of the form "<number> <unit>" (e.g. "1.02e6 hz").
/// The unit tag is mandatory. `context` names the config key or CLI flag and
/// is used verbatim in the ConfigError message on failure.
double parse_frequency(std::string_view text, const std::string& context);

/// Formats an angular frequency as a tagged string ("<value> rad_per_s").
std::string format_rad_per_s(double omega);

}  // namespace fluxsim

#endif  // FLUXSIM_UNITS_HPP
