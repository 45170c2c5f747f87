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

#include "fluxsim/units.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "fluxsim/errors.hpp"

namespace fluxsim {

double to_rad_per_s(double value, FrequencyUnit unit) {
  switch (unit) {
    case FrequencyUnit::kHz:
    case FrequencyUnit::kTwoPiHz:
      return kTwoPi * value;
    case FrequencyUnit::kRadPerS:
      return value;
  }
  return value;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

double parse_frequency(std::string_view text, const std::string& context) {
  std::string_view s = trim(text);
  if (s.empty()) {
    throw ConfigError(context + ": empty frequency value, expected \"<number> <hz|rad_per_s|two_pi_hz>\"");
  }
  std::string buf(s);
  char* end = nullptr;
  double value = std::strtod(buf.c_str(), &end);
  if (end == buf.c_str()) {
    throw ConfigError(context + ": cannot parse number in \"" + buf + "\"");
  }
  std::string_view tag = trim(std::string_view(end));
  if (tag == "hz") return to_rad_per_s(value, FrequencyUnit::kHz);
  if (tag == "rad_per_s") return to_rad_per_s(value, FrequencyUnit::kRadPerS);
  if (tag == "two_pi_hz") return to_rad_per_s(value, FrequencyUnit::kTwoPiHz);
  if (tag.empty()) {
    throw ConfigError(context + ": missing unit tag in \"" + buf +
                      "\", expected one of hz, rad_per_s, two_pi_hz");
  }
  throw ConfigError(context + ": unknown unit tag \"" + std::string(tag) +
                    "\", expected one of hz, rad_per_s, two_pi_hz");
}

std::string format_rad_per_s(double omega) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g rad_per_s", omega);
  return buf;
}

}  // namespace fluxsim
