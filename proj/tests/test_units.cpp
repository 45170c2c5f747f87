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

#include <doctest.h>

#include "fluxsim/errors.hpp"
#include "fluxsim/units.hpp"

using namespace fluxsim;

TEST_SUITE_BEGIN("units");

TEST_CASE("tagged parsing") {
  CHECK(parse_frequency("1.22e3 two_pi_hz", "rates.g10") == doctest::Approx(7665.486).epsilon(1e-6));
  CHECK(parse_frequency("45 rad_per_s", "x") == 45.0);
  CHECK(parse_frequency("1e6 hz", "x") == doctest::Approx(kTwoPi * 1e6));
  CHECK(parse_frequency("  -4.096e6   hz ", "x") == doctest::Approx(-kTwoPi * 4.096e6));
}

TEST_CASE("malformed values name the offending field") {
  CHECK_THROWS_WITH_AS(parse_frequency("48e6hz...", "--gap"),
                       doctest::Contains("--gap"), ConfigError);
  CHECK_THROWS_AS(parse_frequency("48e6", "lz.gap"), ConfigError);
  CHECK_THROWS_AS(parse_frequency("48e6 khz", "lz.gap"), ConfigError);
  CHECK_THROWS_AS(parse_frequency("", "lz.gap"), ConfigError);
  CHECK_THROWS_AS(parse_frequency("hz", "lz.gap"), ConfigError);
}

TEST_CASE("round trip through the formatter") {
  double omega = kTwoPi * 5.77e9;
  CHECK(parse_frequency(format_rad_per_s(omega), "x") == omega);
}

TEST_SUITE_END();
