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

#include <array>
#include <cmath>
#include <vector>

#include "fluxsim/rng.hpp"

using namespace fluxsim;

TEST_SUITE_BEGIN("rng");

TEST_CASE("philox4x32-10 known answers") {
  // Reference vectors from the Random123 distribution (kat_vectors).
  std::array<std::uint32_t, 4> zero{};
  std::array<std::uint32_t, 2> zero_key{};
  CHECK(RngStream::block(zero, zero_key) ==
        std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbd413adcu, 0x1bb25090u});

  std::array<std::uint32_t, 4> ones{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu};
  std::array<std::uint32_t, 2> ones_key{0xffffffffu, 0xffffffffu};
  CHECK(RngStream::block(ones, ones_key) ==
        std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

  std::array<std::uint32_t, 4> pi_ctr{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u};
  std::array<std::uint32_t, 2> pi_key{0xa4093822u, 0x299f31d0u};
  CHECK(RngStream::block(pi_ctr, pi_key) ==
        std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are deterministic and independent of draw interleaving") {
  RngStream a(42, 7, 3);
  RngStream b(42, 7, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c(42, 8, 3);
  bool any_different = false;
  RngStream a2(42, 7, 3);
  for (int i = 0; i < 16; ++i) any_different |= (a2.next_u64() != c.next_u64());
  CHECK(any_different);

  // salt separates ensembles sharing (key, stream)
  RngStream d(42, 7, 4);
  RngStream a3(42, 7, 3);
  bool salt_differs = false;
  for (int i = 0; i < 16; ++i) salt_differs |= (a3.next_u64() != d.next_u64());
  CHECK(salt_differs);
}

TEST_CASE("uniform moments and range") {
  RngStream rng(123, 0);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  double mean = sum / n;
  double var = sum2 / n - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("exponential and normal sampling moments") {
  RngStream rng(99, 1);
  const int n = 200000;
  double esum = 0.0;
  for (int i = 0; i < n; ++i) esum += rng.exponential(2.0e3);
  CHECK(esum / n == doctest::Approx(1.0 / 2.0e3).epsilon(0.02));

  double nsum = 0.0, nsum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    nsum += x;
    nsum2 += x * x;
  }
  CHECK(nsum / n == doctest::Approx(0.0).epsilon(1.0).scale(0.02));
  CHECK(nsum2 / n == doctest::Approx(1.0).epsilon(0.02));

  CHECK(rng.exponential(0.0) == doctest::Approx(std::numeric_limits<double>::infinity()));
}

TEST_CASE("categorical choice respects weights") {
  RngStream rng(7, 2);
  std::vector<double> weights{0.2, 0.5, 0.3};
  std::array<int, 3> counts{};
  const int n = 90000;
  for (int i = 0; i < n; ++i) counts[static_cast<std::size_t>(rng.choose(weights, 1.0))]++;
  for (int k = 0; k < 3; ++k) {
    CHECK(static_cast<double>(counts[static_cast<std::size_t>(k)]) / n ==
          doctest::Approx(weights[static_cast<std::size_t>(k)]).epsilon(0.05));
  }
}

TEST_SUITE_END();
