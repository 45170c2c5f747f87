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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fluxsim/errors.hpp"
#include "fluxsim/spectrum.hpp"
#include "fluxsim/units.hpp"
#include "test_support.hpp"

using namespace fluxsim;
using fluxsim::testing::device_circuit;

TEST_SUITE_BEGIN("spectrum");

TEST_CASE("device transition frequencies") {
  SpectrumResult spec = diagonalize(device_circuit());
  double w01 = spec.transition_frequency(0, 1);
  double w12 = spec.transition_frequency(1, 2);
  CHECK(std::abs(w01 - kTwoPi * 5.77e9) < 0.05 * kTwoPi * 5.77e9);
  CHECK(std::abs(w12 - kTwoPi * 48.0e6) < 0.10 * kTwoPi * 48.0e6);
  CHECK(spec.levels().front() == 0.0);
  for (int i = 1; i < spec.num_levels(); ++i) CHECK(spec.level(i) > spec.level(i - 1));
}

TEST_CASE("harmonic limit at E_J = 0") {
  CircuitParams p = device_circuit();
  p.e_j = 0.0;
  SpectrumResult spec = diagonalize(p);
  double spacing = std::sqrt(8.0 * p.e_c * p.e_l);
  for (int i = 0; i + 1 < 6; ++i) {
    CHECK(spec.transition_frequency(i, i + 1) == doctest::Approx(spacing).epsilon(1e-9));
  }
}

TEST_CASE("high-truncation rediagonalization oracle") {
  CircuitParams p = device_circuit();
  p.phi_ext = 0.0013;
  SpectrumResult spec = diagonalize(p);

  CircuitParams fine = p;
  fine.basis_size = 4 * p.basis_size;
  SpectrumResult oracle = diagonalize(fine);

  for (int i = 1; i < 6; ++i) {
    CHECK(spec.level(i) == doctest::Approx(oracle.level(i)).epsilon(1e-6));
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      double a = spec.charge_matrix_element(i, j);
      double b = oracle.charge_matrix_element(i, j);
      if (b > 1e-12) CHECK(a == doctest::Approx(b).epsilon(1e-6));
    }
  }
}

TEST_CASE("transition_frequency index contract") {
  SpectrumResult spec = diagonalize(device_circuit());
  CHECK_THROWS_AS(spec.transition_frequency(1, 1), std::out_of_range);
  CHECK_THROWS_AS(spec.transition_frequency(2, 1), std::out_of_range);
  CHECK_THROWS_AS(spec.transition_frequency(0, 99), std::out_of_range);
  CHECK(spec.transition_frequency(1, 2) > 0.0);
}

TEST_CASE("charge matrix elements and the forbidden 0-2 transition") {
  SpectrumResult spec = diagonalize(device_circuit());
  CHECK(spec.charge_matrix_element(0, 2) < 1e-10);
  CHECK(spec.charge_matrix_element(0, 1) > 0.0);
  CHECK_THROWS_AS(spec.charge_matrix_element(0, 99), std::out_of_range);

  CircuitParams biased = device_circuit();
  biased.phi_ext = 0.05;
  SpectrumResult spec_biased = diagonalize(biased);
  CircuitParams fine = biased;
  fine.basis_size = 480;
  SpectrumResult oracle = diagonalize(fine);
  CHECK(spec_biased.charge_matrix_element(0, 2) > 1e-3);
  CHECK(spec_biased.charge_matrix_element(0, 2) ==
        doctest::Approx(oracle.charge_matrix_element(0, 2)).epsilon(1e-6));
}

TEST_CASE("parity selection rule at the symmetric flux points") {
  for (double phi : {0.0, 0.5}) {
    CircuitParams p = device_circuit();
    p.phi_ext = phi;
    SpectrumResult spec = diagonalize(p);
    REQUIRE(spec.parity().has_value());
    const auto& labels = *spec.parity();
    for (int i = 0; i < 6; ++i) {
      REQUIRE(labels[static_cast<std::size_t>(i)] != 0);
      for (int j = i + 1; j < 6; ++j) {
        if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]) {
          CHECK(spec.charge_matrix_element(i, j) < 1e-10);
        }
      }
    }
  }
  CircuitParams off = device_circuit();
  off.phi_ext = 0.05;
  CHECK_FALSE(diagonalize(off).parity().has_value());
}

TEST_CASE("convergence: doubling the basis moves levels by < 1e-8 relative") {
  CircuitParams p = device_circuit();
  SpectrumResult coarse = diagonalize(p);
  CircuitParams p2 = p;
  p2.basis_size = 2 * p.basis_size;
  SpectrumResult fine = diagonalize(p2);
  for (int i = 1; i < 6; ++i) {
    CHECK(std::abs(coarse.level(i) - fine.level(i)) < 1e-8 * fine.level(i));
  }
}

TEST_CASE("flux inversion symmetry") {
  for (double phi : {0.0013, 0.05, 0.11}) {
    CircuitParams plus = device_circuit();
    plus.phi_ext = phi;
    CircuitParams minus = device_circuit();
    minus.phi_ext = -phi;
    SpectrumResult a = diagonalize(plus);
    SpectrumResult b = diagonalize(minus);
    for (int i = 1; i < 6; ++i) {
      CHECK(std::abs(a.level(i) - b.level(i)) <= 1e-10 * b.level(i));
    }
  }
}

TEST_CASE("parameter validation") {
  CircuitParams p = device_circuit();
  p.basis_size = 20;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = device_circuit();
  p.e_c = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = device_circuit();
  p.e_l = -1.0;
  CHECK_THROWS_AS(diagonalize(p), std::invalid_argument);
}

TEST_CASE("flux sweep rows, symmetry and the 0-2 dip") {
  CircuitParams p = device_circuit();

  std::vector<double> single{0.0};
  auto one = sweep_flux(p, single);
  REQUIRE(one.size() == 1);
  CHECK(one[0].n02 < 1e-10);

  std::vector<double> grid;
  for (int k = -4; k <= 4; ++k) grid.push_back(0.025 * k);
  auto rows = sweep_flux(p, grid, 4);
  REQUIRE(rows.size() == grid.size());

  // mirror symmetry of |n02|
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::size_t mirror = rows.size() - 1 - k;
    CHECK(rows[k].n02 == doctest::Approx(rows[mirror].n02).epsilon(1e-9));
  }

  // V-shaped dip: minimum at the grid point nearest zero, monotone flanks
  std::size_t center = rows.size() / 2;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k != center) CHECK(rows[center].n02 < rows[k].n02);
  }
  for (std::size_t k = center; k + 1 < rows.size(); ++k) {
    CHECK(rows[k + 1].n02 > rows[k].n02);
  }

  // parallel evaluation returns rows in input order
  auto rows_serial = sweep_flux(p, grid, 1);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].w01 == rows_serial[k].w01);
    CHECK(rows[k].n02 == rows_serial[k].n02);
  }

  CHECK_THROWS_AS(sweep_flux(p, std::span<const double>{}), std::invalid_argument);
}

TEST_SUITE_END();
