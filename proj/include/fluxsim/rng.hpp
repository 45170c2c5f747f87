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

#ifndef FLUXSIM_RNG_HPP
#define FLUXSIM_RNG_HPP

#include <array>
#include <cstdint>
#include <span>

namespace fluxsim {

/// Counter-based random stream (Philox4x32-10, Salmon et al., SC 2011).
///
/// A stream is addressed by (key, stream, salt): `key` is the master seed,
/// `stream` indexes the Monte Carlo unit of work (e.g. the shot), and `salt`
/// separates independent ensembles that share a seed (e.g. the points of a
/// survival curve). Draws within a stream advance a 64-bit block counter, so
/// results depend only on the address and the draw sequence, never on thread
/// scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t key, std::uint64_t stream, std::uint32_t salt = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform double in (0, 1); never returns exactly 0 or 1.
  double uniform();

  /// Exponential waiting time with the given total rate; +inf when rate <= 0.
  double exponential(double rate);

  /// Standard normal deviate (Box-Muller, pairs cached per stream).
  double normal();

  /// Samples an index with probability weights[i] / total.
  int choose(std::span<const double> weights, double total);

  /// Raw Philox4x32-10 block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                            const std::array<std::uint32_t, 2>& key);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 2> stream_words_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffer_pos_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace fluxsim

#endif  // FLUXSIM_RNG_HPP
