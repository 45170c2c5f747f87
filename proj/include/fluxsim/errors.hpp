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

#ifndef FLUXSIM_ERRORS_HPP
#define FLUXSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fluxsim {

/// Raised when a config file or unit-tagged value fails validation.
/// The message always names the offending key path or flag.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when an iterative numerical procedure fails to converge.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised for unexpected numerical conditions (non-Hermitian assembly,
/// step underflow, divergent fits).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fluxsim

#endif  // FLUXSIM_ERRORS_HPP
