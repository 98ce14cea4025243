// Copyright 2026 The Passage Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace passage {

using complexd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// All frequencies inside the library are angular, in rad/us; all times are
/// in us. Inputs are quoted as f = omega/2pi in MHz or kHz, so the
/// conversions below are the only place the 2pi lives.
constexpr double angular_from_mhz(double f_over_2pi_mhz) {
  return kTwoPi * f_over_2pi_mhz;  // 1 MHz * 2pi == 2pi rad/us
}

constexpr double angular_from_khz(double f_over_2pi_khz) {
  return kTwoPi * 1e-3 * f_over_2pi_khz;
}

constexpr double mhz_from_angular(double omega) { return omega / kTwoPi; }

constexpr double us_from_ns(double t_ns) { return 1e-3 * t_ns; }
constexpr double ns_from_us(double t_us) { return 1e3 * t_us; }

/// Raised when a configuration or an input argument violates a documented
/// precondition. The CLI maps this family to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an integrator detects that its own output is untrustworthy
/// (norm/trace drift, non-finite entries). The CLI maps this to exit code 3.
class IntegrationError : public std::runtime_error {
 public:
  explicit IntegrationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace passage
