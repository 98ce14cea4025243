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

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "passage/common.hpp"

namespace passage {

/// One Gaussian component of a drive envelope,
///   Omega(t) = amplitude * exp(-(t - delay)^2 / width^2).
/// amplitude is angular (rad/us) and must be >= 0; width is in us, > 0.
struct GaussianTerm {
  double amplitude = 0.0;
  double delay = 0.0;
  double width = 0.0;

  bool operator==(const GaussianTerm&) const = default;
};

/// Sum of Gaussians at time t. Total function: any t, any (finite) terms.
inline double eval_envelope(std::span<const GaussianTerm> terms, double t) {
  double omega = 0.0;
  for (const GaussianTerm& g : terms) {
    const double u = (t - g.delay) / g.width;
    omega += g.amplitude * std::exp(-u * u);
  }
  return omega;
}

/// Classical drive schedule for every qubit: qubit l gets the envelope
/// sum of terms[l]. A qubit with no terms is simply undriven.
struct PulseSchedule {
  std::vector<std::vector<GaussianTerm>> terms;

  int n_qubits() const { return static_cast<int>(terms.size()); }

  double envelope(int qubit, double t) const {
    return eval_envelope(terms.at(qubit), t);
  }

  /// Largest single-term amplitude anywhere in the schedule.
  double peak_amplitude() const {
    double peak = 0.0;
    for (const auto& qubit_terms : terms)
      for (const GaussianTerm& g : qubit_terms)
        if (g.amplitude > peak) peak = g.amplitude;
    return peak;
  }

  /// Latest term center; the natural earliest readout time for a
  /// transfer-style scenario.
  double last_delay() const {
    double last = 0.0;
    for (const auto& qubit_terms : terms)
      for (const GaussianTerm& g : qubit_terms)
        if (g.delay > last) last = g.delay;
    return last;
  }

  int total_terms() const {
    int n = 0;
    for (const auto& qubit_terms : terms) n += static_cast<int>(qubit_terms.size());
    return n;
  }
};

/// Structural checks (width > 0, amplitude >= 0, finite fields). Returns a
/// list of human-readable findings; empty means the schedule is well formed.
inline std::vector<std::string> validate_schedule(const PulseSchedule& schedule) {
  std::vector<std::string> findings;
  for (int q = 0; q < schedule.n_qubits(); ++q) {
    for (std::size_t i = 0; i < schedule.terms[q].size(); ++i) {
      const GaussianTerm& g = schedule.terms[q][i];
      const std::string where =
          "qubit " + std::to_string(q) + " term " + std::to_string(i) + ": ";
      if (!std::isfinite(g.amplitude) || !std::isfinite(g.delay) || !std::isfinite(g.width))
        findings.push_back(where + "non-finite field");
      if (g.amplitude < 0.0) findings.push_back(where + "amplitude must be >= 0");
      if (!(g.width > 0.0)) findings.push_back(where + "width must be > 0");
    }
  }
  return findings;
}

/// Samples every qubit's envelope on a strictly increasing time grid.
/// Returns an n_qubits x grid.size() matrix (row l = qubit l).
inline Eigen::MatrixXd sample_schedule(const PulseSchedule& schedule,
                                       std::span<const double> grid) {
  if (grid.empty()) throw ValidationError("sample_schedule: empty time grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw ValidationError("sample_schedule: time grid must be strictly increasing");
  Eigen::MatrixXd samples(schedule.n_qubits(), static_cast<Eigen::Index>(grid.size()));
  for (int q = 0; q < schedule.n_qubits(); ++q)
    for (std::size_t i = 0; i < grid.size(); ++i)
      samples(q, static_cast<Eigen::Index>(i)) = schedule.envelope(q, grid[i]);
  return samples;
}

/// Named stock schedules for the three-qubit benchmarks.
///
///  "qst-fig2"     two sequential counterintuitive pulse pairs moving one
///                 excitation from qubit 1 to qubit 2 and then to qubit 3.
///  "wstate-fig4"  one Gaussian per qubit, all sharing one center time,
///                 with the stock amplitude and width triple.
inline PulseSchedule builtin_schedule(std::string_view name) {
  PulseSchedule schedule;
  schedule.terms.resize(3);
  if (name == "qst-fig2") {
    const double amp = angular_from_mhz(350.0);
    const double width = us_from_ns(75.0);
    schedule.terms[0] = {{amp, 0.35, width}, {amp, 0.58, width}};
    schedule.terms[1] = {{amp, 0.20, width}, {amp, 0.65, width}};
    schedule.terms[2] = {{amp, 0.28, width}, {amp, 0.50, width}};
  } else if (name == "wstate-fig4") {
    schedule.terms[0] = {{angular_from_mhz(81.0), 0.15, us_from_ns(31.0)}};
    schedule.terms[1] = {{angular_from_mhz(26.0), 0.15, us_from_ns(26.0)}};
    schedule.terms[2] = {{angular_from_mhz(165.0), 0.15, us_from_ns(24.0)}};
  } else {
    throw ValidationError("unknown builtin schedule: " + std::string(name));
  }
  return schedule;
}

}  // namespace passage
