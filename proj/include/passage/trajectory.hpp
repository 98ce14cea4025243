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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "passage/common.hpp"

namespace passage {

/// Uniform integration grid: n_steps steps of dt = (t_end - t_start)/n_steps.
/// record_stride controls output density (every k-th step is kept; the first
/// and last points always are).
struct TimeGrid {
  double t_start = 0.0;  // us
  double t_end = 0.0;    // us
  int n_steps = 0;
  int record_stride = 1;

  double dt() const { return (t_end - t_start) / n_steps; }

  static TimeGrid from_dt(double t_start, double t_end, double dt_ns, int record_stride = 1) {
    TimeGrid grid;
    grid.t_start = t_start;
    grid.t_end = t_end;
    grid.record_stride = record_stride;
    if (!(dt_ns > 0.0)) throw ValidationError("time step must be > 0");
    const long long steps = std::llround((t_end - t_start) / us_from_ns(dt_ns));
    if (steps > 2000000000LL)
      throw ValidationError("time grid would need more than 2e9 steps");
    grid.n_steps = std::max<int>(1, static_cast<int>(steps));
    grid.validate();
    return grid;
  }

  void validate() const {
    if (!(t_end > t_start)) throw ValidationError("time grid needs t_end > t_start");
    if (n_steps < 1) throw ValidationError("time grid needs n_steps >= 1");
    if (record_stride < 1) throw ValidationError("record_stride must be >= 1");
  }

  bool is_record_step(int step) const {  // step in [0, n_steps]
    return step == n_steps || step % record_stride == 0;
  }

  int n_records() const {
    int n = 0;
    for (int s = 0; s <= n_steps; ++s)
      if (is_record_step(s)) ++n;
    return n;
  }
};

/// Recorded output of one evolution. Exactly one of pure_states /
/// density_states is populated; norm_or_trace holds <psi|psi> or Tr(rho) at
/// each record. The derived series (populations, fidelity, excitation) are
/// filled in by annotate() in analysis.hpp.
struct TrajectoryRecord {
  std::vector<double> times;  // us
  std::vector<Vector> pure_states;
  std::vector<Matrix> density_states;
  std::vector<double> norm_or_trace;

  std::vector<std::string> tracked_labels;
  Eigen::MatrixXd populations;  // tracked_labels.size() x n_records
  std::vector<double> fidelity;
  std::vector<double> ne_expectation;

  bool is_density() const { return !density_states.empty(); }
  int n_records() const { return static_cast<int>(times.size()); }

  double final_drift() const { return std::abs(norm_or_trace.back() - 1.0); }

  double max_drift() const {
    double worst = 0.0;
    for (double v : norm_or_trace) worst = std::max(worst, std::abs(v - 1.0));
    return worst;
  }
};

}  // namespace passage
