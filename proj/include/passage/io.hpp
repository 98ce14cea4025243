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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "passage/common.hpp"
#include "passage/optimize.hpp"
#include "passage/trajectory.hpp"

namespace passage {

// CSV files are UTF-8 with one header row. Times carry 6 decimals (sub-ps),
// probabilities 10; that is enough to audit every acceptance threshold from
// the files alone.

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

inline std::string fmt_time(double v) { return fmt("%.6f", v); }
inline std::string fmt_prob(double v) {
  if (std::isnan(v)) return "nan";
  return fmt("%.10f", v);
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

}  // namespace detail

/// One row per record point: time, tracked populations, target fidelity,
/// norm (or trace), excitation expectation.
inline void write_trajectory_csv(const std::filesystem::path& path,
                                 const TrajectoryRecord& record) {
  if (record.fidelity.empty())
    throw std::runtime_error("write_trajectory_csv needs an annotated record");
  std::ofstream out = detail::open_for_write(path);
  out << "t_us";
  for (const std::string& label : record.tracked_labels) out << ",pop:" << label;
  out << ",fidelity,norm_or_trace,ne_expectation\n";
  for (int r = 0; r < record.n_records(); ++r) {
    out << detail::fmt_time(record.times[r]);
    for (Eigen::Index k = 0; k < record.populations.rows(); ++k)
      out << ',' << detail::fmt_prob(record.populations(k, r));
    out << ',' << detail::fmt_prob(record.fidelity[r]);
    out << ',' << detail::fmt("%.12f", record.norm_or_trace[r]);
    out << ',' << detail::fmt_prob(record.ne_expectation[r]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Optimizer evaluation log, one row per objective call.
inline void write_history_csv(const std::filesystem::path& path,
                              const std::vector<EvalRecord>& history) {
  std::ofstream out = detail::open_for_write(path);
  out << "eval_index,value";
  const Eigen::Index n_params = history.empty() ? 0 : history.front().params.size();
  for (Eigen::Index i = 0; i < n_params; ++i) out << ",p" << i;
  out << '\n';
  for (const EvalRecord& rec : history) {
    out << rec.eval_index << ',' << detail::fmt("%.12f", rec.value);
    for (Eigen::Index i = 0; i < rec.params.size(); ++i)
      out << ',' << detail::fmt("%.8f", rec.params(i));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace passage
