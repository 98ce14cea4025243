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

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "passage/common.hpp"
#include "passage/scenario.hpp"

namespace passage {

/// One sweep axis, quoted as f/2pi in kHz (the sweep is about decoherence
/// rates, which live three orders of magnitude below the couplings).
struct AxisSpec {
  double min_khz = 0.0;
  double max_khz = 0.0;
  int points = 2;

  std::vector<double> values() const {
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i)
      v[i] = points == 1 ? min_khz
                         : min_khz + (max_khz - min_khz) * i / double(points - 1);
    return v;
  }
};

struct SweepSpec {
  std::string name = "sweep";
  Scenario base;
  AxisSpec kappa;  // rows
  AxisSpec gamma;  // columns
};

struct SweepResult {
  std::vector<double> kappa_khz;
  std::vector<double> gamma_khz;
  Eigen::MatrixXd fidelity;  // end-time fidelity; NaN marks a failed cell
  std::vector<std::string> failures;
};

inline std::vector<std::string> validate_sweep_json(const json& j) {
  std::vector<std::string> problems;
  detail::ConfigReader r{problems};
  if (!j.is_object()) {
    r.error("sweep config root must be a JSON object");
    return problems;
  }
  const auto version = r.integer(j, "", "schema_version", true);
  if (version && *version != 1) r.error("schema_version must be 1");
  r.string(j, "", "name", false);

  const bool has_inline = j.contains("base");
  const bool has_path = j.contains("base_scenario");
  if (has_inline == has_path) {
    r.error("sweep needs exactly one of 'base' (inline scenario) or 'base_scenario' (path)");
  } else if (has_inline) {
    for (const std::string& p : validate_scenario_json(j.at("base")))
      problems.push_back(p.rfind("error: ", 0) == 0 ? "error: base." + p.substr(7) : p);
  } else {
    r.string(j, "", "base_scenario", true);
  }

  for (const char* axis : {"kappa_khz_over_2pi", "gamma_khz_over_2pi"}) {
    if (const json* a = r.object(j, "", axis, true)) {
      const std::string path = std::string(axis) + ".";
      const auto lo = r.number(*a, path, "min", true, 0.0);
      const auto hi = r.number(*a, path, "max", true, 0.0);
      if (lo && hi && *hi < *lo) r.error(path + "max must be >= min");
      r.integer(*a, path, "points", true, 2);
    }
  }
  return problems;
}

inline SweepSpec sweep_from_json(const json& j, const std::filesystem::path& base_dir) {
  {
    const auto problems = validate_sweep_json(j);
    if (!problems.empty()) {
      std::string msg = "invalid sweep config:";
      for (const std::string& p : problems) msg += "\n  " + p;
      throw ValidationError(msg);
    }
  }
  SweepSpec spec;
  spec.name = j.value("name", std::string("sweep"));
  if (j.contains("base")) {
    spec.base = scenario_from_json(j.at("base"));
  } else {
    std::filesystem::path p = j.at("base_scenario").get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    spec.base = load_scenario_file(p);
  }
  auto read_axis = [&](const char* key) {
    const json& a = j.at(key);
    return AxisSpec{a.at("min").get<double>(), a.at("max").get<double>(),
                    a.at("points").get<int>()};
  };
  spec.kappa = read_axis("kappa_khz_over_2pi");
  spec.gamma = read_axis("gamma_khz_over_2pi");
  return spec;
}

inline SweepSpec load_sweep_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open sweep config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("config is not valid JSON (" + path.string() + "): " + e.what());
  }
  return sweep_from_json(j, path.has_parent_path() ? path.parent_path()
                                                   : std::filesystem::path("."));
}

/// Runs the base scenario once per (kappa, gamma) grid point with the
/// standard rate family, recording end-time fidelity. Cells run
/// independently across `threads` workers; a failed cell becomes NaN plus a
/// log entry and the sweep keeps going.
inline SweepResult run_sweep(const SweepSpec& spec, const RunOptions& options = {}) {
  {
    Scenario probe = spec.base;
    probe.decoherence = DecoherenceSpec{};
    const auto findings = validate_scenario(probe);
    if (has_errors(findings)) {
      std::string msg = "sweep base scenario failed validation:";
      for (const std::string& f : findings)
        if (f.rfind("error:", 0) == 0) msg += "\n  " + f;
      throw ValidationError(msg);
    }
  }

  SweepResult result;
  result.kappa_khz = spec.kappa.values();
  result.gamma_khz = spec.gamma.values();
  const int n_rows = static_cast<int>(result.kappa_khz.size());
  const int n_cols = static_cast<int>(result.gamma_khz.size());
  result.fidelity.setConstant(n_rows, n_cols, std::numeric_limits<double>::quiet_NaN());

  std::mutex failures_mutex;
  std::atomic<int> next_cell{0};
  const int n_cells = n_rows * n_cols;

  auto worker = [&]() {
    for (int cell = next_cell.fetch_add(1); cell < n_cells; cell = next_cell.fetch_add(1)) {
      const int i = cell / n_cols;
      const int k = cell % n_cols;
      Scenario cell_scenario = spec.base;
      cell_scenario.decoherence = DecoherenceSpec{};
      cell_scenario.decoherence.kappa = angular_from_khz(result.kappa_khz[i]);
      cell_scenario.decoherence.gamma = angular_from_khz(result.gamma_khz[k]);
      cell_scenario.fidelity_floor.reset();
      RunOptions cell_options;
      cell_options.dt_ns = options.dt_ns;
      cell_options.write_files = false;
      try {
        const ScenarioRun run = run_scenario(cell_scenario, cell_options);
        result.fidelity(i, k) = run.summary.final_fidelity;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failures_mutex);
        result.failures.push_back("kappa=" + std::to_string(result.kappa_khz[i]) +
                                  " kHz, gamma=" + std::to_string(result.gamma_khz[k]) +
                                  " kHz: " + e.what());
      }
    }
  };

  const int n_workers = std::max(1, std::min(options.threads, n_cells));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return result;
}

/// Matrix CSV: rows are kappa values, columns gamma values.
inline void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
  std::ofstream out = detail::open_for_write(path);
  out << "kappa_khz_over_2pi";
  for (double g : result.gamma_khz) out << ",gamma_khz_over_2pi=" << detail::fmt_time(g);
  out << '\n';
  for (std::size_t i = 0; i < result.kappa_khz.size(); ++i) {
    out << detail::fmt_time(result.kappa_khz[i]);
    for (std::size_t k = 0; k < result.gamma_khz.size(); ++k)
      out << ',' << detail::fmt_prob(result.fidelity(static_cast<Eigen::Index>(i),
                                                     static_cast<Eigen::Index>(k)));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline json sweep_to_json(const SweepSpec& spec, const SweepResult& result) {
  json j;
  j["schema_version"] = 1;
  j["name"] = spec.name;
  j["scenario"] = spec.base.name;
  j["kappa_khz_over_2pi"] = result.kappa_khz;
  j["gamma_khz_over_2pi"] = result.gamma_khz;
  json rows = json::array();
  double best = -1.0, worst = 2.0;
  json best_cell, worst_cell;
  for (Eigen::Index i = 0; i < result.fidelity.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < result.fidelity.cols(); ++k) {
      const double f = result.fidelity(i, k);
      row.push_back(std::isnan(f) ? json() : json(f));
      if (!std::isnan(f)) {
        if (f > best) {
          best = f;
          best_cell = {{"kappa_khz_over_2pi", result.kappa_khz[i]},
                       {"gamma_khz_over_2pi", result.gamma_khz[k]},
                       {"fidelity", f}};
        }
        if (f < worst) {
          worst = f;
          worst_cell = {{"kappa_khz_over_2pi", result.kappa_khz[i]},
                        {"gamma_khz_over_2pi", result.gamma_khz[k]},
                        {"fidelity", f}};
        }
      }
    }
    rows.push_back(std::move(row));
  }
  j["fidelity"] = std::move(rows);
  j["best"] = best_cell;
  j["worst"] = worst_cell;
  j["failures"] = result.failures;
  return j;
}

}  // namespace passage
