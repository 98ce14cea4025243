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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "passage/analysis.hpp"
#include "passage/common.hpp"
#include "passage/evolution.hpp"
#include "passage/hamiltonian.hpp"
#include "passage/io.hpp"
#include "passage/optimize.hpp"
#include "passage/pulses.hpp"
#include "passage/statespace.hpp"
#include "passage/trajectory.hpp"

namespace passage {

using nlohmann::json;

// Scenario configs are single JSON files. Frequencies are entered divided
// by 2pi, with the unit spelled out in the key (amp_mhz_over_2pi,
// kappa_khz_over_2pi, ...), so a file can be checked against published
// numbers at a glance. Emitted configs additionally carry the raw angular
// values (amp_rad_per_us, ...), which the loader prefers when present;
// that makes save/load round trips bit-exact instead of 1-ulp-exact.

struct DecoherenceSpec {
  std::optional<double> kappa;  // rad/us
  std::optional<double> gamma;  // rad/us
  std::vector<CollapseChannel> extra;

  bool enabled() const { return kappa.has_value() || gamma.has_value() || !extra.empty(); }

  std::vector<CollapseChannel> build(int n_qubits) const {
    std::vector<CollapseChannel> channels;
    if (kappa || gamma)
      channels = decoherence_preset(n_qubits, kappa.value_or(0.0), gamma.value_or(0.0));
    channels.insert(channels.end(), extra.begin(), extra.end());
    return channels;
  }
};

struct OptimizeSpec {
  bool present = false;
  Objective::Mode mode = Objective::Mode::MaxFidelity;
  std::string transit_label;
  bool vary_amplitudes = true;
  bool vary_delays = true;
  bool vary_widths = false;
  int n_starts = 1;
  std::uint64_t seed = 1;
  int max_evals = 400;
  double coarse_dt_ns = 0.4;
  double time_penalty_weight = 0.0;
  double diameter_tol = 1e-7;
  double initial_step = 0.08;
  std::optional<double> amp_max;    // rad/us
  std::optional<double> delay_min;  // us
  std::optional<double> delay_max;  // us
  std::optional<double> width_min;  // us
  std::optional<double> width_max;  // us
};

struct Scenario {
  std::string name = "scenario";
  int n_qubits = 3;
  int photon_cutoff = 1;
  CouplingSet couplings;
  PulseSchedule schedule;
  std::string initial_label = "phi1";
  std::string target_label = "phi3";
  double t_start_us = 0.0;
  double t_end_us = 1.0;
  double dt_ns = 0.1;
  int record_stride = 1;
  DecoherenceSpec decoherence;
  std::optional<double> fidelity_floor;
  std::string floor_metric = "final";  // or "max"
  std::vector<std::string> tracked;
  OptimizeSpec optimize;

  TimeGrid grid() const {
    return TimeGrid::from_dt(t_start_us, t_end_us, dt_ns, record_stride);
  }
};

namespace detail {

inline std::string channel_kind_name(ChannelKind kind) { return passage::to_string(kind); }

inline std::optional<ChannelKind> channel_kind_from_string(const std::string& name) {
  for (ChannelKind kind :
       {ChannelKind::CavityDecay, ChannelKind::RelaxOneToExcited,
        ChannelKind::RelaxExcitedToZero, ChannelKind::DephaseOne, ChannelKind::DephaseExcited})
    if (name == channel_kind_name(kind)) return kind;
  return std::nullopt;
}

/// Field access with problem collection. Paths like "grid.dt_ns" show up in
/// the diagnostics verbatim.
struct ConfigReader {
  std::vector<std::string>& problems;

  void error(const std::string& msg) { problems.push_back("error: " + msg); }

  const json* object(const json& parent, const std::string& path, const char* key,
                     bool required) {
    if (!parent.contains(key)) {
      if (required) error(path + key + " is missing");
      return nullptr;
    }
    const json& child = parent.at(key);
    if (!child.is_object()) {
      error(path + key + " must be an object");
      return nullptr;
    }
    return &child;
  }

  std::optional<double> number(const json& parent, const std::string& path, const char* key,
                               bool required, std::optional<double> min = std::nullopt,
                               std::optional<double> max = std::nullopt) {
    if (!parent.contains(key)) {
      if (required) error(path + key + " is missing");
      return std::nullopt;
    }
    const json& v = parent.at(key);
    if (!v.is_number()) {
      error(path + key + " must be a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      error(path + key + " must be finite");
      return std::nullopt;
    }
    if (min && x < *min) {
      error(path + key + " must be >= " + std::to_string(*min));
      return std::nullopt;
    }
    if (max && x > *max) {
      error(path + key + " must be <= " + std::to_string(*max));
      return std::nullopt;
    }
    return x;
  }

  std::optional<int> integer(const json& parent, const std::string& path, const char* key,
                             bool required, std::optional<int> min = std::nullopt) {
    if (!parent.contains(key)) {
      if (required) error(path + key + " is missing");
      return std::nullopt;
    }
    const json& v = parent.at(key);
    if (!v.is_number_integer()) {
      error(path + key + " must be an integer");
      return std::nullopt;
    }
    const int x = v.get<int>();
    if (min && x < *min) {
      error(path + key + " must be >= " + std::to_string(*min));
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::string> string(const json& parent, const std::string& path,
                                    const char* key, bool required) {
    if (!parent.contains(key)) {
      if (required) error(path + key + " is missing");
      return std::nullopt;
    }
    const json& v = parent.at(key);
    if (!v.is_string()) {
      error(path + key + " must be a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }
};

/// One Gaussian term. Hand-written configs use amp_mhz_over_2pi / delay_us /
/// width_ns; emitted configs add the raw fields which win when present.
inline std::optional<GaussianTerm> term_from_json(const json& jterm, const std::string& path,
                                                  std::vector<std::string>& problems) {
  ConfigReader r{problems};
  if (!jterm.is_object()) {
    r.error(path + " must be an object");
    return std::nullopt;
  }
  GaussianTerm g;
  bool ok = true;
  if (jterm.contains("amp_rad_per_us")) {
    auto v = r.number(jterm, path + ".", "amp_rad_per_us", true, 0.0);
    ok &= v.has_value();
    if (v) g.amplitude = *v;
  } else {
    auto v = r.number(jterm, path + ".", "amp_mhz_over_2pi", true, 0.0);
    ok &= v.has_value();
    if (v) g.amplitude = angular_from_mhz(*v);
  }
  auto d = r.number(jterm, path + ".", "delay_us", true);
  ok &= d.has_value();
  if (d) g.delay = *d;
  if (jterm.contains("width_us")) {
    auto w = r.number(jterm, path + ".", "width_us", true);
    ok &= w.has_value();
    if (w) g.width = *w;
  } else {
    auto w = r.number(jterm, path + ".", "width_ns", true);
    ok &= w.has_value();
    if (w) g.width = us_from_ns(*w);
  }
  if (ok && !(g.width > 0.0)) {
    r.error(path + ".width_ns must be > 0");
    ok = false;
  }
  if (!ok) return std::nullopt;
  return g;
}

inline json term_to_json(const GaussianTerm& g) {
  json j;
  j["amp_mhz_over_2pi"] = mhz_from_angular(g.amplitude);
  j["amp_rad_per_us"] = g.amplitude;
  j["delay_us"] = g.delay;
  j["width_ns"] = ns_from_us(g.width);
  j["width_us"] = g.width;
  return j;
}

}  // namespace detail

inline json schedule_to_json(const PulseSchedule& schedule) {
  json qubits = json::array();
  for (const auto& qubit_terms : schedule.terms) {
    json terms = json::array();
    for (const GaussianTerm& g : qubit_terms) terms.push_back(detail::term_to_json(g));
    qubits.push_back(std::move(terms));
  }
  return json{{"qubits", std::move(qubits)}};
}

/// Structural validation of a scenario config. Returns itemized diagnostics
/// ("error: <field path> ..."); an empty list means the JSON is well formed.
/// Deeper semantic checks live in validate_scenario below.
inline std::vector<std::string> validate_scenario_json(const json& j) {
  std::vector<std::string> problems;
  detail::ConfigReader r{problems};
  if (!j.is_object()) {
    r.error("config root must be a JSON object");
    return problems;
  }
  const auto version = r.integer(j, "", "schema_version", true);
  if (version && *version != 1) r.error("schema_version must be 1");
  r.string(j, "", "name", false);

  int n_qubits = 0;
  if (const json* system = r.object(j, "", "system", true)) {
    const auto n = r.integer(*system, "system.", "n_qubits", true, 1);
    r.integer(*system, "system.", "photon_cutoff", true, 0);
    if (n) n_qubits = *n;
    if (system->contains("g_mhz_over_2pi")) {
      const json& g = system->at("g_mhz_over_2pi");
      if (g.is_array()) {
        if (n && static_cast<int>(g.size()) != *n)
          r.error("system.g_mhz_over_2pi array must have n_qubits entries");
        for (const json& v : g)
          if (!v.is_number() || !(v.get<double>() > 0.0))
            r.error("system.g_mhz_over_2pi entries must be positive numbers");
      } else if (!g.is_number() || !(g.get<double>() > 0.0)) {
        r.error("system.g_mhz_over_2pi must be a positive number or array");
      }
    } else {
      r.error("system.g_mhz_over_2pi is missing");
    }
    if (system->contains("g_rad_per_us")) {
      const json& g = system->at("g_rad_per_us");
      if (!g.is_array()) {
        r.error("system.g_rad_per_us must be an array");
      } else {
        if (n && static_cast<int>(g.size()) != *n)
          r.error("system.g_rad_per_us array must have n_qubits entries");
        for (const json& v : g)
          if (!v.is_number() || !(v.get<double>() > 0.0))
            r.error("system.g_rad_per_us entries must be positive numbers");
      }
    }
  }

  if (const json* sched = r.object(j, "", "schedule", true)) {
    const bool has_builtin = sched->contains("builtin");
    const bool has_qubits = sched->contains("qubits");
    if (has_builtin == has_qubits) {
      r.error("schedule needs exactly one of 'builtin' or 'qubits'");
    } else if (has_builtin) {
      const auto tag = r.string(*sched, "schedule.", "builtin", true);
      if (tag) {
        try {
          builtin_schedule(*tag);
        } catch (const ValidationError& e) {
          r.error(std::string("schedule.builtin: ") + e.what());
        }
      }
    } else {
      const json& qubits = sched->at("qubits");
      if (!qubits.is_array()) {
        r.error("schedule.qubits must be an array of per-qubit term arrays");
      } else {
        if (n_qubits && static_cast<int>(qubits.size()) != n_qubits)
          r.error("schedule.qubits must have n_qubits entries");
        for (std::size_t q = 0; q < qubits.size(); ++q) {
          if (!qubits[q].is_array()) {
            r.error("schedule.qubits[" + std::to_string(q) + "] must be an array");
            continue;
          }
          for (std::size_t t = 0; t < qubits[q].size(); ++t)
            detail::term_from_json(qubits[q][t],
                                   "schedule.qubits[" + std::to_string(q) + "][" +
                                       std::to_string(t) + "]",
                                   problems);
        }
      }
    }
  }

  r.string(j, "", "initial_state", false);
  r.string(j, "", "target_state", false);

  if (const json* grid = r.object(j, "", "grid", true)) {
    const auto t_start = r.number(*grid, "grid.", "t_start_us", false);
    const auto t_end = r.number(*grid, "grid.", "t_end_us", true);
    if (t_end && !(*t_end > t_start.value_or(0.0)))
      r.error("grid.t_end_us must be > grid.t_start_us");
    const auto dt = r.number(*grid, "grid.", "dt_ns", true);
    if (dt && !(*dt > 0.0)) r.error("grid.dt_ns must be > 0");
    r.integer(*grid, "grid.", "record_stride", false, 1);
  }

  if (j.contains("decoherence")) {
    if (const json* dec = r.object(j, "", "decoherence", true)) {
      r.number(*dec, "decoherence.", "kappa_khz_over_2pi", false, 0.0);
      r.number(*dec, "decoherence.", "gamma_khz_over_2pi", false, 0.0);
      r.number(*dec, "decoherence.", "kappa_rad_per_us", false, 0.0);
      r.number(*dec, "decoherence.", "gamma_rad_per_us", false, 0.0);
      if (dec->contains("channels")) {
        const json& channels = dec->at("channels");
        if (!channels.is_array()) {
          r.error("decoherence.channels must be an array");
        } else {
          for (std::size_t c = 0; c < channels.size(); ++c) {
            const std::string path = "decoherence.channels[" + std::to_string(c) + "]";
            if (!channels[c].is_object()) {
              r.error(path + " must be an object");
              continue;
            }
            const auto kind = r.string(channels[c], path + ".", "kind", true);
            if (kind && !detail::channel_kind_from_string(*kind))
              r.error(path + ".kind is not a known channel kind");
            if (kind && *kind != "cavity-decay")
              r.integer(channels[c], path + ".", "qubit", true, 0);
            if (channels[c].contains("rate_rad_per_us"))
              r.number(channels[c], path + ".", "rate_rad_per_us", true, 0.0);
            else
              r.number(channels[c], path + ".", "rate_khz_over_2pi", true, 0.0);
          }
        }
      }
    }
  }

  r.number(j, "", "fidelity_floor", false, 0.0, 1.0);
  if (j.contains("floor_metric")) {
    const auto metric = r.string(j, "", "floor_metric", true);
    if (metric && *metric != "final" && *metric != "max")
      r.error("floor_metric must be 'final' or 'max'");
  }
  if (j.contains("tracked_states")) {
    const json& tracked = j.at("tracked_states");
    if (!tracked.is_array())
      r.error("tracked_states must be an array of state labels");
    else
      for (const json& v : tracked)
        if (!v.is_string()) r.error("tracked_states entries must be strings");
  }

  if (j.contains("optimize")) {
    if (const json* opt = r.object(j, "", "optimize", true)) {
      const auto objective = r.string(*opt, "optimize.", "objective", false);
      if (objective && *objective != "max-fidelity" && *objective != "final-fidelity" &&
          *objective != "round-trip")
        r.error("optimize.objective must be max-fidelity, final-fidelity, or round-trip");
      if (objective && *objective == "round-trip")
        r.string(*opt, "optimize.", "transit_state", true);
      if (opt->contains("vary")) {
        const json& vary = opt->at("vary");
        if (!vary.is_array()) {
          r.error("optimize.vary must be an array");
        } else {
          for (const json& v : vary)
            if (!v.is_string() ||
                (v != "amplitudes" && v != "delays" && v != "widths"))
              r.error("optimize.vary entries must be amplitudes/delays/widths");
        }
      }
      r.integer(*opt, "optimize.", "n_starts", false, 1);
      r.integer(*opt, "optimize.", "seed", false, 0);
      r.integer(*opt, "optimize.", "max_evals", false, 1);
      const auto cdt = r.number(*opt, "optimize.", "coarse_dt_ns", false);
      if (cdt && !(*cdt > 0.0)) r.error("optimize.coarse_dt_ns must be > 0");
      r.number(*opt, "optimize.", "time_penalty_weight", false, 0.0);
      r.number(*opt, "optimize.", "diameter_tol", false, 0.0);
      r.number(*opt, "optimize.", "initial_step", false, 0.0, 1.0);
      if (opt->contains("bounds")) {
        if (const json* b = r.object(*opt, "optimize.", "bounds", true)) {
          r.number(*b, "optimize.bounds.", "amp_mhz_over_2pi_max", false, 0.0);
          r.number(*b, "optimize.bounds.", "delay_us_min", false);
          r.number(*b, "optimize.bounds.", "delay_us_max", false);
          r.number(*b, "optimize.bounds.", "width_ns_min", false, 0.0);
          r.number(*b, "optimize.bounds.", "width_ns_max", false, 0.0);
        }
      }
    }
  }
  return problems;
}

/// Builds a Scenario from validated JSON. Throws ValidationError with the
/// combined diagnostics if validate_scenario_json finds anything.
inline Scenario scenario_from_json(const json& j) {
  {
    const auto problems = validate_scenario_json(j);
    if (!problems.empty()) {
      std::string msg = "invalid scenario config:";
      for (const std::string& p : problems) msg += "\n  " + p;
      throw ValidationError(msg);
    }
  }

  Scenario sc;
  sc.name = j.value("name", std::string("scenario"));
  const json& system = j.at("system");
  sc.n_qubits = system.at("n_qubits").get<int>();
  sc.photon_cutoff = system.at("photon_cutoff").get<int>();
  const json& g = system.at("g_mhz_over_2pi");
  sc.couplings.g.clear();
  if (system.contains("g_rad_per_us"))
    for (const json& v : system.at("g_rad_per_us")) sc.couplings.g.push_back(v.get<double>());
  else if (g.is_array())
    for (const json& v : g) sc.couplings.g.push_back(angular_from_mhz(v.get<double>()));
  else
    sc.couplings.g.assign(sc.n_qubits, angular_from_mhz(g.get<double>()));

  const json& sched = j.at("schedule");
  if (sched.contains("builtin")) {
    sc.schedule = builtin_schedule(sched.at("builtin").get<std::string>());
  } else {
    sc.schedule.terms.clear();
    std::vector<std::string> ignored;
    for (std::size_t q = 0; q < sched.at("qubits").size(); ++q) {
      std::vector<GaussianTerm> terms;
      for (const json& jterm : sched.at("qubits")[q])
        terms.push_back(*detail::term_from_json(jterm, "", ignored));
      sc.schedule.terms.push_back(std::move(terms));
    }
  }

  sc.initial_label = j.value("initial_state", std::string("phi1"));
  sc.target_label = j.value("target_state", std::string("phi3"));

  const json& grid = j.at("grid");
  sc.t_start_us = grid.value("t_start_us", 0.0);
  sc.t_end_us = grid.at("t_end_us").get<double>();
  sc.dt_ns = grid.at("dt_ns").get<double>();
  sc.record_stride = grid.value("record_stride", 1);

  if (j.contains("decoherence")) {
    const json& dec = j.at("decoherence");
    if (dec.contains("kappa_rad_per_us"))
      sc.decoherence.kappa = dec.at("kappa_rad_per_us").get<double>();
    else if (dec.contains("kappa_khz_over_2pi"))
      sc.decoherence.kappa = angular_from_khz(dec.at("kappa_khz_over_2pi").get<double>());
    if (dec.contains("gamma_rad_per_us"))
      sc.decoherence.gamma = dec.at("gamma_rad_per_us").get<double>();
    else if (dec.contains("gamma_khz_over_2pi"))
      sc.decoherence.gamma = angular_from_khz(dec.at("gamma_khz_over_2pi").get<double>());
    if (dec.contains("channels")) {
      for (const json& jc : dec.at("channels")) {
        CollapseChannel c;
        c.kind = *detail::channel_kind_from_string(jc.at("kind").get<std::string>());
        c.qubit = jc.value("qubit", 0);
        if (jc.contains("rate_rad_per_us"))
          c.rate = jc.at("rate_rad_per_us").get<double>();
        else
          c.rate = angular_from_khz(jc.at("rate_khz_over_2pi").get<double>());
        sc.decoherence.extra.push_back(c);
      }
    }
  }

  if (j.contains("fidelity_floor")) sc.fidelity_floor = j.at("fidelity_floor").get<double>();
  sc.floor_metric = j.value("floor_metric", std::string("final"));
  if (j.contains("tracked_states"))
    for (const json& v : j.at("tracked_states")) sc.tracked.push_back(v.get<std::string>());

  if (j.contains("optimize")) {
    const json& opt = j.at("optimize");
    OptimizeSpec& spec = sc.optimize;
    spec.present = true;
    const std::string objective = opt.value("objective", std::string("max-fidelity"));
    if (objective == "final-fidelity")
      spec.mode = Objective::Mode::FinalFidelity;
    else if (objective == "round-trip")
      spec.mode = Objective::Mode::RoundTrip;
    else
      spec.mode = Objective::Mode::MaxFidelity;
    spec.transit_label = opt.value("transit_state", std::string());
    if (opt.contains("vary")) {
      spec.vary_amplitudes = spec.vary_delays = spec.vary_widths = false;
      for (const json& v : opt.at("vary")) {
        if (v == "amplitudes") spec.vary_amplitudes = true;
        if (v == "delays") spec.vary_delays = true;
        if (v == "widths") spec.vary_widths = true;
      }
    }
    spec.n_starts = opt.value("n_starts", 1);
    spec.seed = opt.value("seed", 1);
    spec.max_evals = opt.value("max_evals", 400);
    spec.coarse_dt_ns = opt.value("coarse_dt_ns", 0.4);
    spec.time_penalty_weight = opt.value("time_penalty_weight", 0.0);
    spec.diameter_tol = opt.value("diameter_tol", 1e-7);
    spec.initial_step = opt.value("initial_step", 0.08);
    if (opt.contains("bounds")) {
      const json& b = opt.at("bounds");
      if (b.contains("amp_mhz_over_2pi_max"))
        spec.amp_max = angular_from_mhz(b.at("amp_mhz_over_2pi_max").get<double>());
      if (b.contains("delay_us_min")) spec.delay_min = b.at("delay_us_min").get<double>();
      if (b.contains("delay_us_max")) spec.delay_max = b.at("delay_us_max").get<double>();
      if (b.contains("width_ns_min"))
        spec.width_min = us_from_ns(b.at("width_ns_min").get<double>());
      if (b.contains("width_ns_max"))
        spec.width_max = us_from_ns(b.at("width_ns_max").get<double>());
    }
  }
  return sc;
}

/// Full scenario -> config JSON, in the emitted (raw + human-readable) form.
/// Reloading the result reproduces the same run exactly.
inline json scenario_to_json(const Scenario& sc) {
  json j;
  j["schema_version"] = 1;
  j["name"] = sc.name;
  json g_mhz = json::array();
  json g_raw = json::array();
  for (double g : sc.couplings.g) {
    g_mhz.push_back(mhz_from_angular(g));
    g_raw.push_back(g);
  }
  j["system"] = {{"n_qubits", sc.n_qubits},
                 {"photon_cutoff", sc.photon_cutoff},
                 {"g_mhz_over_2pi", std::move(g_mhz)},
                 {"g_rad_per_us", std::move(g_raw)}};
  j["schedule"] = schedule_to_json(sc.schedule);
  j["initial_state"] = sc.initial_label;
  j["target_state"] = sc.target_label;
  j["grid"] = {{"t_start_us", sc.t_start_us},
               {"t_end_us", sc.t_end_us},
               {"dt_ns", sc.dt_ns},
               {"record_stride", sc.record_stride}};
  if (sc.decoherence.enabled()) {
    json dec;
    if (sc.decoherence.kappa) {
      dec["kappa_khz_over_2pi"] = *sc.decoherence.kappa / (kTwoPi * 1e-3);
      dec["kappa_rad_per_us"] = *sc.decoherence.kappa;
    }
    if (sc.decoherence.gamma) {
      dec["gamma_khz_over_2pi"] = *sc.decoherence.gamma / (kTwoPi * 1e-3);
      dec["gamma_rad_per_us"] = *sc.decoherence.gamma;
    }
    if (!sc.decoherence.extra.empty()) {
      json channels = json::array();
      for (const CollapseChannel& c : sc.decoherence.extra)
        channels.push_back({{"kind", detail::channel_kind_name(c.kind)},
                            {"qubit", c.qubit},
                            {"rate_khz_over_2pi", c.rate / (kTwoPi * 1e-3)},
                            {"rate_rad_per_us", c.rate}});
      dec["channels"] = std::move(channels);
    }
    j["decoherence"] = std::move(dec);
  }
  if (sc.fidelity_floor) j["fidelity_floor"] = *sc.fidelity_floor;
  j["floor_metric"] = sc.floor_metric;
  if (!sc.tracked.empty()) j["tracked_states"] = sc.tracked;
  return j;
}

inline Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("config is not valid JSON (" + path.string() + "): " + e.what());
  }
  return scenario_from_json(j);
}

/// Semantic diagnostics on a constructed Scenario: label resolution,
/// schedule shape, dimension estimate, RK4 step-size sanity, and a
/// dark-state residual self-test with the configured couplings. "error:"
/// entries make the scenario unrunnable; "warning:"/"info:" entries do not.
inline std::vector<std::string> validate_scenario(const Scenario& sc) {
  std::vector<std::string> findings;
  auto err = [&](const std::string& m) { findings.push_back("error: " + m); };
  auto warn = [&](const std::string& m) { findings.push_back("warning: " + m); };
  auto info = [&](const std::string& m) { findings.push_back("info: " + m); };

  std::optional<StateSpace> space;
  try {
    space.emplace(sc.n_qubits, sc.photon_cutoff);
    info("state space dimension = " + std::to_string(space->dim()));
  } catch (const ValidationError& e) {
    err(e.what());
    return findings;
  }

  if (sc.couplings.n_qubits() != sc.n_qubits)
    err("coupling count does not match n_qubits");
  for (double g : sc.couplings.g)
    if (!(g > 0.0)) err("couplings must be positive");

  if (sc.schedule.n_qubits() != sc.n_qubits)
    err("schedule qubit count does not match n_qubits");
  for (const std::string& finding : validate_schedule(sc.schedule))
    err("schedule: " + finding);

  for (const std::string& label : {sc.initial_label, sc.target_label}) {
    try {
      state_from_label(*space, label);
    } catch (const ValidationError& e) {
      err(std::string("state label '") + label + "': " + e.what());
    }
  }
  for (const std::string& label : sc.tracked) {
    try {
      state_from_label(*space, label);
    } catch (const ValidationError& e) {
      err(std::string("tracked state '") + label + "': " + e.what());
    }
  }

  try {
    sc.grid().validate();
  } catch (const ValidationError& e) {
    err(std::string("grid: ") + e.what());
  }

  for (const CollapseChannel& c : sc.decoherence.extra) {
    if (c.rate < 0.0) err("decoherence channel rate must be >= 0");
    if (c.kind != ChannelKind::CavityDecay && (c.qubit < 0 || c.qubit >= sc.n_qubits))
      err("decoherence channel qubit index out of range");
  }

  if (sc.optimize.present && sc.optimize.mode == Objective::Mode::RoundTrip) {
    if (sc.optimize.transit_label.empty()) {
      err("round-trip optimization needs optimize.transit_state");
    } else {
      try {
        state_from_label(*space, sc.optimize.transit_label);
      } catch (const ValidationError& e) {
        err(std::string("transit state: ") + e.what());
      }
    }
  }

  // Findings below need a structurally sound scenario.
  for (const std::string& f : findings)
    if (f.rfind("error:", 0) == 0) return findings;

  if (sc.photon_cutoff < 1)
    warn("photon_cutoff = 0 removes the cavity dynamics entirely");

  // Gershgorin bound on |H| over the run, against the RK4 stability limit
  // |lambda| dt < 2*sqrt(2).
  double h_scale = 0.0;
  for (int s = 0; s <= 32; ++s) {
    const double t = sc.t_start_us + (sc.t_end_us - sc.t_start_us) * s / 32.0;
    double row = 0.0;
    for (int l = 0; l < sc.n_qubits; ++l) {
      const double swap_term =
          sc.photon_cutoff >= 1 ? sc.couplings.g[l] * std::sqrt(double(sc.photon_cutoff)) : 0.0;
      row = std::max(row, swap_term + sc.schedule.envelope(l, t));
    }
    h_scale = std::max(h_scale, 2.0 * row);
  }
  const double theta = h_scale * us_from_ns(sc.dt_ns);
  if (theta > 2.5)
    warn("dt_ns is at or beyond the RK4 stability limit for this Hamiltonian (|H| dt ~ " +
         std::to_string(theta) + ")");
  info("estimated |H| dt = " + std::to_string(theta));

  // Dark-state self-test: the analytic null vector must be annihilated by
  // the Hamiltonian built from this config.
  try {
    std::vector<double> rabi(sc.n_qubits);
    const double t_probe = 0.5 * (sc.t_start_us + sc.t_end_us);
    for (int l = 0; l < sc.n_qubits; ++l) rabi[l] = sc.schedule.envelope(l, t_probe);
    const Vector d = dark_state(*space, sc.couplings, rabi);
    const Matrix h = hamiltonian_at(*space, sc.couplings, rabi);
    const double residual = (h * d).norm();
    const double scale = h.norm();
    if (residual > 1e-10 * scale)
      err("dark-state residual self-test failed: |H d| = " + std::to_string(residual));
    else
      info("dark-state residual |H d| / |H| = " + std::to_string(residual / scale));
  } catch (const ValidationError&) {
    info("dark-state self-test skipped (drives vanish at the probe time)");
  }

  return findings;
}

inline bool has_errors(const std::vector<std::string>& findings) {
  for (const std::string& f : findings)
    if (f.rfind("error:", 0) == 0) return true;
  return false;
}

struct RunOptions {
  std::optional<double> dt_ns;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = ".";
  bool write_files = true;
};

struct ScenarioRun {
  Scenario scenario;
  TrajectoryRecord record;
  RunSummary summary;
  bool open_system = false;
  std::optional<bool> floor_satisfied;
  json summary_json;
  std::filesystem::path trajectory_path;
  std::filesystem::path summary_path;
};

inline json summary_to_json(const ScenarioRun& run) {
  const RunSummary& s = run.summary;
  json j;
  j["schema_version"] = 1;
  j["scenario"] = s.scenario;
  j["target"] = s.target_label;
  j["open_system"] = run.open_system;
  j["final_fidelity"] = s.final_fidelity;
  j["max_fidelity"] = s.max_fidelity;
  j["t_of_max_us"] = s.t_of_max_us;
  j["final_drift"] = s.final_drift;
  j["max_drift"] = s.max_drift;
  j["ne_final"] = s.ne_final;
  j["ne_max_deviation"] = s.ne_max_deviation;
  j["grid"] = {{"t_end_us", s.t_end_us}, {"dt_ns", s.dt_ns}, {"n_steps", s.n_steps}};
  j["fidelity_floor"] = run.scenario.fidelity_floor ? json(*run.scenario.fidelity_floor) : json();
  j["floor_metric"] = run.scenario.floor_metric;
  j["floor_satisfied"] = run.floor_satisfied ? json(*run.floor_satisfied) : json();
  return j;
}

/// Runs one scenario end to end: validate, integrate (closed or open),
/// annotate, summarize, and (optionally) write trajectory CSV + summary
/// JSON under options.out_dir.
inline ScenarioRun run_scenario(const Scenario& sc, const RunOptions& options = {}) {
  {
    const auto findings = validate_scenario(sc);
    if (has_errors(findings)) {
      std::string msg = "scenario '" + sc.name + "' failed validation:";
      for (const std::string& f : findings)
        if (f.rfind("error:", 0) == 0) msg += "\n  " + f;
      throw ValidationError(msg);
    }
  }

  ScenarioRun run;
  run.scenario = sc;
  const StateSpace space(sc.n_qubits, sc.photon_cutoff);
  const HamiltonianModel model(space, sc.couplings, sc.schedule);
  TimeGrid grid = sc.grid();
  if (options.dt_ns)
    grid = TimeGrid::from_dt(sc.t_start_us, sc.t_end_us, *options.dt_ns, sc.record_stride);

  const TargetState target = state_from_label(space, sc.target_label);
  const Vector psi0 = state_from_label(space, sc.initial_label).state;

  run.open_system = sc.decoherence.enabled();
  if (run.open_system) {
    const Matrix rho0 = psi0 * psi0.adjoint();
    run.record = evolve_lindblad(model, rho0, sc.decoherence.build(sc.n_qubits), grid);
  } else {
    run.record = evolve_schrodinger(model, psi0, grid);
  }

  annotate(run.record, space, target,
           sc.tracked.empty() ? default_tracked_labels(space) : sc.tracked);
  run.summary = summarize(run.record, sc.name, target.label, grid);

  if (sc.fidelity_floor) {
    const double achieved =
        sc.floor_metric == "max" ? run.summary.max_fidelity : run.summary.final_fidelity;
    run.floor_satisfied = achieved >= *sc.fidelity_floor;
  }

  run.summary_json = summary_to_json(run);
  if (options.write_files) {
    run.trajectory_path = options.out_dir / (sc.name + "_trajectory.csv");
    run.summary_path = options.out_dir / (sc.name + "_summary.json");
    write_trajectory_csv(run.trajectory_path, run.record);
    run.summary_json["outputs"] = {{"trajectory_csv", run.trajectory_path.string()}};
    std::ofstream out = detail::open_for_write(run.summary_path);
    out << run.summary_json.dump(2) << '\n';
  }
  return run;
}

struct OptimizeRun {
  OptimizeResult result;
  double seed_value = 0.0;
  PulseSchedule best_schedule;
  ScenarioRun verification;
  json report;
  std::filesystem::path config_path;
  std::filesystem::path history_path;
  std::filesystem::path report_path;
};

namespace detail {

inline ParameterBounds build_bounds(const PulseParameterization& param,
                                    const Scenario& sc) {
  ParameterBounds b = param.default_bounds(sc.t_start_us, sc.t_end_us);
  const OptimizeSpec& spec = sc.optimize;
  Eigen::Index i = 0;
  for (const auto& qubit_terms : param.base.terms)
    for (std::size_t k = 0; k < qubit_terms.size(); ++k) {
      if (param.vary_amplitudes) {
        if (spec.amp_max) b.upper(i) = *spec.amp_max;
        ++i;
      }
      if (param.vary_delays) {
        if (spec.delay_min) b.lower(i) = *spec.delay_min;
        if (spec.delay_max) b.upper(i) = *spec.delay_max;
        ++i;
      }
      if (param.vary_widths) {
        if (spec.width_min) b.lower(i) = *spec.width_min;
        if (spec.width_max) b.upper(i) = *spec.width_max;
        ++i;
      }
    }
  return b;
}

}  // namespace detail

/// Pulse optimization driver: multi-start Nelder-Mead on the closed system
/// at the coarse grid, then a full-resolution verification run of the best
/// schedule. Emits the best schedule as a complete, re-runnable scenario
/// config plus the evaluation history.
inline OptimizeRun run_optimize(const Scenario& sc, const RunOptions& options = {}) {
  if (!sc.optimize.present)
    throw ValidationError("scenario '" + sc.name + "' has no optimize section");
  {
    const auto findings = validate_scenario(sc);
    if (has_errors(findings)) {
      std::string msg = "scenario '" + sc.name + "' failed validation:";
      for (const std::string& f : findings)
        if (f.rfind("error:", 0) == 0) msg += "\n  " + f;
      throw ValidationError(msg);
    }
  }

  const OptimizeSpec& spec = sc.optimize;
  const StateSpace space(sc.n_qubits, sc.photon_cutoff);
  const Vector psi0 = state_from_label(space, sc.initial_label).state;
  const TargetState target = state_from_label(space, sc.target_label);
  std::optional<TargetState> transit;
  if (spec.mode == Objective::Mode::RoundTrip)
    transit = state_from_label(space, spec.transit_label);

  PulseParameterization param;
  param.base = sc.schedule;
  param.vary_amplitudes = spec.vary_amplitudes;
  param.vary_delays = spec.vary_delays;
  param.vary_widths = spec.vary_widths;
  if (param.n_params() == 0)
    throw ValidationError("optimize.vary selects no parameters");

  const TimeGrid coarse = TimeGrid::from_dt(sc.t_start_us, sc.t_end_us, spec.coarse_dt_ns);
  const Objective objective(space, sc.couplings, param, psi0, target, coarse, spec.mode,
                            spec.time_penalty_weight, transit);
  const ParameterBounds bounds = detail::build_bounds(param, sc);

  NelderMeadOptions nm;
  nm.max_evals = spec.max_evals;
  nm.diameter_tol = spec.diameter_tol;
  nm.initial_step = spec.initial_step;

  const Eigen::VectorXd x0 = param.pack();
  OptimizeRun run;
  run.seed_value = objective.evaluate(x0);
  run.result = multi_start([&objective](const Eigen::VectorXd& x) { return objective.evaluate(x); },
                           x0, bounds, spec.n_starts, options.seed.value_or(spec.seed), nm,
                           options.threads);
  run.best_schedule = param.unpack(run.result.best_params);

  Scenario best = sc;
  best.name = sc.name + "-best";
  best.schedule = run.best_schedule;
  best.optimize = OptimizeSpec{};
  RunOptions verify_options = options;
  run.verification = run_scenario(best, verify_options);

  run.report["schema_version"] = 1;
  run.report["scenario"] = sc.name;
  run.report["objective"] = spec.mode == Objective::Mode::RoundTrip      ? "round-trip"
                            : spec.mode == Objective::Mode::FinalFidelity ? "final-fidelity"
                                                                          : "max-fidelity";
  run.report["n_evals"] = run.result.n_evals;
  run.report["n_starts"] = spec.n_starts;
  run.report["best_start"] = run.result.best_start;
  run.report["converged"] = run.result.converged;
  run.report["seed_value"] = run.seed_value;
  run.report["best_value"] = run.result.best_value;
  run.report["improved_over_seed"] = run.result.best_value <= run.seed_value;
  run.report["verification"] = run.verification.summary_json;

  if (options.write_files) {
    run.config_path = options.out_dir / (sc.name + "_best.json");
    run.history_path = options.out_dir / (sc.name + "_history.csv");
    run.report_path = options.out_dir / (sc.name + "_optimize.json");
    {
      std::ofstream out = detail::open_for_write(run.config_path);
      out << scenario_to_json(best).dump(2) << '\n';
    }
    write_history_csv(run.history_path, run.result.history);
    run.report["outputs"] = {{"best_config", run.config_path.string()},
                             {"history_csv", run.history_path.string()},
                             {"trajectory_csv", run.verification.trajectory_path.string()}};
    std::ofstream out = detail::open_for_write(run.report_path);
    out << run.report.dump(2) << '\n';
  }
  return run;
}

}  // namespace passage
