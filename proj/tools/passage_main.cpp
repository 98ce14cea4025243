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

// passage: simulate / sweep / optimize / validate scenario configs.
//
// Exit codes (stable contract):
//   0  success
//   2  validation failure, including a missed declared fidelity floor
//   3  numerical failure (integrator drift, lost positivity)
//   1  anything else (I/O, internal)

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "passage/passage.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
  std::string config;
  std::string out_dir = ".";
  std::optional<double> dt_ns;
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_seed) {
  cmd->add_option("config", args.config, "Scenario/sweep config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out-dir", args.out_dir, "Directory for emitted CSV/JSON files");
  cmd->add_option("--dt-ns", args.dt_ns, "Override the config's integration step (ns)");
  cmd->add_option("--threads", args.threads, "Worker threads for sweep cells / optimizer starts")
      ->check(CLI::PositiveNumber);
  if (with_seed)
    cmd->add_option("--seed", args.seed, "Override the optimizer's random seed");
}

passage::RunOptions to_options(const CommonArgs& args) {
  passage::RunOptions options;
  options.out_dir = args.out_dir;
  options.dt_ns = args.dt_ns;
  options.threads = args.threads;
  options.seed = args.seed;
  return options;
}

int floor_exit(const passage::ScenarioRun& run) {
  if (run.floor_satisfied && !*run.floor_satisfied) {
    std::fprintf(stderr, "fidelity floor %.6f not met (%s fidelity %.10f)\n",
                 *run.scenario.fidelity_floor, run.scenario.floor_metric.c_str(),
                 run.scenario.floor_metric == "max" ? run.summary.max_fidelity
                                                    : run.summary.final_fidelity);
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_simulate(const CommonArgs& args) {
  const passage::Scenario sc = passage::load_scenario_file(args.config);
  const passage::ScenarioRun run = passage::run_scenario(sc, to_options(args));
  std::printf("scenario %s (%s): final_fidelity=%.10f max_fidelity=%.10f at t=%.6f us, "
              "drift=%.3e\n",
              run.summary.scenario.c_str(), run.open_system ? "open" : "closed",
              run.summary.final_fidelity, run.summary.max_fidelity, run.summary.t_of_max_us,
              run.summary.final_drift);
  std::printf("wrote %s\nwrote %s\n", run.trajectory_path.string().c_str(),
              run.summary_path.string().c_str());
  return floor_exit(run);
}

int cmd_sweep(const CommonArgs& args) {
  const passage::SweepSpec spec = passage::load_sweep_file(args.config);
  const passage::SweepResult result = passage::run_sweep(spec, to_options(args));
  const std::filesystem::path csv_path =
      std::filesystem::path(args.out_dir) / (spec.name + "_sweep.csv");
  const std::filesystem::path json_path =
      std::filesystem::path(args.out_dir) / (spec.name + "_sweep.json");
  passage::write_sweep_csv(csv_path, result);
  {
    nlohmann::json j = passage::sweep_to_json(spec, result);
    j["outputs"] = {{"sweep_csv", csv_path.string()}};
    std::ofstream out(json_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + json_path.string());
    out << j.dump(2) << '\n';
  }
  std::printf("sweep %s: %d x %d cells, %zu failed\n", spec.name.c_str(),
              int(result.kappa_khz.size()), int(result.gamma_khz.size()),
              result.failures.size());
  for (const std::string& f : result.failures)
    std::fprintf(stderr, "failed cell: %s\n", f.c_str());
  std::printf("wrote %s\nwrote %s\n", csv_path.string().c_str(), json_path.string().c_str());
  return kExitOk;
}

int cmd_optimize(const CommonArgs& args) {
  const passage::Scenario sc = passage::load_scenario_file(args.config);
  const passage::OptimizeRun run = passage::run_optimize(sc, to_options(args));
  std::printf("optimize %s: %d evals over %d start(s), objective %.10f (seed %.10f)\n",
              sc.name.c_str(), run.result.n_evals, sc.optimize.n_starts,
              run.result.best_value, run.seed_value);
  std::printf("verification: final_fidelity=%.10f max_fidelity=%.10f\n",
              run.verification.summary.final_fidelity, run.verification.summary.max_fidelity);
  std::printf("wrote %s\nwrote %s\nwrote %s\n", run.config_path.string().c_str(),
              run.history_path.string().c_str(), run.report_path.string().c_str());
  return floor_exit(run.verification);
}

int cmd_validate(const CommonArgs& args) {
  std::ifstream in(args.config);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    std::printf("error: config is not valid JSON: %s\n", e.what());
    return kExitValidation;
  }

  std::vector<std::string> findings;
  const bool is_sweep = j.is_object() && (j.contains("base") || j.contains("base_scenario") ||
                                          j.contains("kappa_khz_over_2pi"));
  if (is_sweep) {
    findings = passage::validate_sweep_json(j);
    if (findings.empty()) {
      try {
        const passage::SweepSpec spec = passage::sweep_from_json(
            j, std::filesystem::path(args.config).parent_path());
        for (const std::string& f : passage::validate_scenario(spec.base))
          findings.push_back(f);
      } catch (const passage::ValidationError& e) {
        findings.push_back(std::string("error: ") + e.what());
      }
    }
  } else {
    findings = passage::validate_scenario_json(j);
    if (findings.empty())
      for (const std::string& f : passage::validate_scenario(passage::scenario_from_json(j)))
        findings.push_back(f);
  }

  for (const std::string& f : findings) std::printf("%s\n", f.c_str());
  if (passage::has_errors(findings)) return kExitValidation;
  std::printf("%s: valid\n", args.config.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic-passage simulator for cavity-coupled three-level transmons"};
  app.require_subcommand(1);

  CommonArgs simulate_args, sweep_args, optimize_args, validate_args;
  CLI::App* simulate = app.add_subcommand("simulate", "Run one scenario and emit trajectory + summary");
  add_common(simulate, simulate_args, false);
  CLI::App* sweep = app.add_subcommand("sweep", "Run a (kappa, gamma) grid and emit the fidelity matrix");
  add_common(sweep, sweep_args, false);
  CLI::App* optimize = app.add_subcommand("optimize", "Optimize pulse parameters, then verify at full resolution");
  add_common(optimize, optimize_args, true);
  CLI::App* validate = app.add_subcommand("validate", "Check a config and print diagnostics");
  validate->add_option("config", validate_args.config, "Config file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(simulate_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (optimize->parsed()) return cmd_optimize(optimize_args);
    if (validate->parsed()) return cmd_validate(validate_args);
  } catch (const passage::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const passage::IntegrationError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitOther;
  }
  return kExitOther;
}
