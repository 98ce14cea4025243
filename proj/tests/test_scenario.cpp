// Copyright 2026 The Passage Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <passage/scenario.hpp>

using namespace passage;

namespace {

const std::filesystem::path kScenarioDir = PASSAGE_SCENARIO_DIR;

bool any_contains(const std::vector<std::string>& items, const std::string& needle) {
  for (const std::string& s : items)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

// A one-qubit drive toy whose exact answer is the Gaussian pulse-area law.
json toy_config() {
  return json{
      {"schema_version", 1},
      {"name", "toy"},
      {"system", {{"n_qubits", 1}, {"photon_cutoff", 0}, {"g_mhz_over_2pi", 200.0}}},
      {"schedule",
       {{"qubits", json::array({json::array({json{{"amp_rad_per_us", 40.0},
                                                  {"delay_us", 0.25},
                                                  {"width_us", 0.06}}})})}}},
      {"initial_state", "c:0|q:1"},
      {"target_state", "c:0|q:e"},
      {"tracked_states", json::array({"c:0|q:1", "c:0|q:e", "c:0|q:0"})},
      {"grid", {{"t_start_us", 0.0}, {"t_end_us", 0.5}, {"dt_ns", 1.0}}},
  };
}

std::filesystem::path fresh_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("shipped scenario configs all load and validate", "[scenario]") {
  const std::vector<std::string> files{
      "qst-fig2.json",         "qst-fig2-inhom.json",  "wstate-fig4.json",
      "wstate-fig4-inhom.json", "wstate-staggered.json", "wstate-opt.json",
      "qst-fig5-point.json",   "qst-open-base.json",   "wstate-open-base.json",
      "roundtrip-fig3.json",
  };
  for (const std::string& name : files) {
    INFO(name);
    const Scenario sc = load_scenario_file(kScenarioDir / name);
    const auto findings = validate_scenario(sc);
    INFO((findings.empty() ? std::string() : findings.front()));
    CHECK_FALSE(has_errors(findings));
  }
}

TEST_CASE("the stock transfer config carries the pinned numbers", "[scenario]") {
  const Scenario sc = load_scenario_file(kScenarioDir / "qst-fig2.json");
  CHECK(sc.name == "qst-fig2");
  CHECK(sc.n_qubits == 3);
  CHECK(sc.photon_cutoff == 1);
  REQUIRE(sc.couplings.g.size() == 3);
  for (double g : sc.couplings.g) CHECK(g == angular_from_mhz(200.0));
  CHECK(sc.schedule.total_terms() == 6);
  CHECK(sc.initial_label == "phi1");
  CHECK(sc.target_label == "phi3");
  CHECK(sc.t_end_us == 0.85);
  REQUIRE(sc.fidelity_floor.has_value());
  CHECK(*sc.fidelity_floor == 0.98);
  CHECK(sc.floor_metric == "final");
  CHECK(sc.tracked.size() == 7);
  CHECK_FALSE(sc.decoherence.enabled());
  CHECK_FALSE(sc.optimize.present);
}

TEST_CASE("structural validation itemizes every problem", "[scenario]") {
  const json bad{
      {"system",
       {{"n_qubits", 3}, {"photon_cutoff", 1}, {"g_mhz_over_2pi", json::array({200.0, -5.0, 100.0})}}},
      {"schedule", {{"builtin", "qst-fig2"}, {"qubits", json::array()}}},
      {"grid", {{"t_start_us", 0.5}, {"t_end_us", 0.2}, {"dt_ns", -0.1}}},
      {"floor_metric", "peak"},
      {"optimize", {{"objective", "round-trip"}, {"vary", json::array({"phases"})}}},
  };
  const auto problems = validate_scenario_json(bad);
  CHECK(problems.size() >= 7);
  CHECK(any_contains(problems, "schema_version"));
  CHECK(any_contains(problems, "g_mhz_over_2pi entries"));
  CHECK(any_contains(problems, "exactly one of"));
  CHECK(any_contains(problems, "t_end_us"));
  CHECK(any_contains(problems, "dt_ns"));
  CHECK(any_contains(problems, "floor_metric"));
  CHECK(any_contains(problems, "transit_state"));
  CHECK(any_contains(problems, "vary"));
  CHECK_THROWS_AS(scenario_from_json(bad), ValidationError);

  const auto good = validate_scenario_json(load_json_file(kScenarioDir / "qst-fig2.json"));
  CHECK(good.empty());
}

TEST_CASE("save and reload reproduce a scenario bit for bit", "[scenario]") {
  for (const std::string& name : {"qst-fig2.json", "qst-fig5-point.json"}) {
    INFO(name);
    const Scenario sc = load_scenario_file(kScenarioDir / name);
    const Scenario back = scenario_from_json(scenario_to_json(sc));
    REQUIRE(back.couplings.g.size() == sc.couplings.g.size());
    for (std::size_t i = 0; i < sc.couplings.g.size(); ++i)
      CHECK(back.couplings.g[i] == sc.couplings.g[i]);
    REQUIRE(back.schedule.terms.size() == sc.schedule.terms.size());
    for (std::size_t q = 0; q < sc.schedule.terms.size(); ++q) {
      REQUIRE(back.schedule.terms[q].size() == sc.schedule.terms[q].size());
      for (std::size_t t = 0; t < sc.schedule.terms[q].size(); ++t) {
        CHECK(back.schedule.terms[q][t].amplitude == sc.schedule.terms[q][t].amplitude);
        CHECK(back.schedule.terms[q][t].delay == sc.schedule.terms[q][t].delay);
        CHECK(back.schedule.terms[q][t].width == sc.schedule.terms[q][t].width);
      }
    }
    CHECK(back.initial_label == sc.initial_label);
    CHECK(back.target_label == sc.target_label);
    CHECK(back.t_end_us == sc.t_end_us);
    CHECK(back.dt_ns == sc.dt_ns);
    CHECK(back.record_stride == sc.record_stride);
    CHECK(back.fidelity_floor == sc.fidelity_floor);
    CHECK(back.floor_metric == sc.floor_metric);
    CHECK(back.tracked == sc.tracked);
    CHECK(back.decoherence.kappa == sc.decoherence.kappa);
    CHECK(back.decoherence.gamma == sc.decoherence.gamma);
  }
}

TEST_CASE("file loading reports missing and malformed files", "[scenario]") {
  CHECK_THROWS_AS(load_scenario_file(kScenarioDir / "no-such-file.json"),
                  ValidationError);
  const auto dir = fresh_dir("passage-bad-config");
  const auto path = dir / "broken.json";
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_WITH(load_scenario_file(path),
                    Catch::Matchers::ContainsSubstring("not valid JSON"));
}

TEST_CASE("semantic validation flags unrunnable scenarios", "[scenario]") {
  Scenario sc = scenario_from_json(toy_config());
  CHECK_FALSE(has_errors(validate_scenario(sc)));
  CHECK(any_contains(validate_scenario(sc), "warning: photon_cutoff = 0"));

  Scenario bad_coupling = sc;
  bad_coupling.couplings.g = {1.0, 2.0};
  CHECK(has_errors(validate_scenario(bad_coupling)));

  Scenario bad_label = sc;
  bad_label.target_label = "phi9";
  CHECK(has_errors(validate_scenario(bad_label)));

  Scenario stiff = load_scenario_file(kScenarioDir / "qst-fig2.json");
  stiff.dt_ns = 5.0;
  CHECK(any_contains(validate_scenario(stiff), "stability"));

  CHECK_THROWS_AS(run_scenario(bad_label, RunOptions{.write_files = false}),
                  ValidationError);
}

TEST_CASE("a scenario run reports fidelity, floor, and summary JSON",
          "[scenario]") {
  json cfg = toy_config();
  cfg["fidelity_floor"] = 0.75;
  Scenario sc = scenario_from_json(cfg);

  RunOptions options;
  options.write_files = false;
  const ScenarioRun run = run_scenario(sc, options);

  const double area = 40.0 * 0.06 * std::sqrt(M_PI) / 2.0 *
                      (std::erf((0.5 - 0.25) / 0.06) - std::erf((0.0 - 0.25) / 0.06));
  const double expected = std::pow(std::sin(area), 2);
  CHECK(run.summary.final_fidelity == Catch::Approx(expected).margin(1e-8));
  CHECK_FALSE(run.open_system);
  REQUIRE(run.floor_satisfied.has_value());
  CHECK(*run.floor_satisfied == (expected >= 0.75));
  CHECK(run.record.tracked_labels.size() == 3);

  const json& s = run.summary_json;
  for (const char* key :
       {"schema_version", "scenario", "target", "open_system", "final_fidelity",
        "max_fidelity", "t_of_max_us", "final_drift", "max_drift", "ne_final",
        "ne_max_deviation", "grid", "fidelity_floor", "floor_metric",
        "floor_satisfied"}) {
    INFO(key);
    CHECK(s.contains(key));
  }
  CHECK(s.at("schema_version").get<int>() == 1);
  CHECK(s.at("floor_satisfied").get<bool>() == *run.floor_satisfied);
  CHECK(s.at("grid").at("n_steps").get<int>() == 500);

  cfg["fidelity_floor"] = 0.99;
  cfg["floor_metric"] = "max";
  const ScenarioRun peak = run_scenario(scenario_from_json(cfg), options);
  REQUIRE(peak.floor_satisfied.has_value());
  CHECK(*peak.floor_satisfied);
  CHECK(peak.summary.max_fidelity > 0.99);

  cfg["floor_metric"] = "final";
  const ScenarioRun miss = run_scenario(scenario_from_json(cfg), options);
  REQUIRE(miss.floor_satisfied.has_value());
  CHECK_FALSE(*miss.floor_satisfied);
}

TEST_CASE("runs honor the grid override and write the output pair",
          "[scenario]") {
  json cfg = toy_config();
  Scenario sc = scenario_from_json(cfg);

  RunOptions options;
  options.write_files = false;
  options.dt_ns = 2.0;
  const ScenarioRun coarse = run_scenario(sc, options);
  CHECK(coarse.summary.dt_ns == Catch::Approx(2.0));
  CHECK(coarse.summary.n_steps == 250);

  const auto dir = fresh_dir("passage-run-outputs");
  RunOptions writing;
  writing.out_dir = dir;
  const ScenarioRun run = run_scenario(sc, writing);
  REQUIRE(std::filesystem::exists(run.trajectory_path));
  REQUIRE(std::filesystem::exists(run.summary_path));
  CHECK(run.trajectory_path.filename() == "toy_trajectory.csv");
  CHECK(run.summary_path.filename() == "toy_summary.json");

  std::ifstream csv(run.trajectory_path);
  std::string header;
  std::getline(csv, header);
  CHECK(header ==
        "t_us,pop:c:0|q:1,pop:c:0|q:e,pop:c:0|q:0,fidelity,norm_or_trace,"
        "ne_expectation");
  std::string first_row;
  std::getline(csv, first_row);
  CHECK(first_row.substr(0, 9) == "0.000000,");

  const json summary = load_json_file(run.summary_path);
  CHECK(summary.at("outputs").at("trajectory_csv").get<std::string>() ==
        run.trajectory_path.string());
}

TEST_CASE("decoherence keys switch a run to the open system", "[scenario]") {
  json cfg = toy_config();
  cfg["decoherence"] = {{"gamma_khz_over_2pi", 100.0}};
  cfg["grid"]["dt_ns"] = 2.0;
  Scenario sc = scenario_from_json(cfg);
  REQUIRE(sc.decoherence.enabled());
  REQUIRE(sc.decoherence.gamma.has_value());
  CHECK(*sc.decoherence.gamma == angular_from_khz(100.0));
  CHECK_FALSE(sc.decoherence.kappa.has_value());

  RunOptions options;
  options.write_files = false;
  const ScenarioRun run = run_scenario(sc, options);
  CHECK(run.open_system);
  CHECK(run.summary_json.at("open_system").get<bool>());
  CHECK(run.summary_json.at("fidelity_floor").is_null());
  CHECK(run.summary_json.at("floor_satisfied").is_null());
  CHECK(run.summary.final_fidelity < 0.999);
  CHECK(run.summary.max_drift < 1e-9);

  const auto channels = sc.decoherence.build(1);
  REQUIRE(channels.size() == 5);
  CHECK(channels[0].rate == 0.0);
  CHECK(channels[1].rate == angular_from_khz(100.0));
}

TEST_CASE("extra collapse channels parse with explicit kinds", "[scenario]") {
  json cfg = toy_config();
  cfg["decoherence"] = {
      {"channels", json::array({json{{"kind", "dephase-1"},
                                     {"qubit", 0},
                                     {"rate_khz_over_2pi", 50.0}}})}};
  const Scenario sc = scenario_from_json(cfg);
  REQUIRE(sc.decoherence.extra.size() == 1);
  CHECK(sc.decoherence.extra[0].kind == ChannelKind::DephaseOne);
  CHECK(sc.decoherence.extra[0].rate == angular_from_khz(50.0));

  json bad = cfg;
  bad["decoherence"]["channels"][0]["kind"] = "sideways";
  CHECK(any_contains(validate_scenario_json(bad), "not a known channel kind"));
}

TEST_CASE("optimization runs are reproducible and never regress the seed",
          "[scenario]") {
  json cfg = toy_config();
  cfg["name"] = "toy-opt";
  cfg["schedule"]["qubits"][0][0]["amp_rad_per_us"] = 20.0;
  cfg["optimize"] = {
      {"objective", "final-fidelity"}, {"vary", json::array({"amplitudes"})},
      {"n_starts", 2},                 {"seed", 5},
      {"max_evals", 60},               {"coarse_dt_ns", 2.0},
  };
  const Scenario sc = scenario_from_json(cfg);
  REQUIRE(sc.optimize.present);
  CHECK(sc.optimize.mode == Objective::Mode::FinalFidelity);
  CHECK(sc.optimize.vary_amplitudes);
  CHECK_FALSE(sc.optimize.vary_delays);

  RunOptions options;
  options.write_files = false;
  const OptimizeRun first = run_optimize(sc, options);
  const OptimizeRun second = run_optimize(sc, options);

  CHECK(first.result.best_value == second.result.best_value);
  CHECK(first.result.n_evals == second.result.n_evals);
  CHECK(first.best_schedule.terms[0][0].amplitude ==
        second.best_schedule.terms[0][0].amplitude);
  CHECK(std::abs(first.verification.summary.final_fidelity -
                 second.verification.summary.final_fidelity) <= 1e-9);

  CHECK(first.result.best_value <= first.seed_value);
  CHECK(first.report.at("improved_over_seed").get<bool>());
  CHECK(first.report.at("schema_version").get<int>() == 1);
  CHECK(first.verification.summary.final_fidelity > 0.99);

  Scenario plain = scenario_from_json(toy_config());
  CHECK_THROWS_AS(run_optimize(plain, options), ValidationError);
}

TEST_CASE("optimization emits a re-runnable best config", "[scenario]") {
  json cfg = toy_config();
  cfg["name"] = "toy-opt-files";
  cfg["schedule"]["qubits"][0][0]["amp_rad_per_us"] = 20.0;
  cfg["optimize"] = {
      {"objective", "final-fidelity"}, {"vary", json::array({"amplitudes"})},
      {"n_starts", 1},                 {"seed", 3},
      {"max_evals", 40},               {"coarse_dt_ns", 2.0},
  };
  const Scenario sc = scenario_from_json(cfg);

  const auto dir = fresh_dir("passage-opt-outputs");
  RunOptions options;
  options.out_dir = dir;
  const OptimizeRun run = run_optimize(sc, options);

  REQUIRE(std::filesystem::exists(run.config_path));
  REQUIRE(std::filesystem::exists(run.history_path));
  REQUIRE(std::filesystem::exists(run.report_path));

  const Scenario best = load_scenario_file(run.config_path);
  CHECK(best.schedule.terms[0][0].amplitude ==
        run.best_schedule.terms[0][0].amplitude);
  const ScenarioRun rerun = run_scenario(best, RunOptions{.write_files = false});
  CHECK(std::abs(rerun.summary.final_fidelity -
                 run.verification.summary.final_fidelity) <= 1e-9);

  std::ifstream csv(run.history_path);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "eval_index,value,p0");
  int rows = 0;
  std::string line;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == run.result.n_evals);
}
