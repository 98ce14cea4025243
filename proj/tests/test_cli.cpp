// Copyright 2026 The Passage Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kScenarioDir = PASSAGE_SCENARIO_DIR;

struct CliResult {
  int code = -1;
  std::string output;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "passage-cli-tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  const fs::path capture = work_dir() / "cli_output.txt";
  const std::string cmd = std::string("\"") + PASSAGE_CLI_PATH + "\" " + args +
                          " > \"" + capture.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult result;
  if (WIFEXITED(status)) result.code = WEXITSTATUS(status);
  std::ifstream in(capture);
  std::stringstream ss;
  ss << in.rdbuf();
  result.output = ss.str();
  return result;
}

fs::path write_json(const std::string& name, const json& j) {
  const fs::path path = work_dir() / name;
  std::ofstream(path) << j.dump(2) << '\n';
  return path;
}

json toy_config() {
  return json{
      {"schema_version", 1},
      {"name", "cli-toy"},
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

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) fields.push_back(field);
  return fields;
}

int decimals(const std::string& field) {
  const auto dot = field.find('.');
  if (dot == std::string::npos) return -1;
  return static_cast<int>(field.size() - dot - 1);
}

}  // namespace

TEST_CASE("validate accepts the shipped configs", "[cli]") {
  const CliResult scenario =
      run_cli("validate \"" + (kScenarioDir / "qst-fig2.json").string() + "\"");
  CHECK(scenario.code == 0);
  CHECK(scenario.output.find("valid") != std::string::npos);

  const CliResult sweep =
      run_cli("validate \"" + (kScenarioDir / "sweep-fig5-qst.json").string() + "\"");
  CHECK(sweep.code == 0);
}

TEST_CASE("validate rejects malformed configs with exit code 2", "[cli]") {
  json bad = toy_config();
  bad["grid"]["t_end_us"] = -1.0;
  bad.erase("schema_version");
  const fs::path bad_path = write_json("bad.json", bad);
  const CliResult result = run_cli("validate \"" + bad_path.string() + "\"");
  CHECK(result.code == 2);
  CHECK(result.output.find("error:") != std::string::npos);

  const fs::path garbled = work_dir() / "garbled.json";
  std::ofstream(garbled) << "{ nope";
  const CliResult parse = run_cli("validate \"" + garbled.string() + "\"");
  CHECK(parse.code == 2);
  CHECK(parse.output.find("not valid JSON") != std::string::npos);
}

TEST_CASE("simulate writes the trajectory and summary pair", "[cli]") {
  const fs::path config = write_json("cli-toy.json", toy_config());
  const fs::path out = work_dir() / "sim-out";
  const CliResult result =
      run_cli("simulate \"" + config.string() + "\" --out-dir \"" + out.string() + "\"");
  REQUIRE(result.code == 0);
  CHECK(result.output.find("final_fidelity=") != std::string::npos);

  const fs::path csv_path = out / "cli-toy_trajectory.csv";
  const fs::path json_path = out / "cli-toy_summary.json";
  REQUIRE(fs::exists(csv_path));
  REQUIRE(fs::exists(json_path));

  std::ifstream csv(csv_path);
  std::string header, row;
  std::getline(csv, header);
  CHECK(header ==
        "t_us,pop:c:0|q:1,pop:c:0|q:e,pop:c:0|q:0,fidelity,norm_or_trace,"
        "ne_expectation");
  std::getline(csv, row);
  const auto fields = split(row, ',');
  REQUIRE(fields.size() == 7);
  CHECK(decimals(fields[0]) == 6);
  CHECK(decimals(fields[1]) == 10);
  CHECK(decimals(fields[4]) == 10);
  CHECK(fields[0] == "0.000000");
  CHECK(fields[1] == "1.0000000000");

  int rows = 1;
  while (std::getline(csv, row))
    if (!row.empty()) ++rows;
  CHECK(rows == 501);

  std::ifstream js(json_path);
  json summary;
  js >> summary;
  CHECK(summary.at("schema_version").get<int>() == 1);
  CHECK(summary.at("scenario").get<std::string>() == "cli-toy");
  CHECK(summary.at("open_system").get<bool>() == false);
}

TEST_CASE("a missed fidelity floor exits with code 2", "[cli]") {
  json cfg = toy_config();
  cfg["name"] = "cli-floor-miss";
  cfg["fidelity_floor"] = 0.999;
  const fs::path config = write_json("cli-floor-miss.json", cfg);
  const fs::path out = work_dir() / "floor-out";
  const CliResult result =
      run_cli("simulate \"" + config.string() + "\" --out-dir \"" + out.string() + "\"");
  CHECK(result.code == 2);
  CHECK(result.output.find("not met") != std::string::npos);
  CHECK(fs::exists(out / "cli-floor-miss_summary.json"));
}

TEST_CASE("an unstable step override exits with code 3", "[cli]") {
  const fs::path config = write_json("cli-unstable.json", toy_config());
  const fs::path out = work_dir() / "unstable-out";
  const CliResult result = run_cli("simulate \"" + config.string() +
                                   "\" --dt-ns 500000 --out-dir \"" + out.string() + "\"");
  CHECK(result.code == 3);
  CHECK(result.output.find("numerical failure") != std::string::npos);
}

TEST_CASE("sweep emits the fidelity matrix pair", "[cli]") {
  json sweep{{"schema_version", 1},
             {"name", "cli-sweep"},
             {"base", toy_config()},
             {"kappa_khz_over_2pi", {{"min", 0.0}, {"max", 50.0}, {"points", 2}}},
             {"gamma_khz_over_2pi", {{"min", 0.0}, {"max", 50.0}, {"points", 2}}}};
  sweep["base"]["grid"]["dt_ns"] = 2.0;
  const fs::path config = write_json("cli-sweep.json", sweep);
  const fs::path out = work_dir() / "sweep-out";
  const CliResult result = run_cli("sweep \"" + config.string() + "\" --threads 2 " +
                                   "--out-dir \"" + out.string() + "\"");
  REQUIRE(result.code == 0);
  CHECK(result.output.find("2 x 2 cells") != std::string::npos);

  const fs::path csv_path = out / "cli-sweep_sweep.csv";
  const fs::path json_path = out / "cli-sweep_sweep.json";
  REQUIRE(fs::exists(csv_path));
  REQUIRE(fs::exists(json_path));

  std::ifstream csv(csv_path);
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("kappa_khz_over_2pi,gamma_khz_over_2pi=0.000000,", 0) == 0);

  std::ifstream js(json_path);
  json report;
  js >> report;
  CHECK(report.at("fidelity").size() == 2);
  CHECK(report.at("failures").empty());
  CHECK(report.at("outputs").at("sweep_csv").get<std::string>() == csv_path.string());
}

TEST_CASE("optimize emits config, history, and report", "[cli]") {
  json cfg = toy_config();
  cfg["name"] = "cli-opt";
  cfg["schedule"]["qubits"][0][0]["amp_rad_per_us"] = 20.0;
  cfg["optimize"] = {
      {"objective", "final-fidelity"}, {"vary", json::array({"amplitudes"})},
      {"n_starts", 1},                 {"seed", 3},
      {"max_evals", 40},               {"coarse_dt_ns", 2.0},
  };
  const fs::path config = write_json("cli-opt.json", cfg);
  const fs::path out = work_dir() / "opt-out";
  const CliResult result = run_cli("optimize \"" + config.string() + "\" --seed 9 " +
                                   "--out-dir \"" + out.string() + "\"");
  REQUIRE(result.code == 0);
  CHECK(result.output.find("verification:") != std::string::npos);

  REQUIRE(fs::exists(out / "cli-opt_best.json"));
  REQUIRE(fs::exists(out / "cli-opt_history.csv"));
  REQUIRE(fs::exists(out / "cli-opt_optimize.json"));

  std::ifstream hist(out / "cli-opt_history.csv");
  std::string header;
  std::getline(hist, header);
  CHECK(header == "eval_index,value,p0");

  std::ifstream js(out / "cli-opt_optimize.json");
  json report;
  js >> report;
  CHECK(report.at("best_value").get<double>() <= report.at("seed_value").get<double>());
  CHECK(report.at("improved_over_seed").get<bool>());
}

TEST_CASE("bad invocations exit nonzero", "[cli]") {
  CHECK(run_cli("").code != 0);
  CHECK(run_cli("simulate /no/such/file.json").code != 0);
  CHECK(run_cli("frobnicate x.json").code != 0);
}
