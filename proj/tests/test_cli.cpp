#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#ifndef RTISTAB_CLI_PATH
#error "RTISTAB_CLI_PATH must point at the rti-stab binary"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "rtistab_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  const fs::path out = work_dir() / "cli_output.txt";
  const std::string cmd = std::string(RTISTAB_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  result.output = ss.str();
  return result;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path p = work_dir() / name;
  std::ofstream(p) << content;
  return p;
}

const char* kStabilizablePlant = R"({
  "label": "biproper with one RHP zero",
  "numerator": [1, -1, -6],
  "denominator": [1, -9, 20]
})";

const char* kViolatingPlant = R"({
  "numerator": [1, -5, 4],
  "denominator": [1, 1, -6]
})";

}  // namespace

TEST_CASE("check verdicts and exit codes") {
  const fs::path good = write_file("good.json", kStabilizablePlant);
  const RunResult ok = run_cli("check " + good.string());
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("PIP satisfied") != std::string::npos);

  const fs::path bad = write_file("bad.json", kViolatingPlant);
  const RunResult violated = run_cli("check " + bad.string());
  CHECK(violated.exit_code == 2);
  CHECK(violated.output.find("PIP violated") != std::string::npos);

  const fs::path empty = write_file("empty.json", "");
  CHECK(run_cli("check " + empty.string()).exit_code == 1);
}

TEST_CASE("design, reports and determinism") {
  const fs::path plant = write_file("design_plant.json", kStabilizablePlant);
  const fs::path report1 = work_dir() / "report1.json";
  const fs::path report2 = work_dir() / "report2.json";

  const RunResult r1 =
      run_cli("design " + plant.string() + " --seed 5 -o " + report1.string());
  CHECK(r1.exit_code == 0);
  REQUIRE(fs::exists(report1));

  json j;
  std::ifstream(report1) >> j;
  CHECK(j.at("verification").at("passed").get<bool>());
  CHECK(j.at("rng_seed").get<std::uint64_t>() == 5);

  // byte-identical on a repeated run with the same seed
  const RunResult r2 =
      run_cli("design " + plant.string() + " --seed 5 -o " + report2.string());
  CHECK(r2.exit_code == 0);
  std::stringstream s1, s2;
  s1 << std::ifstream(report1).rdbuf();
  s2 << std::ifstream(report2).rdbuf();
  CHECK(s1.str() == s2.str());

  // PIP violation without --force
  const fs::path bad = write_file("bad2.json", kViolatingPlant);
  CHECK(run_cli("design " + bad.string() + " -o " + (work_dir() / "r.json").string())
            .exit_code == 2);

  // unsupported relative degree
  const fs::path deep = write_file(
      "deep.json", R"({"numerator": [1], "denominator": [1, 3, 3, 1]})");
  const RunResult rdeep =
      run_cli("design " + deep.string() + " -o " + (work_dir() / "d.json").string());
  CHECK(rdeep.exit_code == 1);
  CHECK(rdeep.output.find("unsupported relative degree") != std::string::npos);
}

TEST_CASE("simulate a verified report") {
  const fs::path plant = write_file("sim_plant.json", kStabilizablePlant);
  const fs::path report = work_dir() / "sim_report.json";
  REQUIRE(run_cli("design " + plant.string() + " --seed 5 -o " + report.string())
              .exit_code == 0);

  const fs::path csv = work_dir() / "step.csv";
  const RunResult r = run_cli("simulate " + report.string() + " -o " + csv.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("settled") != std::string::npos);

  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,y");
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("0,", 0) == 0);

  // a report with passed = false is refused
  json j;
  std::ifstream(report) >> j;
  j["verification"]["passed"] = false;
  const fs::path unverified = work_dir() / "unverified.json";
  std::ofstream(unverified) << j.dump();
  CHECK(run_cli("simulate " + unverified.string() + " -o " + csv.string())
            .exit_code == 2);

  // coarse dt trips the guard
  CHECK(run_cli("simulate " + report.string() + " --dt 10 -o " + csv.string())
            .exit_code == 1);

  // reference-tracking map
  const fs::path csv2 = work_dir() / "step_tracking.csv";
  CHECK(run_cli("simulate " + report.string() + " --map tracking -o " +
                csv2.string())
            .exit_code == 0);
  CHECK(fs::exists(csv2));
}

TEST_CASE("tuning failure exits 3 and embeds the best trace") {
  // A q = 3, relative-degree-2 plant on which a single restart stalls with
  // very large exponents (Newton cannot reach the 1e-10 trig tolerance).
  const fs::path plant = write_file("hard_plant.json", R"({
    "numerator": [2.5892637346431138, -20.308457720001336,
                  27.781707934259252, -73.650409343729109],
    "denominator": [1, -9.5148672203072184, -73.563464875660998,
                    419.62775874831203, 2356.2288209601784, 1141.6033559517018]
  })");
  const fs::path report = work_dir() / "fail_report.json";
  const RunResult r = run_cli("design " + plant.string() +
                              " --seed 102 --max-restarts 1 -o " + report.string());
  CHECK(r.exit_code == 3);
  REQUIRE(fs::exists(report));
  json j;
  std::ifstream(report) >> j;
  CHECK(j.contains("error"));
  CHECK(j.contains("tune_trace"));
  CHECK(j.contains("best_m"));
}

TEST_CASE("RTI_STAB_SEED is the seed fallback") {
  const fs::path plant = write_file("env_plant.json", kStabilizablePlant);
  const fs::path r_env = work_dir() / "env_report.json";
  const fs::path r_flag = work_dir() / "flag_report.json";
  const std::string prefixed = "RTI_STAB_SEED=5 " + std::string(RTISTAB_CLI_PATH) +
                               " design " + plant.string() + " -o " + r_env.string() +
                               " > /dev/null 2>&1";
  REQUIRE(std::system(prefixed.c_str()) == 0);
  REQUIRE(run_cli("design " + plant.string() + " --seed 5 -o " + r_flag.string())
              .exit_code == 0);
  std::stringstream s1, s2;
  s1 << std::ifstream(r_env).rdbuf();
  s2 << std::ifstream(r_flag).rdbuf();
  CHECK(s1.str() == s2.str());
}

TEST_CASE("design plus simulate on a slow-settling closed loop") {
  // The searched design for this plant settles well past the default
  // 10/|sigma| horizon; simulate must extend it rather than fail.
  const fs::path plant = write_file("slow_plant.json", R"({
    "zeros": [{"re": 1.0, "im": 2.0}, {"re": 1.0, "im": -2.0}],
    "poles": [{"re": 2.5, "im": 0.0}, {"re": -1.0, "im": 2.0},
              {"re": -1.0, "im": -2.0}],
    "gain": 1.0
  })");
  const fs::path report = work_dir() / "slow_report.json";
  REQUIRE(run_cli("design " + plant.string() + " --seed 11 -o " + report.string())
              .exit_code == 0);
  const fs::path csv = work_dir() / "slow_step.csv";
  const RunResult r = run_cli("simulate " + report.string() + " -o " + csv.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("settled: yes") != std::string::npos);
}

TEST_CASE("paper suite subcommand") {
  const RunResult r = run_cli("paper-suite --examples 5 --fixed-only");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("ex5/integer-exponents") != std::string::npos);
  CHECK(r.output.find("FAIL") == std::string::npos);

  const fs::path dir = work_dir() / "suite_out";
  const RunResult r2 = run_cli("paper-suite --examples 7..8 --seed 3 -o " +
                               dir.string());
  CHECK(r2.exit_code == 0);
  CHECK(fs::exists(dir / "summary.json"));
}
