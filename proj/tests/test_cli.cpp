#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace {

struct Outcome {
  int exit_code = -1;
  std::string output;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(RISEE_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Outcome out;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) out.output += buf;
  const int status = pclose(pipe);
  out.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

}  // namespace

TEST_CASE("sweep-defaults emits the default deployment") {
  const Outcome o = run("sweep-defaults");
  REQUIRE(o.exit_code == 0);
  const auto j = nlohmann::json::parse(o.output);
  const auto& s = j.at("scenario");
  CHECK(s.at("K") == 4);
  CHECK(s.at("N_R") == 4);
  CHECK(s.at("N") == 100);
  CHECK(s.at("bandwidth_hz") == 20e6);
  CHECK(s.at("pathloss_exponent") == 4.0);
  CHECK(s.at("rice_K_tx") == 4.0);
  CHECK(s.at("rice_K_rx") == 2.0);
}

TEST_CASE("run reports a missing config") {
  const Outcome o = run("run missing.json");
  CHECK(o.exit_code == 1);
  CHECK(o.output.find("missing.json") != std::string::npos);
}

TEST_CASE("check passes") {
  const Outcome o = run("check --drops 4");
  CHECK(o.exit_code == 0);
  CHECK(o.output.find("kernels") != std::string::npos);
  CHECK(o.output.find("FAIL") == std::string::npos);
}

TEST_CASE("small run writes a CSV") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto config = dir / "risee_cli_config.json";
  const auto csv = dir / "risee_cli_results.csv";
  {
    std::ofstream out(config);
    out << R"({"scenario": {"K": 2, "N": 8, "N_R": 2},
              "methods": [{"method": "approach1"}, {"method": "baseline"}],
              "sweep": {"variable": "Pmax_dbm", "values": [20]},
              "drops": 2})";
  }
  const Outcome o = run("run " + config.string() + " --out " + csv.string() + " --threads 2");
  CHECK(o.exit_code == 0);
  std::ifstream in(csv);
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 1 + 2 * 2);
  std::filesystem::remove(config);
  std::filesystem::remove(csv);
}

TEST_CASE("unknown subcommand is an error") {
  CHECK(run("frobnicate").exit_code != 0);
}
