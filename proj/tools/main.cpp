// SPDX-License-Identifier: Apache-2.0
//
// risee: energy-efficient resource allocation for RIS-aided multi-user uplinks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "risee/harness.hpp"
#include "risee/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCheck = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> drops;
  std::optional<std::string> out;
  std::optional<int> threads;
};

int run(const std::string& path, const Overrides& o, const std::string& summary_path) {
  risee::ExperimentConfig config;
  try {
    config = risee::load_experiment(path);
    if (o.seed) config.base_seed = *o.seed;
    if (o.drops) config.drops = *o.drops;
    if (o.out) config.output_path = *o.out;
    if (o.threads) config.threads = *o.threads;
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "risee: " << e.what() << '\n';
    return kExitConfig;
  }

  const auto records = risee::run_experiment(config);
  const std::vector<std::string> keys{"sweep_value", "method", "objective", "constraint"};
  const auto rows = risee::summarize(records, keys);
  if (summary_path.empty()) {
    risee::write_summary(std::cout, keys, rows);
  } else {
    std::ofstream out(summary_path);
    if (!out) {
      std::cerr << "risee: cannot write " << summary_path << '\n';
      return kExitConfig;
    }
    risee::write_summary(out, keys, rows);
  }
  if (!config.output_path.empty())
    std::cerr << "wrote " << records.size() << " records to " << config.output_path << '\n';
  return kExitOk;
}

int check(const risee::selftest::CheckOptions& options) {
  const auto suites = risee::selftest::run_all(options);
  bool all_ok = true;
  for (const auto& s : suites) {
    std::printf("%-22s %s %4d/%-4d  worst %.3g  %.2fs\n", s.name.c_str(), s.ok() ? "pass" : "FAIL", s.passed, s.total,
                s.worst, s.seconds);
    for (const auto& f : s.failures) std::printf("    %s\n", f.c_str());
    all_ok = all_ok && s.ok();
  }
  return all_ok ? kExitOk : kExitCheck;
}

int sweep_defaults(const std::string& out_path) {
  const nlohmann::json j = risee::default_experiment();
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "risee: cannot write " << out_path << '\n';
    return kExitConfig;
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient resource allocation for RIS-aided multi-user uplinks"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string config_path, summary_path;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a JSON configuration");
  run_cmd->add_option("config", config_path, "Configuration file")->required();
  run_cmd->add_option("--seed", overrides.seed, "Base seed");
  run_cmd->add_option("--drops", overrides.drops, "Number of channel drops");
  run_cmd->add_option("--out", overrides.out, "CSV output path");
  run_cmd->add_option("--threads", overrides.threads, "Worker threads");
  run_cmd->add_option("--summary", summary_path, "Write the summary table here instead of stdout");

  risee::selftest::CheckOptions check_options;
  auto* check_cmd = app.add_subcommand("check", "Run the invariant and oracle self-tests");
  check_cmd->add_option("--seed", check_options.seed, "Seed of the random instances");
  check_cmd->add_option("--drops", check_options.drops, "Drops per suite")->check(CLI::PositiveNumber);

  std::string defaults_out;
  auto* defaults_cmd = app.add_subcommand("sweep-defaults", "Print the default experiment configuration");
  defaults_cmd->add_option("--out", defaults_out, "Write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return run(config_path, overrides, summary_path);
    if (*check_cmd) return check(check_options);
    if (*defaults_cmd) return sweep_defaults(defaults_out);
  } catch (const std::exception& e) {
    std::cerr << "risee: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
