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

#ifndef RISEE_HARNESS_HPP
#define RISEE_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "risee/algorithms.hpp"
#include "risee/scenario.hpp"

namespace risee {

struct Sweep {
  // A numeric scenario field ("Pmax_dbm", "N", "P_R", ...) or "rice_K",
  // which sets rice_K_tx and rice_K_rx together.
  std::string variable = "Pmax_dbm";
  std::vector<double> values;
};

struct ExperimentConfig {
  SystemScenario scenario;
  std::vector<MethodConfig> methods;
  Sweep sweep;
  int drops = 100;
  std::uint64_t base_seed = 1;
  std::string output_path;       // CSV; empty for none
  std::string allocations_path;  // JSON lines with (gamma, p, C); empty for none
  int threads = 1;

  // Throws InvalidInput on the first violated invariant.
  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig load_experiment(const std::string& path);

// Experiment with the default deployment: both approaches in both objective
// modes plus the baseline, swept over Pmax.
ExperimentConfig default_experiment();

// Scenario with `variable` set to `value`.
SystemScenario apply_sweep_value(const SystemScenario& base, const std::string& variable, double value);

// Seed of drop `drop_index`, shared by every method and sweep value.
std::uint64_t drop_seed(std::uint64_t base_seed, std::uint64_t drop_index);

struct ResultRecord {
  int drop_index = 0;
  std::uint64_t seed = 0;
  std::string method;
  std::string objective;
  std::string constraint;
  std::string sweep_var;
  double sweep_value = 0.0;
  double gee_bits_per_joule = 0.0;
  double sum_rate_bps = 0.0;
  std::vector<double> rates_bps;
  int iterations_used = 0;
  double wall_time_s = 0.0;
  std::optional<Allocation> allocation;
};

// Runs every method on every (sweep value, drop). Records are ordered by
// sweep value, drop, then method, independent of config.threads. Writes
// the CSV (and allocations) when the paths are set.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& config, bool keep_allocations = false);

// Header `drop,seed,method,objective,constraint,sweep_var,sweep_value,gee,
// sum_rate,rate_1..rate_K,iters,wall_time_s`; floats with 12 significant
// digits.
void write_csv(std::ostream& out, const std::vector<ResultRecord>& records);
std::vector<ResultRecord> read_csv(std::istream& in);

// One JSON object per line with the record keys and its allocation.
void write_allocations(std::ostream& out, const std::vector<ResultRecord>& records);

std::string format_double(double v);

struct SummaryRow {
  std::vector<std::string> key;
  int count = 0;
  double gee_mean = 0.0;
  double gee_sd = 0.0;  // population standard deviation
  double sum_rate_mean = 0.0;
  double sum_rate_sd = 0.0;
};

// Groups by the named keys ("method", "objective", "constraint",
// "sweep_var", "sweep_value", "drop") in order of first appearance.
// Throws InvalidInput on empty input or an unknown key.
std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records, const std::vector<std::string>& group_keys);

void write_summary(std::ostream& out, const std::vector<std::string>& group_keys, const std::vector<SummaryRow>& rows);

}  // namespace risee

#endif  // RISEE_HARNESS_HPP
