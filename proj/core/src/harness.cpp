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

#include "risee/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace risee {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

nlohmann::json options_to_json(const SolverOptions& o) {
  return {{"outer_tol", o.outer_tol},
          {"outer_max_iter", o.outer_max_iter},
          {"inner_tol", o.inner_tol},
          {"inner_max_iter", o.inner_max_iter},
          {"dinkelbach_tol", o.dinkelbach_tol},
          {"dinkelbach_max_iter", o.dinkelbach_max_iter},
          {"randomization_count", o.randomization_count},
          {"armijo_c", o.armijo_c},
          {"armijo_shrink", o.armijo_shrink},
          {"seed", o.seed}};
}

void options_from_json(const nlohmann::json& j, SolverOptions& o) {
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("outer_tol", o.outer_tol);
  get("outer_max_iter", o.outer_max_iter);
  get("inner_tol", o.inner_tol);
  get("inner_max_iter", o.inner_max_iter);
  get("dinkelbach_tol", o.dinkelbach_tol);
  get("dinkelbach_max_iter", o.dinkelbach_max_iter);
  get("randomization_count", o.randomization_count);
  get("armijo_c", o.armijo_c);
  get("armijo_shrink", o.armijo_shrink);
  get("seed", o.seed);
}

nlohmann::json complex_vector_json(const CVec& v) {
  std::vector<double> re(static_cast<std::size_t>(v.size())), im(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re[static_cast<std::size_t>(i)] = v(i).real();
    im[static_cast<std::size_t>(i)] = v(i).imag();
  }
  return {{"re", re}, {"im", im}};
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  scenario.validate();
  require(drops >= 1, "drops must be at least 1");
  require(!methods.empty(), "method list must not be empty");
  require(!sweep.values.empty(), "sweep needs at least one value");
  for (double v : sweep.values) require(std::isfinite(v), "sweep values must be finite");
  require(threads >= 1, "threads must be at least 1");
  for (const auto& m : methods) m.options.validate();
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : c.methods)
    methods.push_back({{"method", to_string(m.method)},
                       {"objective", to_string(m.objective)},
                       {"constraint", to_string(m.reflection_constraint)}});
  j = nlohmann::json{{"scenario", c.scenario},
                     {"methods", methods},
                     {"solver", options_to_json(c.methods.empty() ? SolverOptions{} : c.methods.front().options)},
                     {"sweep", {{"variable", c.sweep.variable}, {"values", c.sweep.values}}},
                     {"drops", c.drops},
                     {"base_seed", c.base_seed},
                     {"output_path", c.output_path},
                     {"threads", c.threads}};
  if (!c.allocations_path.empty()) j["allocations_path"] = c.allocations_path;
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  if (j.contains("scenario")) j.at("scenario").get_to(c.scenario);
  SolverOptions shared;
  if (j.contains("solver")) options_from_json(j.at("solver"), shared);
  c.methods.clear();
  for (const auto& m : j.at("methods")) {
    MethodConfig mc;
    mc.method = parse_method(m.at("method").get<std::string>());
    mc.objective = parse_objective(m.value("objective", std::string("gee")));
    mc.reflection_constraint = parse_constraint(m.value("constraint", std::string("global")));
    mc.options = shared;
    if (m.contains("solver")) options_from_json(m.at("solver"), mc.options);
    c.methods.push_back(mc);
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    c.sweep.variable = s.value("variable", std::string("Pmax_dbm"));
    s.at("values").get_to(c.sweep.values);
  } else {
    c.sweep.variable = "Pmax_dbm";
    c.sweep.values = {c.scenario.Pmax_dbm.front()};
  }
  c.drops = j.value("drops", c.drops);
  c.base_seed = j.value("base_seed", c.base_seed);
  c.output_path = j.value("output_path", c.output_path);
  c.allocations_path = j.value("allocations_path", c.allocations_path);
  c.threads = j.value("threads", c.threads);
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open configuration file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("malformed configuration " + path + ": " + e.what());
  }
  ExperimentConfig c;
  try {
    c = j.get<ExperimentConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("invalid configuration " + path + ": " + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig default_experiment() {
  ExperimentConfig c;
  for (Method m : {Method::Approach1, Method::Approach2})
    for (Objective o : {Objective::Gee, Objective::SumRate}) c.methods.push_back(MethodConfig{m, o});
  c.methods.push_back(MethodConfig{Method::BaselineUniformRandom, Objective::Gee});
  c.sweep = Sweep{"Pmax_dbm", {0.0, 10.0, 20.0, 30.0, 40.0}};
  c.drops = 100;
  c.base_seed = 1;
  c.output_path = "results.csv";
  return c;
}

SystemScenario apply_sweep_value(const SystemScenario& base, const std::string& variable, double value) {
  nlohmann::json j = base;
  if (variable == "rice_K") {
    j["rice_K_tx"] = value;
    j["rice_K_rx"] = value;
  } else if (variable == "K" || variable == "N" || variable == "N_R") {
    require(value >= 1 && std::floor(value) == value, "sweep over " + variable + " needs positive integers");
    j[variable] = static_cast<int>(value);
    if (variable == "K") {
      j["mu"] = base.mu.front();
      j["Pmax_dbm"] = base.Pmax_dbm.front();
    }
  } else if (j.contains(variable) && (j[variable].is_number() || variable == "mu" || variable == "Pmax_dbm")) {
    j[variable] = value;
  } else {
    throw InvalidInput("unknown or non-numeric sweep variable: " + variable);
  }
  SystemScenario s = j.get<SystemScenario>();
  s.validate();
  return s;
}

std::uint64_t drop_seed(std::uint64_t base_seed, std::uint64_t drop_index) {
  std::uint64_t z = base_seed ^ (0x9e3779b97f4a7c15ULL * (drop_index + 1));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<ResultRecord> run_experiment(const ExperimentConfig& config, bool keep_allocations) {
  config.validate();
  std::vector<SystemScenario> scenarios;
  for (double v : config.sweep.values) scenarios.push_back(apply_sweep_value(config.scenario, config.sweep.variable, v));

  const std::size_t n_methods = config.methods.size();
  const std::size_t n_tasks = scenarios.size() * static_cast<std::size_t>(config.drops);
  std::vector<ResultRecord> records(n_tasks * n_methods);
  const bool keep = keep_allocations || !config.allocations_path.empty();

  auto run_task = [&](std::size_t task) {
    const std::size_t sweep_idx = task / static_cast<std::size_t>(config.drops);
    const int drop = static_cast<int>(task % static_cast<std::size_t>(config.drops));
    const SystemScenario& scenario = scenarios[sweep_idx];
    const std::uint64_t seed = drop_seed(config.base_seed, static_cast<std::uint64_t>(drop));
    const ChannelSet ch = generate_drop(scenario, seed);
    const LinkBudget budget = link_budget(scenario);
    for (std::size_t m = 0; m < n_methods; ++m) {
      const MethodConfig& mc = config.methods[m];
      const auto t0 = std::chrono::steady_clock::now();
      RunResult result = run_method(ch, budget, mc, seed);
      const auto t1 = std::chrono::steady_clock::now();

      ResultRecord& r = records[task * n_methods + m];
      r.drop_index = drop;
      r.seed = seed;
      r.method = to_string(mc.method);
      r.objective = to_string(mc.objective);
      r.constraint = to_string(mc.reflection_constraint);
      r.sweep_var = config.sweep.variable;
      r.sweep_value = config.sweep.values[sweep_idx];
      r.gee_bits_per_joule = result.allocation.gee_bits_per_joule;
      r.sum_rate_bps = result.allocation.sum_rate_bps();
      r.rates_bps.assign(result.allocation.rates_bps.data(),
                         result.allocation.rates_bps.data() + result.allocation.rates_bps.size());
      r.iterations_used = result.trace.iterations_used;
      r.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
      if (keep) r.allocation = std::move(result.allocation);
    }
  };

  const int workers = std::min<int>(config.threads, static_cast<int>(n_tasks));
  if (workers <= 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = next++; t < n_tasks; t = next++) run_task(t);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  if (!config.output_path.empty()) {
    std::ofstream out(config.output_path);
    if (!out) throw std::runtime_error("cannot write " + config.output_path);
    write_csv(out, records);
  }
  if (!config.allocations_path.empty()) {
    std::ofstream out(config.allocations_path);
    if (!out) throw std::runtime_error("cannot write " + config.allocations_path);
    write_allocations(out, records);
  }
  return records;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
  std::size_t K = 0;
  for (const auto& r : records) K = std::max(K, r.rates_bps.size());
  out << "drop,seed,method,objective,constraint,sweep_var,sweep_value,gee,sum_rate";
  for (std::size_t k = 1; k <= K; ++k) out << ",rate_" << k;
  out << ",iters,wall_time_s\n";
  for (const auto& r : records) {
    out << r.drop_index << ',' << r.seed << ',' << r.method << ',' << r.objective << ',' << r.constraint << ','
        << r.sweep_var << ',' << format_double(r.sweep_value) << ',' << format_double(r.gee_bits_per_joule) << ','
        << format_double(r.sum_rate_bps);
    for (std::size_t k = 0; k < K; ++k) {
      out << ',';
      if (k < r.rates_bps.size()) out << format_double(r.rates_bps[k]);
    }
    out << ',' << r.iterations_used << ',' << format_double(r.wall_time_s) << '\n';
  }
}

std::vector<ResultRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("read_csv: empty input");
  const auto header = split(line, ',');
  require(header.size() >= 11 && header[0] == "drop" && header[header.size() - 1] == "wall_time_s",
          "read_csv: unexpected header");
  const std::size_t K = header.size() - 11;
  std::vector<ResultRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    require(f.size() == header.size(), "read_csv: wrong field count");
    ResultRecord r;
    r.drop_index = std::stoi(f[0]);
    r.seed = std::stoull(f[1]);
    r.method = f[2];
    r.objective = f[3];
    r.constraint = f[4];
    r.sweep_var = f[5];
    r.sweep_value = std::stod(f[6]);
    r.gee_bits_per_joule = std::stod(f[7]);
    r.sum_rate_bps = std::stod(f[8]);
    for (std::size_t k = 0; k < K; ++k)
      if (!f[9 + k].empty()) r.rates_bps.push_back(std::stod(f[9 + k]));
    r.iterations_used = std::stoi(f[9 + K]);
    r.wall_time_s = std::stod(f[10 + K]);
    records.push_back(std::move(r));
  }
  return records;
}

void write_allocations(std::ostream& out, const std::vector<ResultRecord>& records) {
  for (const auto& r : records) {
    if (!r.allocation) continue;
    const Allocation& a = *r.allocation;
    nlohmann::json filters = nlohmann::json::array();
    for (const CVec& c : a.C) filters.push_back(complex_vector_json(c));
    nlohmann::json j{{"drop", r.drop_index},
                     {"seed", r.seed},
                     {"method", r.method},
                     {"objective", r.objective},
                     {"constraint", r.constraint},
                     {"sweep_value", r.sweep_value},
                     {"gamma", complex_vector_json(a.gamma)},
                     {"p", std::vector<double>(a.p.data(), a.p.data() + a.p.size())},
                     {"C", filters},
                     {"gee", a.gee_bits_per_joule}};
    out << j.dump() << '\n';
  }
}

std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records,
                                  const std::vector<std::string>& group_keys) {
  require(!records.empty(), "summarize: no records");
  auto key_of = [&group_keys](const ResultRecord& r) {
    std::vector<std::string> key;
    for (const auto& g : group_keys) {
      if (g == "method")
        key.push_back(r.method);
      else if (g == "objective")
        key.push_back(r.objective);
      else if (g == "constraint")
        key.push_back(r.constraint);
      else if (g == "sweep_var")
        key.push_back(r.sweep_var);
      else if (g == "sweep_value")
        key.push_back(format_double(r.sweep_value));
      else if (g == "drop")
        key.push_back(std::to_string(r.drop_index));
      else
        throw InvalidInput("summarize: unknown group key " + g);
    }
    return key;
  };

  std::vector<SummaryRow> rows;
  std::map<std::vector<std::string>, std::size_t> index;
  std::vector<std::vector<const ResultRecord*>> members;
  for (const auto& r : records) {
    auto key = key_of(r);
    auto [it, inserted] = index.try_emplace(key, rows.size());
    if (inserted) {
      rows.push_back(SummaryRow{std::move(key)});
      members.emplace_back();
    }
    members[it->second].push_back(&r);
  }
  for (std::size_t g = 0; g < rows.size(); ++g) {
    const auto& m = members[g];
    const double n = static_cast<double>(m.size());
    double gee = 0.0, rate = 0.0;
    for (const auto* r : m) {
      gee += r->gee_bits_per_joule;
      rate += r->sum_rate_bps;
    }
    gee /= n;
    rate /= n;
    double gee_var = 0.0, rate_var = 0.0;
    for (const auto* r : m) {
      gee_var += (r->gee_bits_per_joule - gee) * (r->gee_bits_per_joule - gee);
      rate_var += (r->sum_rate_bps - rate) * (r->sum_rate_bps - rate);
    }
    rows[g].count = static_cast<int>(m.size());
    rows[g].gee_mean = gee;
    rows[g].gee_sd = std::sqrt(gee_var / n);
    rows[g].sum_rate_mean = rate;
    rows[g].sum_rate_sd = std::sqrt(rate_var / n);
  }
  return rows;
}

void write_summary(std::ostream& out, const std::vector<std::string>& group_keys, const std::vector<SummaryRow>& rows) {
  for (const auto& g : group_keys) out << g << ',';
  out << "count,gee_mean,gee_sd,sum_rate_mean,sum_rate_sd\n";
  for (const auto& r : rows) {
    for (const auto& k : r.key) out << k << ',';
    out << r.count << ',' << format_double(r.gee_mean) << ',' << format_double(r.gee_sd) << ','
        << format_double(r.sum_rate_mean) << ',' << format_double(r.sum_rate_sd) << '\n';
  }
}

}  // namespace risee
