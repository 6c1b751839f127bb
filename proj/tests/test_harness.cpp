#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "risee/harness.hpp"
#include "risee/selftest.hpp"

using namespace risee;

namespace {

MethodConfig method(Method m, Objective o = Objective::Gee) {
  MethodConfig c;
  c.method = m;
  c.objective = o;
  return c;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.scenario = selftest::desk_scenario(8, 2, 2);
  c.methods = {method(Method::Approach2), method(Method::BaselineUniformRandom)};
  c.sweep = Sweep{"Pmax_dbm", {10.0, 20.0}};
  c.drops = 3;
  c.base_seed = 5;
  return c;
}

std::string csv_without_wall_time(const std::vector<ResultRecord>& records) {
  std::vector<ResultRecord> copy = records;
  for (auto& r : copy) r.wall_time_s = 0.0;
  std::ostringstream out;
  write_csv(out, copy);
  return out.str();
}

ResultRecord synthetic(const std::string& m, double value, double gee, double rate) {
  ResultRecord r;
  r.method = m;
  r.objective = "gee";
  r.constraint = "global";
  r.sweep_var = "Pmax_dbm";
  r.sweep_value = value;
  r.gee_bits_per_joule = gee;
  r.sum_rate_bps = rate;
  r.rates_bps = {rate};
  return r;
}

}  // namespace

TEST_CASE("experiment config validation") {
  ExperimentConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  c.drops = 0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = small_config();
  c.methods.clear();
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = small_config();
  c.sweep.values = {1.0, std::nan("")};
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = small_config();
  c.threads = 0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  CHECK_THROWS_AS(load_experiment("no/such/config.json"), InvalidInput);
}

TEST_CASE("experiment config JSON") {
  SUBCASE("round trip") {
    ExperimentConfig c = small_config();
    c.methods[0].options.outer_tol = 1e-5;
    const nlohmann::json j = c;
    const ExperimentConfig back = j.get<ExperimentConfig>();
    CHECK(back.methods.size() == 2);
    CHECK(back.methods[0].method == Method::Approach2);
    CHECK(back.methods[1].method == Method::BaselineUniformRandom);
    CHECK(back.methods[0].options.outer_tol == 1e-5);
    CHECK(back.sweep.values == c.sweep.values);
    CHECK(back.scenario.N == 8);
    CHECK(back.drops == 3);
    CHECK(back.base_seed == 5);
  }
  SUBCASE("per-method solver override") {
    const auto j = nlohmann::json::parse(R"({
      "solver": {"outer_tol": 1e-4},
      "methods": [{"method": "approach1"}, {"method": "approach2", "solver": {"outer_max_iter": 7}}],
      "sweep": {"variable": "P_R", "values": [0.5]}
    })");
    const auto c = j.get<ExperimentConfig>();
    CHECK(c.methods[0].options.outer_tol == 1e-4);
    CHECK(c.methods[1].options.outer_tol == 1e-4);
    CHECK(c.methods[1].options.outer_max_iter == 7);
    CHECK(c.methods[0].objective == Objective::Gee);
    CHECK(c.sweep.variable == "P_R");
  }
  SUBCASE("file loading") {
    const auto path = std::filesystem::temp_directory_path() / "risee_experiment_test.json";
    {
      std::ofstream out(path);
      out << nlohmann::json(small_config()).dump(2);
    }
    CHECK(load_experiment(path.string()).drops == 3);
    {
      std::ofstream out(path);
      out << "{ not json";
    }
    CHECK_THROWS_AS(load_experiment(path.string()), InvalidInput);
    std::filesystem::remove(path);
  }
  SUBCASE("defaults") {
    const ExperimentConfig d = default_experiment();
    CHECK_NOTHROW(d.validate());
    CHECK(d.scenario.K == 4);
    CHECK(d.scenario.N == 100);
    CHECK(d.methods.size() == 5);
    CHECK(d.drops == 100);
  }
}

TEST_CASE("sweep variables") {
  const SystemScenario base = selftest::desk_scenario(8, 2, 2);
  CHECK(apply_sweep_value(base, "Pmax_dbm", 30.0).Pmax_dbm == std::vector<double>{30.0, 30.0});
  const SystemScenario r = apply_sweep_value(base, "rice_K", 7.0);
  CHECK(r.rice_K_tx == 7.0);
  CHECK(r.rice_K_rx == 7.0);
  CHECK(apply_sweep_value(base, "N", 12.0).N == 12);
  const SystemScenario k = apply_sweep_value(base, "K", 3.0);
  CHECK(k.K == 3);
  CHECK(k.mu.size() == 3);
  CHECK_NOTHROW(k.validate());
  CHECK(apply_sweep_value(base, "P_R", 0.5).P_R == 0.5);
  CHECK_THROWS_AS(apply_sweep_value(base, "N", 2.5), InvalidInput);
  CHECK_THROWS_AS(apply_sweep_value(base, "no_such_field", 1.0), InvalidInput);
}

TEST_CASE("drop seeds") {
  CHECK(drop_seed(1, 0) == drop_seed(1, 0));
  CHECK(drop_seed(1, 0) != drop_seed(1, 1));
  CHECK(drop_seed(1, 0) != drop_seed(2, 0));
}

TEST_CASE("run_experiment") {
  SUBCASE("one drop, one method, one value") {
    ExperimentConfig c = small_config();
    c.methods = {method(Method::Approach1)};
    c.sweep.values = {20.0};
    c.drops = 1;
    const auto records = run_experiment(c);
    REQUIRE(records.size() == 1);
    CHECK(records[0].rates_bps.size() == 2);
    CHECK(records[0].seed == drop_seed(5, 0));
  }
  SUBCASE("ordering, determinism and thread independence") {
    ExperimentConfig c = small_config();
    const auto a = run_experiment(c);
    REQUIRE(a.size() == 12);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].sweep_value == c.sweep.values[i / 6]);
      CHECK(a[i].drop_index == static_cast<int>((i / 2) % 3));
      CHECK(a[i].method == to_string(c.methods[i % 2].method));
    }
    const auto b = run_experiment(c);
    CHECK(csv_without_wall_time(a) == csv_without_wall_time(b));
    c.threads = 4;
    CHECK(csv_without_wall_time(run_experiment(c)) == csv_without_wall_time(a));
  }
  SUBCASE("stored allocations reproduce the metrics") {
    ExperimentConfig c = small_config();
    c.sweep.values = {20.0};
    const auto records = run_experiment(c, true);
    const SystemScenario s = apply_sweep_value(c.scenario, "Pmax_dbm", 20.0);
    const LinkBudget b = link_budget(s);
    for (const auto& r : records) {
      REQUIRE(r.allocation.has_value());
      const ChannelSet ch = generate_drop(s, r.seed);
      const auto m = rates_and_gee(r.allocation->gamma, r.allocation->p, r.allocation->C, ch, b.power, b.bandwidth_hz);
      CHECK(m.gee == doctest::Approx(r.gee_bits_per_joule).epsilon(1e-9));
      CHECK(m.rates_bps.sum() == doctest::Approx(r.sum_rate_bps).epsilon(1e-9));
    }
  }
  SUBCASE("output files") {
    ExperimentConfig c = small_config();
    c.drops = 1;
    c.sweep.values = {20.0};
    const auto dir = std::filesystem::temp_directory_path();
    c.output_path = (dir / "risee_results_test.csv").string();
    c.allocations_path = (dir / "risee_alloc_test.jsonl").string();
    const auto records = run_experiment(c);
    std::ifstream in(c.output_path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "drop,seed,method,objective,constraint,sweep_var,sweep_value,gee,sum_rate,rate_1,rate_2,iters,wall_time_s");
    std::ifstream alloc(c.allocations_path);
    int lines = 0;
    for (std::string line; std::getline(alloc, line);) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j.contains("gamma"));
      ++lines;
    }
    CHECK(lines == static_cast<int>(records.size()));
    std::filesystem::remove(c.output_path);
    std::filesystem::remove(c.allocations_path);
  }
}

TEST_CASE("Approach 2 against the baseline over a power sweep") {
  ExperimentConfig c = small_config();
  c.sweep.values = {0.0, 10.0, 20.0, 30.0, 40.0};
  c.drops = 3;
  const auto rows = summarize(run_experiment(c), {"sweep_value", "method"});
  REQUIRE(rows.size() == 10);
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    CHECK(rows[i].key[1] == "approach2");
    CHECK(rows[i].gee_mean >= rows[i + 1].gee_mean);
  }
}

TEST_CASE("CSV round trip") {
  ExperimentConfig c = small_config();
  c.drops = 2;
  const auto records = run_experiment(c);
  std::ostringstream out;
  write_csv(out, records);
  std::istringstream in(out.str());
  const auto back = read_csv(in);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].gee_bits_per_joule == std::stod(format_double(records[i].gee_bits_per_joule)));
    CHECK(back[i].seed == records[i].seed);
    CHECK(back[i].method == records[i].method);
    CHECK(back[i].rates_bps.size() == records[i].rates_bps.size());
  }
  std::ostringstream again;
  write_csv(again, back);
  CHECK(again.str() == out.str());
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("summarize") {
  SUBCASE("single record") {
    const auto rows = summarize({synthetic("a", 1, 5.0, 2.0)}, {"method"});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].count == 1);
    CHECK(rows[0].gee_mean == 5.0);
    CHECK(rows[0].gee_sd == 0.0);
  }
  SUBCASE("two records") {
    const auto rows = summarize({synthetic("a", 1, 1.0, 1.0), synthetic("a", 1, 3.0, 3.0)}, {"method"});
    CHECK(rows[0].gee_mean == 2.0);
    CHECK(rows[0].gee_sd == 1.0);
    CHECK(rows[0].sum_rate_sd == 1.0);
  }
  SUBCASE("independent recomputation") {
    Rng rng(3);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::vector<ResultRecord> records;
    const std::vector<std::string> names = {"z", "a", "m"};
    for (int i = 0; i < 100; ++i)
      records.push_back(synthetic(names[static_cast<std::size_t>(i % 3)], i % 2, u(rng), u(rng)));
    const auto rows = summarize(records, {"method", "sweep_value"});
    // Stable order: first appearance.
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].key == std::vector<std::string>{"z", format_double(0.0)});
    CHECK(rows[1].key == std::vector<std::string>{"a", format_double(1.0)});
    std::map<std::pair<std::string, double>, std::vector<double>> groups;
    for (const auto& r : records) groups[{r.method, r.sweep_value}].push_back(r.gee_bits_per_joule);
    for (const auto& row : rows) {
      const auto& v = groups.at({row.key[0], std::stod(row.key[1])});
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      CHECK(row.count == static_cast<int>(v.size()));
      CHECK(row.gee_mean == doctest::Approx(mean).epsilon(1e-14));
      CHECK(row.gee_sd == doctest::Approx(std::sqrt(var / static_cast<double>(v.size()))).epsilon(1e-12));
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(summarize({}, {"method"}), InvalidInput);
    CHECK_THROWS_AS(summarize({synthetic("a", 1, 1, 1)}, {"colour"}), InvalidInput);
  }
  SUBCASE("table output") {
    std::ostringstream out;
    write_summary(out, {"method"}, summarize({synthetic("a", 1, 1, 1)}, {"method"}));
    CHECK(out.str().find("a") != std::string::npos);
  }
}
