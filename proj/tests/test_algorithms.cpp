#include <doctest.h>

#include <limits>

#include "oracles.hpp"
#include "risee/algorithms.hpp"
#include "risee/selftest.hpp"

using namespace risee;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LinkBudget unit_budget(int K, double P_c = 1.0, double mu = 1.0, double pmax = 10.0, double P_R = 1.0) {
  LinkBudget b;
  b.power.P_c_w = P_c;
  b.power.mu = RVec::Constant(K, mu);
  b.power.Pmax_w = RVec::Constant(K, pmax);
  b.bandwidth_hz = 1.0;
  b.P_R = P_R;
  return b;
}

MethodConfig config_for(Method m, Objective o = Objective::Gee,
                        ReflectionConstraint c = ReflectionConstraint::Global) {
  MethodConfig cfg;
  cfg.method = m;
  cfg.objective = o;
  cfg.reflection_constraint = c;
  return cfg;
}

// Single-user GEE with the MMSE (matched) filter; bandwidth 1.
double single_user_gee(const CVec& gamma, double p, const ChannelSet& ch, const PowerModel& pm) {
  const double snr = p * (ch.A[0] * gamma).squaredNorm() / ch.noise_power_w;
  return oracle::log2(1.0 + snr) / (pm.P_c_w + pm.mu(0) * p);
}

}  // namespace

TEST_CASE("method names round trip") {
  for (Method m : {Method::Approach1, Method::Approach2, Method::BaselineUniformRandom})
    CHECK(parse_method(to_string(m)) == m);
  for (Objective o : {Objective::Gee, Objective::SumRate}) CHECK(parse_objective(to_string(o)) == o);
  for (ReflectionConstraint c :
       {ReflectionConstraint::Global, ReflectionConstraint::Local, ReflectionConstraint::LocalModulus})
    CHECK(parse_constraint(to_string(c)) == c);
  CHECK_THROWS_AS(parse_method("approach3"), InvalidInput);
  CHECK(config_for(Method::Approach2).id() == "approach2/gee/global");
}

TEST_CASE("reflection sets") {
  const ReflectionSet global(ReflectionConstraint::Global, 4, 0.5);
  const ReflectionSet local(ReflectionConstraint::Local, 4, 0.5);
  const ReflectionSet modulus(ReflectionConstraint::LocalModulus, 4, 0.5);
  CHECK(global.budget() == doctest::Approx(2.0));
  CHECK(local.element_cap() == doctest::Approx(0.5));
  CHECK(modulus.element_cap() == doctest::Approx(0.25));
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const CVec g = selftest::random_cn(4, rng);
    const CVec pl = local.project(g);
    CHECK(local.contains(pl));
    // Local feasibility implies global feasibility.
    CHECK(global.contains(pl));
    CHECK(global.contains(global.project(g)));
    CHECK(local.contains(local.rescale_candidate(g)));
    CHECK(global.rescale_candidate(g).squaredNorm() == doctest::Approx(2.0));
  }
  CHECK_THROWS_AS(apply_local_constraint(config_for(Method::Approach1), 4, 1.0), InvalidInput);
  CHECK(apply_local_constraint(config_for(Method::Approach1, Objective::Gee, ReflectionConstraint::Local), 4, 1.0)
            .kind() == ReflectionConstraint::Local);
}

TEST_CASE("reflection step, scalar channel") {
  const cdouble a(0.6, -0.8);
  const ChannelSet ch = make_channel_set(CMat::Constant(1, 1, a), {CVec::Ones(1)}, 0.5);
  const double P_R = 0.7, p = 2.0;
  const ReflectionSet set(ReflectionConstraint::Global, 1, P_R);
  const auto r = optimize_gamma_sca(CVec::Constant(1, cdouble(0.1, 0.2)), RVec::Constant(1, p), {CVec::Ones(1)}, ch,
                                    SolverOptions{}, set);
  CHECK(std::norm(r.gamma(0)) == doctest::Approx(P_R).epsilon(1e-6));
  const double rate = oracle::log2(1.0 + p * std::norm(a) * std::norm(r.gamma(0)) / 0.5);
  CHECK(rate == doctest::Approx(oracle::log2(1.0 + p * P_R / 0.5)).epsilon(1e-6));
}

TEST_CASE("reflection steps with no signal return the start") {
  Rng rng(5);
  const ChannelSet ch = selftest::random_unit_channels(3, 2, 2, rng);
  const ReflectionSet set(ReflectionConstraint::Global, 3, 1.0);
  const CVec g0 = set.project(selftest::random_cn(3, rng));
  const FilterBank C = {CVec::Ones(2), CVec::Ones(2)};
  const auto a = optimize_gamma_sca(g0, RVec::Zero(2), C, ch, SolverOptions{}, set);
  CHECK(a.gamma == g0);
  CHECK(a.trace.iterations_used == 1);
  const auto b = optimize_gamma_sdr(g0, RVec::Zero(2), ch, SolverOptions{}, set);
  CHECK(b.gamma == g0);
}

TEST_CASE("reflection step against a grid, N = 2") {
  Rng rng(7);
  for (int t = 0; t < 5; ++t) {
    const ChannelSet ch = selftest::random_unit_channels(2, 1, 1, rng);
    const ReflectionSet set(ReflectionConstraint::Global, 2, 1.0);
    const FilterBank C = {CVec::Ones(1)};
    const RVec p = RVec::Constant(1, 3.0);
    const auto rate = [&](const CVec& g) {
      return oracle::log2(1.0 + oracle::sinr(0, g, p, C, ch));
    };
    const auto r = optimize_gamma_sca(set.initial_point(), p, C, ch, SolverOptions{}, set);
    const std::function<double(const RVec&)> f = [&](const RVec& x) {
      const CVec g = (CVec(2) << cdouble(x(0), x(1)), cdouble(x(2), x(3))).finished();
      return g.squaredNorm() > 2.0 ? -kInf : rate(g);
    };
    const double s2 = std::sqrt(2.0);
    const double best = oracle::zoom_grid_max(f, RVec::Constant(4, -s2), RVec::Constant(4, s2), 15, 10).second;
    CHECK(rate(r.gamma) >= 0.99 * best);
    CHECK(set.contains(r.gamma));
    // The SDR step on the same single-user problem.
    const auto s = optimize_gamma_sdr(set.initial_point(), p, ch, SolverOptions{}, set);
    CHECK(sr_mmse(s.gamma, p, ch) >= 0.99 * best);
  }
}

TEST_CASE("fixed-filter power step") {
  Rng rng(11);
  SUBCASE("single user against a 1-D grid") {
    for (int t = 0; t < 5; ++t) {
      const ChannelSet ch = selftest::random_unit_channels(3, 1, 2, rng);
      const LinkBudget b = unit_budget(1, 0.5, 2.0, 10.0);
      const CVec g = selftest::random_cn(3, rng);
      const FilterBank C = {selftest::random_cn(2, rng)};
      const auto r = optimize_power_sfp(RVec::Constant(1, 10.0), g, C, ch, b.power, SolverOptions{});
      auto gee = [&](double p) {
        return oracle::log2(1.0 + oracle::sinr(0, g, RVec::Constant(1, p), C, ch)) / (0.5 + 2.0 * p);
      };
      double best = 0.0;
      for (int i = 0; i <= 10000; ++i) best = std::max(best, gee(10.0 * i / 10000));
      CHECK(gee(r.p(0)) >= best * (1.0 - 1e-3));
      CHECK(r.trace.non_decreasing(1e-12));
    }
  }
  SUBCASE("interference-free, large static power") {
    // User k only reaches antenna k and is read by filter e_k.
    const CMat G = CMat::Identity(2, 2);
    const std::vector<CVec> h = {(CVec(2) << 1.0, 0.0).finished(), (CVec(2) << 0.0, 2.0).finished()};
    const ChannelSet ch = make_channel_set(G, h, 1.0);
    const FilterBank C = {(CVec(2) << 1.0, 0.0).finished(), (CVec(2) << 0.0, 1.0).finished()};
    const LinkBudget b = unit_budget(2, 1e6, 1.0, 3.0);
    const auto r = optimize_power_sfp(RVec::Constant(2, 0.5), CVec::Ones(2), C, ch, b.power, SolverOptions{});
    CHECK(r.p(0) == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(r.p(1) == doctest::Approx(3.0).epsilon(1e-6));
    // Zero amplifier cost: full power is a fixed point.
    const LinkBudget z = unit_budget(2, 1.0, 0.0, 3.0);
    const auto f = optimize_power_sfp(z.power.Pmax_w, CVec::Ones(2), C, ch, z.power, SolverOptions{});
    CHECK((f.p - z.power.Pmax_w).norm() < 1e-9);
  }
}

TEST_CASE("MMSE power step") {
  Rng rng(13);
  SUBCASE("single user against a 1-D grid") {
    for (int t = 0; t < 5; ++t) {
      const ChannelSet ch = selftest::random_unit_channels(3, 1, 2, rng);
      const LinkBudget b = unit_budget(1, 0.5, 2.0, 10.0);
      const CVec g = selftest::random_cn(3, rng);
      const auto r = optimize_power_mmse(RVec::Constant(1, 10.0), g, ch, b.power, SolverOptions{});
      double best = 0.0;
      for (int i = 0; i <= 10000; ++i) best = std::max(best, single_user_gee(g, 10.0 * i / 10000, ch, b.power));
      CHECK(single_user_gee(g, r.p(0), ch, b.power) >= best * (1.0 - 1e-3));
      // Restarting at the answer stops after one iteration.
      const auto again = optimize_power_mmse(r.p, g, ch, b.power, SolverOptions{});
      CHECK(again.trace.iterations_used == 1);
      CHECK((again.p - r.p).norm() <= 1e-6 * std::max(1.0, r.p.norm()));
    }
  }
  SUBCASE("constant-denominator regime, one user") {
    const ChannelSet ch = selftest::random_unit_channels(3, 1, 2, rng);
    LinkBudget b = unit_budget(1, 1.0, 1.0, 2.0);
    b.power.P_c_w = 1e6 * 2.0;
    const auto r = optimize_power_mmse(RVec::Constant(1, 0.5), CVec::Ones(3), ch, b.power, SolverOptions{});
    CHECK(r.p(0) == doctest::Approx(2.0).epsilon(1e-6));
  }
  SUBCASE("constant-denominator regime, two users") {
    // The MMSE sum rate is not monotone in each power once users interfere,
    // so the reference is the grid maximum rather than Pmax.
    const ChannelSet ch = selftest::random_unit_channels(3, 2, 2, rng);
    LinkBudget b = unit_budget(2, 1.0, 1.0, 2.0);
    b.power.P_c_w = 1e6 * b.power.mu.dot(b.power.Pmax_w);
    const auto r = optimize_power_mmse(RVec::Constant(2, 1.0), CVec::Ones(3), ch, b.power, SolverOptions{});
    // Grid over the box for the sum rate, which the ratio reduces to.
    const std::function<double(const RVec&)> f = [&](const RVec& p) {
      return sr_mmse(CVec::Ones(3), p, ch) / b.power.consumed(p);
    };
    const double best = oracle::zoom_grid_max(f, RVec::Zero(2), b.power.Pmax_w, 21, 6).second;
    CHECK(f(r.p) >= best * (1.0 - 1e-6));
  }
}

TEST_CASE("both algorithms against a joint grid, N = 2, K = 1") {
  Rng rng(17);
  for (int t = 0; t < 4; ++t) {
    const ChannelSet ch = selftest::random_unit_channels(2, 1, 1, rng);
    const LinkBudget b = unit_budget(1, 1.0, 1.0, 10.0);
    const double best = oracle::two_element_gee_grid(ch, 2.0 * b.P_R, 1.0, 1.0, 10.0);
    for (Method m : {Method::Approach1, Method::Approach2}) {
      const auto r = run_method(ch, b, config_for(m), 1);
      CHECK(r.allocation.gee_bits_per_joule >= 0.99 * best);
      CHECK(r.allocation.gee_bits_per_joule <= best * (1.0 + 1e-3));
    }
  }
}

TEST_CASE("algorithms on realistic drops") {
  const SystemScenario s = selftest::desk_scenario(16, 2, 2);
  const LinkBudget b = link_budget(s);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const ChannelSet ch = generate_drop(s, seed);
    for (Method m : {Method::Approach1, Method::Approach2}) {
      for (ReflectionConstraint c : {ReflectionConstraint::Global, ReflectionConstraint::Local}) {
        const MethodConfig cfg = config_for(m, Objective::Gee, c);
        const auto r = run_method(ch, b, cfg, seed);
        const ReflectionSet set = reflection_set_for(cfg, s.N, s.P_R);
        CHECK(set.contains(r.allocation.gamma));
        CHECK(r.allocation.p.minCoeff() >= 0.0);
        CHECK(((b.power.Pmax_w - r.allocation.p).array() >= -1e-12).all());
        CHECK(r.trace.non_decreasing(1e-9));
        CHECK(r.trace.converged);
        CHECK(r.trace.iterations_used <= cfg.options.outer_max_iter);
      }
    }
  }
}

TEST_CASE("warm start at the answer stops after one round") {
  const SystemScenario s = selftest::desk_scenario(16, 2, 2);
  const LinkBudget b = link_budget(s);
  const ChannelSet ch = generate_drop(s, 2);
  const MethodConfig cfg = config_for(Method::Approach1);
  const auto first = algorithm_one(ch, b, cfg);
  const auto second = algorithm_one(ch, b, cfg, StartPoint{first.allocation.gamma, first.allocation.p});
  CHECK(second.trace.iterations_used == 1);
  CHECK(second.allocation.gee_bits_per_joule ==
        doctest::Approx(first.allocation.gee_bits_per_joule).epsilon(cfg.options.outer_tol));
}

TEST_CASE("filter block optimality in Approach 1") {
  const SystemScenario s = selftest::desk_scenario(16, 2, 2);
  const LinkBudget b = link_budget(s);
  Rng rng(19);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ChannelSet ch = generate_drop(s, seed);
    const auto r = algorithm_one(ch, b, config_for(Method::Approach1));
    const Allocation& a = r.allocation;
    for (int t = 0; t < 100; ++t) {
      FilterBank C;
      for (int k = 0; k < s.K; ++k) C.push_back(selftest::random_cn(s.N_R, rng));
      const double g = rates_and_gee(a.gamma, a.p, C, ch, b.power, b.bandwidth_hz).gee;
      CHECK(g <= a.gee_bits_per_joule * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("sum-rate mode") {
  const SystemScenario s = selftest::desk_scenario(16, 2, 2);
  const LinkBudget b = link_budget(s);
  SUBCASE("beats the baseline on sum rate") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const ChannelSet ch = generate_drop(s, seed);
      const auto base = baseline_uniform_random(ch, b, seed);
      const auto r = run_method(ch, b, config_for(Method::Approach1, Objective::SumRate), seed);
      CHECK(r.allocation.sum_rate_bps() >= base.sum_rate_bps() * (1.0 - 1e-9));
    }
  }
  SUBCASE("argmax does not depend on the static power") {
    const ChannelSet ch = generate_drop(s, 5);
    LinkBudget big = b;
    big.power.P_c_w *= 10.0;
    for (Method m : {Method::Approach1, Method::Approach2}) {
      const auto x = run_method(ch, b, config_for(m, Objective::SumRate), 5);
      const auto y = run_method(ch, big, config_for(m, Objective::SumRate), 5);
      CHECK((x.allocation.gamma - y.allocation.gamma).norm() <= 1e-6 * x.allocation.gamma.norm());
      CHECK((x.allocation.p - y.allocation.p).norm() <= 1e-6 * std::max(1e-12, x.allocation.p.norm()));
    }
  }
  SUBCASE("zero amplifier cost gives a non-decreasing rate trace") {
    const ChannelSet ch = generate_drop(s, 6);
    LinkBudget z = b;
    z.power.mu.setZero();
    const auto r = algorithm_two(ch, z, config_for(Method::Approach2));
    CHECK(r.trace.non_decreasing(1e-9));
  }
}

TEST_CASE("baseline") {
  const SystemScenario s = selftest::desk_scenario(16, 2, 2);
  const LinkBudget b = link_budget(s);
  const ChannelSet ch = generate_drop(s, 1);
  const auto a = baseline_uniform_random(ch, b, 4);
  CHECK(a.gamma.squaredNorm() == doctest::Approx(s.N * s.P_R).epsilon(1e-12));
  CHECK(a.p == b.power.Pmax_w);
  CHECK(baseline_uniform_random(ch, b, 4).gamma == a.gamma);
  CHECK(baseline_uniform_random(ch, b, 5).gamma != a.gamma);
  CHECK(a.gee_bits_per_joule == doctest::Approx(gee_mmse(a.gamma, a.p, ch, b.power, b.bandwidth_hz)).epsilon(1e-12));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ChannelSet c = generate_drop(s, seed);
    const auto r = run_method(c, b, config_for(Method::Approach2), seed);
    CHECK(r.allocation.gee_bits_per_joule >= baseline_uniform_random(c, b, seed).gee_bits_per_joule);
  }
}

TEST_CASE("local and global constraints") {
  SUBCASE("one element: the sets coincide") {
    SystemScenario s = selftest::desk_scenario(1, 2, 2);
    const LinkBudget b = link_budget(s);
    const ChannelSet ch = generate_drop(s, 3);
    for (Method m : {Method::Approach1, Method::Approach2}) {
      const auto g = run_method(ch, b, config_for(m), 3);
      const auto l = run_method(ch, b, config_for(m, Objective::Gee, ReflectionConstraint::Local), 3);
      CHECK(l.allocation.gee_bits_per_joule ==
            doctest::Approx(g.allocation.gee_bits_per_joule).epsilon(1e-9));
    }
  }
  SUBCASE("global at least as good on paired drops") {
    const SystemScenario s = selftest::desk_scenario(16, 2, 2);
    const LinkBudget b = link_budget(s);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const ChannelSet ch = generate_drop(s, seed);
      const auto g = run_method(ch, b, config_for(Method::Approach2), seed);
      const auto l = run_method(ch, b, config_for(Method::Approach2, Objective::Gee, ReflectionConstraint::Local), seed);
      CHECK(g.allocation.gee_bits_per_joule >= l.allocation.gee_bits_per_joule - 1e-9);
    }
  }
}
