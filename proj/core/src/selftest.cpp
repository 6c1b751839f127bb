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

#include "risee/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "risee/algorithms.hpp"
#include "risee/kernels.hpp"
#include "risee/metrics.hpp"
#include "risee/surrogates.hpp"

namespace risee::selftest {

namespace {

constexpr std::size_t kMaxFailures = 8;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string describe(const std::string& what, double value) {
  std::ostringstream os;
  os << what << " (" << value << ")";
  return os.str();
}

// Central difference of f along direction d (real or complex Eigen object).
template <typename Point, typename F>
double central_difference(const F& f, const Point& x, const Point& d, double h) {
  return (f(x + h * d) - f(x - h * d)) / (2.0 * h);
}

double fd_step(double scale) { return 1e-6 * std::max(scale, 1e-3); }

// Max abs error between Re<g, e_i> and the central difference over every
// real coordinate of a complex vector.
template <typename F>
double complex_vector_gradient_error(const F& f, const CVec& x, const CVec& g) {
  double worst = 0.0;
  const double h = fd_step(x.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (cdouble unit : {cdouble(1, 0), cdouble(0, 1)}) {
      CVec d = CVec::Zero(x.size());
      d(i) = unit;
      worst = std::max(worst, std::abs(central_difference(f, x, d, h) - real_inner(g, d)));
    }
  }
  return worst;
}

template <typename F>
double real_vector_gradient_error(const F& f, const RVec& x, const RVec& g) {
  double worst = 0.0;
  const double h = fd_step(x.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    RVec d = RVec::Zero(x.size());
    d(i) = 1.0;
    worst = std::max(worst, std::abs(central_difference(f, x, d, h) - g(i)));
  }
  return worst;
}

// Hermitian coordinate directions: e_i e_i^H, and the real and imaginary
// symmetric pairs for i < j.
template <typename F>
double hermitian_gradient_error(const F& f, const CMat& X, const CMat& G) {
  double worst = 0.0;
  const Eigen::Index n = X.rows();
  const double h = fd_step(X.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      for (cdouble unit : {cdouble(1, 0), cdouble(0, 1)}) {
        if (i == j && unit.imag() != 0.0) continue;
        CMat D = CMat::Zero(n, n);
        D(i, j) += unit;
        D(j, i) += std::conj(unit);
        if (i == j) D(i, i) = 1.0;
        worst = std::max(worst, std::abs(central_difference(f, X, D, h) - real_inner(G, D)));
      }
  return worst;
}

ChannelSet drop_or_unit(int index, const SystemScenario& scenario, std::uint64_t seed, Rng& rng) {
  if (index % 2 == 0) return generate_drop(scenario, seed);
  return random_unit_channels(scenario.N, scenario.K, scenario.N_R, rng);
}

PowerModel unit_power_model(int K) {
  PowerModel pm;
  pm.P_c_w = 1.0;
  pm.mu = RVec::Ones(K);
  pm.Pmax_w = RVec::Ones(K);
  return pm;
}

}  // namespace

void SuiteResult::record(bool ok, const std::string& what) {
  ++total;
  if (ok)
    ++passed;
  else if (failures.size() < kMaxFailures)
    failures.push_back(what);
}

SystemScenario desk_scenario(int N, int K, int N_R) {
  SystemScenario s;
  s.N = N;
  s.K = K;
  s.N_R = N_R;
  s.broadcast_per_user();
  s.validate();
  return s;
}

CVec random_cn(int n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  CVec v(n);
  for (int i = 0; i < n; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v(i) = cdouble(re, im);
  }
  return v;
}

CMat random_cn(int rows, int cols, Rng& rng) {
  CMat M(rows, cols);
  for (int c = 0; c < cols; ++c) M.col(c) = random_cn(rows, rng);
  return M;
}

CVec random_ball_point(int n, double radius2, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  CVec d = random_cn(n, rng);
  while (d.norm() == 0.0) d = random_cn(n, rng);
  // Radius distributed as u^(1/(2n)) for a uniform point in C^n.
  const double r = std::sqrt(radius2) * std::pow(unif(rng), 1.0 / (2.0 * n));
  return r * d / d.norm();
}

CMat random_psd(int n, double budget, Rng& rng) {
  std::uniform_int_distribution<int> rank_dist(1, n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const CMat W = random_cn(n, rank_dist(rng), rng);
  CMat X = W * W.adjoint();
  const double t = X.trace().real();
  X *= budget * (1.0 - unif(rng)) / t;
  return 0.5 * (X + X.adjoint());
}

RVec random_box_point(const RVec& upper, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RVec p(upper.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = upper(k) * unif(rng);
  return p;
}

ChannelSet random_unit_channels(int N, int K, int N_R, Rng& rng) {
  CMat G = random_cn(N_R, N, rng);
  std::vector<CVec> h;
  for (int k = 0; k < K; ++k) h.push_back(random_cn(N, rng));
  return make_channel_set(std::move(G), std::move(h), 1.0);
}

SuiteResult surrogate_suite(int drops, int points, int N, int K, int N_R, std::uint64_t seed) {
  SuiteResult res{"surrogates"};
  Timer timer;
  const SystemScenario scenario = desk_scenario(N, K, N_R);
  const LinkBudget lb = link_budget(scenario);
  const PowerModel& power = lb.power;
  const double budget = N * scenario.P_R;
  Rng rng(seed);

  auto tight = [&res](const std::string& name, double s, double f) {
    const double err = std::abs(s - f) / std::max(std::abs(f), 1e-300);
    res.worst = std::max(res.worst, err);
    res.record(err <= 1e-9, describe(name + " not tight", err));
  };
  // One aggregated check per surrogate and drop.
  auto minorizes = [&res](const std::string& name, const std::vector<double>& gaps) {
    const double worst = *std::min_element(gaps.begin(), gaps.end());
    res.record(worst >= -1e-9, describe(name + " exceeds the objective", worst));
  };

  for (int d = 0; d < drops; ++d) {
    const ChannelSet ch = generate_drop(scenario, seed + static_cast<std::uint64_t>(d));
    const CVec gamma_bar = random_ball_point(N, budget, rng);
    RVec p_bar = random_box_point(power.Pmax_w, rng);
    const FilterBank C = mmse_directions(gamma_bar, p_bar, ch);

    const GammaSurrogateCoeffs coeffs = build_gamma_surrogate(gamma_bar, p_bar, C, ch);
    tight("gamma surrogate", gamma_surrogate(gamma_bar, coeffs), sum_rate_fixed_filters(gamma_bar, p_bar, C, ch));
    const FixedFilterGains gains = fixed_filter_gains(gamma_bar, C, ch);
    const PowerSurrogateGee sp(p_bar, gains, power);
    tight("power surrogate", sp.value(p_bar), gee_fixed_filters(p_bar, gains, power));
    const PowerSurrogateGeeMmse sm(p_bar, gamma_bar, ch, power);
    tight("mmse power surrogate", sm.value(p_bar), gee_mmse_spectral(p_bar, gamma_bar, ch, power));
    const CMat X_bar = gamma_bar * gamma_bar.adjoint();
    const SrSurrogateX sx(X_bar, p_bar, ch);
    tight("lifted surrogate", sx.value(X_bar), sr_mmse(gamma_bar, p_bar, ch));

    std::vector<double> g_gap, p_gap, m_gap, x_gap;
    for (int i = 0; i < points; ++i) {
      const CVec g = random_ball_point(N, budget, rng);
      g_gap.push_back(sum_rate_fixed_filters(g, p_bar, C, ch) - gamma_surrogate(g, coeffs));
      const RVec p = random_box_point(power.Pmax_w, rng);
      p_gap.push_back(gee_fixed_filters(p, gains, power) - sp.value(p));
      m_gap.push_back(gee_mmse_spectral(p, gamma_bar, ch, power) - sm.value(p));
      const CMat X = random_psd(N, budget, rng);
      x_gap.push_back(sr_mmse_lifted(X, p_bar, ch) - sx.value(X));
    }
    minorizes("gamma surrogate", g_gap);
    minorizes("power surrogate", p_gap);
    minorizes("mmse power surrogate", m_gap);
    minorizes("lifted surrogate", x_gap);
  }
  res.seconds = timer.seconds();
  return res;
}

SuiteResult gradient_suite(int instances, double tolerance, std::uint64_t seed) {
  SuiteResult res{"gradients"};
  Timer timer;
  Rng rng(seed);
  const SystemScenario scenario = desk_scenario(8, 2, 2);
  const LinkBudget lb = link_budget(scenario);

  auto check = [&res, tolerance](const std::string& name, double err) {
    res.worst = std::max(res.worst, err);
    res.record(err <= tolerance, describe(name + " gradient mismatch", err));
  };

  for (int i = 0; i < instances; ++i) {
    const ChannelSet ch = drop_or_unit(i, scenario, seed + static_cast<std::uint64_t>(i), rng);
    const PowerModel power = i % 2 == 0 ? lb.power : unit_power_model(scenario.K);
    const int N = ch.elements();
    const CVec gamma = random_ball_point(N, N * scenario.P_R, rng);
    // Interior powers keep the central differences inside the box.
    const RVec p = (0.1 + 0.8 * random_box_point(RVec::Ones(scenario.K), rng).array()).matrix().cwiseProduct(
        power.Pmax_w);
    const FilterBank C = mmse_directions(gamma, p, ch);

    const GammaSurrogateCoeffs coeffs = build_gamma_surrogate(gamma, p, C, ch);
    const CVec g_probe = random_ball_point(N, N * scenario.P_R, rng);
    check("gamma surrogate",
          complex_vector_gradient_error([&](const CVec& g) { return gamma_surrogate(g, coeffs); }, g_probe,
                                        gamma_surrogate_gradient(g_probe, coeffs)));

    const CMat X_bar = random_psd(N, N * scenario.P_R, rng) + 1e-3 * CMat::Identity(N, N);
    const CMat X = random_psd(N, N * scenario.P_R, rng) + 1e-3 * CMat::Identity(N, N);
    const SrSurrogateX sx(X_bar, p, ch);
    check("lifted surrogate",
          hermitian_gradient_error([&](const CMat& Y) { return sx.value(Y); }, X, sx.gradient(X)));
    check("G2", hermitian_gradient_error([&](const CMat& Y) { return lifted_G2(Y, p, ch); }, X,
                                         lifted_G2_gradient(X, p, ch)));
    check("G1", hermitian_gradient_error([&](const CMat& Y) { return lifted_G1(Y, p, ch); }, X,
                                         lifted_G1_gradient(X, p, ch)));

    const RVec p_probe =
        (0.1 + 0.8 * random_box_point(RVec::Ones(scenario.K), rng).array()).matrix().cwiseProduct(power.Pmax_w);
    const PowerSurrogateGee sp(p, fixed_filter_gains(gamma, C, ch), power);
    check("power surrogate",
          real_vector_gradient_error([&](const RVec& q) { return sp.value(q); }, p_probe, sp.gradient(p_probe)));
    const PowerSurrogateGeeMmse sm(p, gamma, ch, power);
    check("mmse power surrogate",
          real_vector_gradient_error([&](const RVec& q) { return sm.value(q); }, p_probe, sm.gradient(p_probe)));
    check("F", real_vector_gradient_error([&](const RVec& q) { return interference_logdet_sum(q, gamma, ch); },
                                          p_probe, interference_logdet_sum_gradient(p_probe, gamma, ch)));
  }
  res.seconds = timer.seconds();
  return res;
}

SuiteResult determinant_suite(int instances, std::uint64_t seed) {
  SuiteResult res{"determinant identity"};
  Timer timer;
  Rng rng(seed);
  std::uniform_int_distribution<int> n_dist(1, 12), k_dist(1, 4), r_dist(1, 4);
  for (int i = 0; i < instances; ++i) {
    const int N = n_dist(rng), K = k_dist(rng), N_R = r_dist(rng);
    const SystemScenario scenario = desk_scenario(N, K, N_R);
    const ChannelSet ch = drop_or_unit(i, scenario, seed + static_cast<std::uint64_t>(i), rng);
    const PowerModel power = total_static_power(scenario);
    const CVec gamma = random_ball_point(N, N * scenario.P_R, rng);
    const RVec p = random_box_point(i % 2 == 0 ? power.Pmax_w : RVec::Ones(K), rng);
    const RVec a = sr_mmse_per_user(gamma, p, ch);
    const RVec b = sr_mmse_determinant_per_user(gamma, p, ch);
    double err = 0.0;
    for (int k = 0; k < K; ++k)
      err = std::max(err, std::abs(a(k) - b(k)) / std::max({std::abs(a(k)), std::abs(b(k)), 1e-300}));
    res.worst = std::max(res.worst, err);
    res.record(err <= 1e-8, describe("SINR and determinant forms disagree", err));
  }
  res.seconds = timer.seconds();
  return res;
}

SuiteResult mmse_dominance_suite(int instances, int filters, std::uint64_t seed) {
  SuiteResult res{"mmse dominance"};
  Timer timer;
  Rng rng(seed);
  const SystemScenario scenario = desk_scenario(8, 3, 3);
  const PowerModel power = total_static_power(scenario);
  for (int i = 0; i < instances; ++i) {
    const ChannelSet ch = drop_or_unit(i, scenario, seed + static_cast<std::uint64_t>(i), rng);
    const CVec gamma = random_ball_point(scenario.N, scenario.N * scenario.P_R, rng);
    const RVec p = (0.05 + random_box_point(RVec::Ones(scenario.K), rng).array()).matrix().cwiseProduct(
        i % 2 == 0 ? power.Pmax_w : RVec::Ones(scenario.K));
    FilterBank C = mmse_filters(gamma, p, ch);
    double worst = 0.0;
    for (int k = 0; k < scenario.K; ++k) {
      const double best = sinr(k, gamma, p, C, ch);
      FilterBank trial = C;
      for (int f = 0; f < filters; ++f) {
        trial[static_cast<std::size_t>(k)] = random_cn(scenario.N_R, rng);
        const double s = sinr(k, gamma, p, trial, ch);
        worst = std::min(worst, (best - s) / best);
      }
    }
    res.worst = std::min(res.worst, worst);
    res.record(worst >= -1e-9, describe("random filter beats the MMSE filter", worst));
  }
  res.seconds = timer.seconds();
  return res;
}

SuiteResult convergence_suite(int drops, int N, int K, int N_R, std::uint64_t seed) {
  SuiteResult res{"monotone convergence"};
  Timer timer;
  const SystemScenario scenario = desk_scenario(N, K, N_R);
  const LinkBudget lb = link_budget(scenario);
  for (int d = 0; d < drops; ++d) {
    const ChannelSet ch = generate_drop(scenario, seed + static_cast<std::uint64_t>(d));
    for (Method m : {Method::Approach1, Method::Approach2}) {
      MethodConfig config{m, Objective::Gee};
      const RunResult r = run_method(ch, lb, config, seed + static_cast<std::uint64_t>(d));
      const double drop = r.trace.worst_relative_decrease();
      res.worst = std::max(res.worst, drop);
      const bool ok = r.trace.non_decreasing(1e-9) && r.trace.converged &&
                      r.trace.iterations_used <= config.options.outer_max_iter;
      res.record(ok, describe(to_string(m) + " drop " + std::to_string(d) +
                                  (r.trace.converged ? " decreased" : " did not converge"),
                              drop));
    }
  }
  res.seconds = timer.seconds();
  return res;
}

SuiteResult kernel_suite(int instances, std::uint64_t seed) {
  SuiteResult res{"kernels"};
  Timer timer;
  Rng rng(seed);
  std::uniform_int_distribution<int> n_dist(1, 10);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int i = 0; i < instances; ++i) {
    const int n = n_dist(rng);
    const CMat W = random_cn(n, std::max(1, n - i % 3), rng);
    const CMat Q = W * W.adjoint();
    const CVec b = 3.0 * random_cn(n, rng);
    const double r2 = 0.1 + 4.0 * unif(rng);
    const BallSolution s = max_linear_minus_quadratic_ball(b, Q, r2);
    const double stationarity = (b - 2.0 * Q * s.gamma - 2.0 * s.lambda * s.gamma).norm() / std::max(1.0, b.norm());
    const double primal = std::max(0.0, s.gamma.squaredNorm() - r2) / r2;
    const double slackness = s.lambda * std::abs(r2 - s.gamma.squaredNorm()) / std::max(1.0, b.norm());
    const double kkt = std::max({stationarity, primal, slackness, s.lambda < 0 ? -s.lambda : 0.0});
    res.worst = std::max(res.worst, kkt);
    res.record(kkt < 1e-8, describe("ball solver KKT residual", kkt));

    CMat H = random_cn(n, n, rng);
    H = (0.5 * (H + H.adjoint())).eval();
    const double budget = i % 2 == 0 ? std::numeric_limits<double>::infinity() : 1.0 + unif(rng);
    const CMat P = project_psd_trace_ball(H, budget);
    const double idem = (project_psd_trace_ball(P, budget) - P).norm() / std::max(1.0, P.norm());
    res.record(idem <= 1e-10, describe("PSD projection not idempotent", idem));
  }

  CMat D = CMat::Zero(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = -1.0;
  CMat expect_inf = CMat::Zero(2, 2);
  expect_inf(0, 0) = 3.0;
  CMat expect_two = CMat::Zero(2, 2);
  expect_two(0, 0) = 2.0;
  const double e_inf = (project_psd_trace_ball(D, std::numeric_limits<double>::infinity()) - expect_inf).norm();
  const double e_two = (project_psd_trace_ball(D, 2.0) - expect_two).norm();
  res.record(e_inf <= 1e-12, describe("diag(3,-1) unbounded projection", e_inf));
  res.record(e_two <= 1e-12, describe("diag(3,-1) budget 2 projection", e_two));

  const ScalarField num{[](const RVec& p) { return std::log2(1.0 + p(0)); },
                        [](const RVec& p) { return RVec::Constant(1, 1.0 / ((1.0 + p(0)) * std::numbers::ln2)); }};
  const AffineFunction den{RVec::Ones(1), 1.0};
  const Box box{RVec::Zero(1), RVec::Constant(1, 10.0)};
  const DinkelbachResult dk = dinkelbach(num, den, box, RVec::Constant(1, 10.0), SolverOptions{});
  const double p_err = std::abs(dk.argmax(0) - (std::numbers::e - 1.0));
  res.record(p_err <= 1e-4, describe("Dinkelbach argmax", dk.argmax(0)));
  res.record(std::abs(dk.value - std::numbers::log2e / std::numbers::e) <= 1e-8,
             describe("Dinkelbach value", dk.value));

  res.seconds = timer.seconds();
  return res;
}

SuiteResult guarded(const std::string& name, const std::function<SuiteResult()>& suite) {
  try {
    return suite();
  } catch (const std::exception& e) {
    SuiteResult res{name};
    res.record(false, std::string("exception: ") + e.what());
    return res;
  }
}

std::vector<SuiteResult> run_all(const CheckOptions& o) {
  std::vector<SuiteResult> out;
  out.push_back(guarded("surrogates", [&] { return surrogate_suite(std::max(1, o.drops / 2), 200, 8, o.K, o.N_R, o.seed); }));
  out.push_back(guarded("gradients", [&] { return gradient_suite(5, 1e-5, o.seed + 1); }));
  out.push_back(guarded("determinant identity", [&] { return determinant_suite(200, o.seed + 2); }));
  out.push_back(guarded("mmse dominance", [&] { return mmse_dominance_suite(o.drops, 100, o.seed + 3); }));
  out.push_back(guarded("monotone convergence",
                        [&] { return convergence_suite(o.drops, o.N, o.K, o.N_R, o.seed + 4); }));
  out.push_back(guarded("kernels", [&] { return kernel_suite(50, o.seed + 5); }));
  return out;
}

}  // namespace risee::selftest
