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

#include "risee/algorithms.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace risee {

namespace {

double relative_gain(double before, double after) {
  return (after - before) / std::max(std::abs(before), std::numeric_limits<double>::min());
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Box power_box(const PowerModel& power) { return Box{RVec::Zero(power.Pmax_w.size()), power.Pmax_w}; }

void require_in_box(const RVec& p, const PowerModel& power) {
  if (p.size() != power.Pmax_w.size()) throw InvalidInput("power vector length must equal the user count");
  if (!power_box(power).contains(p, 1e-12)) throw InvalidInput("starting powers outside [0, Pmax]");
}

void require_feasible(const CVec& gamma, const ReflectionSet& set) {
  if (gamma.size() != set.elements()) throw InvalidInput("gamma length must equal the RIS element count");
  if (!set.contains(gamma)) throw InvalidInput("starting reflection coefficients violate the reflection constraint");
}

// Moves gamma by 1e-8 (relative) in a random direction and back into the set.
CVec perturb(const CVec& gamma, const ReflectionSet& set, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVec d(gamma.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    d(i) = cdouble(re, im);
  }
  const double scale = 1e-8 * std::max(gamma.norm(), std::sqrt(set.budget()));
  return set.project(gamma + scale * d / d.norm());
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Approach1: return "approach1";
    case Method::Approach2: return "approach2";
    case Method::BaselineUniformRandom: return "baseline_uniform_random";
  }
  return "unknown";
}

std::string to_string(Objective o) { return o == Objective::Gee ? "gee" : "sum_rate"; }

std::string to_string(ReflectionConstraint c) {
  switch (c) {
    case ReflectionConstraint::Global: return "global";
    case ReflectionConstraint::Local: return "local";
    case ReflectionConstraint::LocalModulus: return "local_modulus";
  }
  return "unknown";
}

Method parse_method(const std::string& s) {
  if (s == "approach1" || s == "algorithm_one") return Method::Approach1;
  if (s == "approach2" || s == "algorithm_two") return Method::Approach2;
  if (s == "baseline_uniform_random" || s == "baseline") return Method::BaselineUniformRandom;
  throw InvalidInput("unknown method: " + s);
}

Objective parse_objective(const std::string& s) {
  if (s == "gee") return Objective::Gee;
  if (s == "sum_rate") return Objective::SumRate;
  throw InvalidInput("unknown objective: " + s);
}

ReflectionConstraint parse_constraint(const std::string& s) {
  if (s == "global") return ReflectionConstraint::Global;
  if (s == "local") return ReflectionConstraint::Local;
  if (s == "local_modulus") return ReflectionConstraint::LocalModulus;
  throw InvalidInput("unknown reflection constraint: " + s);
}

std::string MethodConfig::id() const {
  return to_string(method) + "/" + to_string(objective) + "/" + to_string(reflection_constraint);
}

// ---------------------------------------------------------------------------

ReflectionSet::ReflectionSet(ReflectionConstraint kind, int elements, double P_R)
    : kind_(kind), elements_(elements), P_R_(P_R) {
  if (elements < 1) throw InvalidInput("reflection set needs at least one element");
  if (!(P_R > 0)) throw InvalidInput("P_R must be positive");
}

double ReflectionSet::element_cap() const {
  switch (kind_) {
    case ReflectionConstraint::Global: return std::numeric_limits<double>::infinity();
    case ReflectionConstraint::Local: return P_R_;
    case ReflectionConstraint::LocalModulus: return P_R_ * P_R_;
  }
  return P_R_;
}

double ReflectionSet::budget() const { return is_global() ? elements_ * P_R_ : elements_ * element_cap(); }

bool ReflectionSet::contains(const CVec& gamma, double slack) const {
  if (is_global()) return gamma.squaredNorm() <= budget() + slack;
  return (gamma.cwiseAbs2().array() <= element_cap() + slack).all();
}

CVec ReflectionSet::project(const CVec& gamma) const {
  if (is_global()) {
    const double n2 = gamma.squaredNorm();
    return n2 > budget() ? CVec(gamma * std::sqrt(budget() / n2)) : gamma;
  }
  const double r = std::sqrt(element_cap());
  CVec out = gamma;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (std::abs(out(i)) > r) out(i) *= r / std::abs(out(i));
  return out;
}

CVec ReflectionSet::rescale_candidate(const CVec& xi) const {
  if (is_global()) {
    const double n = xi.norm();
    return n > 0.0 ? CVec(xi * (std::sqrt(budget()) / n)) : initial_point();
  }
  const double r = std::sqrt(element_cap());
  CVec out(xi.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) out(i) = std::polar(r, std::arg(xi(i)));
  return out;
}

CMat ReflectionSet::project_lifted(const CMat& X) const {
  if (is_global()) return project_psd_trace_ball(X, budget());
  return project_psd_diagonal_cap(X, element_cap());
}

CVec ReflectionSet::initial_point() const {
  const double cap = is_global() ? P_R_ : element_cap();
  return CVec::Constant(elements_, cdouble(std::sqrt(cap), 0.0));
}

ReflectionSet reflection_set_for(const MethodConfig& config, int elements, double P_R) {
  return ReflectionSet(config.reflection_constraint, elements, P_R);
}

ReflectionSet apply_local_constraint(const MethodConfig& config, int elements, double P_R) {
  if (config.reflection_constraint == ReflectionConstraint::Global)
    throw InvalidInput("apply_local_constraint: configuration uses the global constraint");
  return reflection_set_for(config, elements, P_R);
}

LinkBudget link_budget(const SystemScenario& scenario) {
  return LinkBudget{total_static_power(scenario), scenario.bandwidth_hz, scenario.P_R};
}

// ---------------------------------------------------------------------------

GammaResult optimize_gamma_sca(const CVec& gamma0, const RVec& p, const FilterBank& C, const ChannelSet& ch,
                               const SolverOptions& options, const ReflectionSet& set) {
  require_feasible(gamma0, set);
  GammaResult out;
  CVec gamma = gamma0;
  double objective = sum_rate_fixed_filters(gamma, p, C, ch);
  out.trace.objective_per_iteration.push_back(objective);
  Rng rng(mix_seed(options.seed, 0x5ca));

  for (int it = 0; it < options.outer_max_iter; ++it) {
    out.trace.iterations_used = it + 1;
    CVec expansion = gamma;
    GammaSurrogateCoeffs co;
    for (int attempt = 0;; ++attempt) {
      try {
        co = build_gamma_surrogate(expansion, p, C, ch);
        break;
      } catch (const DegenerateExpansion&) {
        if (attempt >= 8) throw;
        expansion = perturb(gamma, set, rng);
      }
    }

    CVec candidate;
    if (set.is_global()) {
      candidate = max_linear_minus_quadratic_ball(co.b, co.Q, set.budget()).gamma;
    } else {
      AscentProblem<CVec> sub{
          [&co](const CVec& g) { return gamma_surrogate(g, co); },
          [&co](const CVec& g) { return gamma_surrogate_gradient(g, co); },
          [&set](const CVec& g) { return set.project(g); },
      };
      candidate = projected_ascent(sub, expansion, options).argmax;
    }

    const double next = sum_rate_fixed_filters(candidate, p, C, ch);
    if (!(next > objective)) {
      out.trace.converged = true;
      break;
    }
    const double gain = relative_gain(objective, next);
    gamma = std::move(candidate);
    objective = next;
    out.trace.objective_per_iteration.push_back(objective);
    if (gain < options.outer_tol) {
      out.trace.converged = true;
      break;
    }
  }
  out.gamma = std::move(gamma);
  return out;
}

PowerResult optimize_power_sfp(const RVec& p0, const CVec& gamma, const FilterBank& C, const ChannelSet& ch,
                               const PowerModel& power, const SolverOptions& options) {
  require_in_box(p0, power);
  const Box box = power_box(power);
  const FixedFilterGains gains = fixed_filter_gains(gamma, C, ch);
  const AffineFunction denominator{power.mu, power.P_c_w};

  PowerResult out;
  RVec p = box.project(p0);
  double objective = gee_fixed_filters(p, gains, power);
  out.trace.objective_per_iteration.push_back(objective);

  for (int it = 0; it < options.outer_max_iter; ++it) {
    out.trace.iterations_used = it + 1;
    const PowerSurrogateGee surrogate(p, gains, power);
    const ScalarField numerator{
        [&surrogate](const RVec& x) { return surrogate.numerator(x); },
        [&surrogate](const RVec& x) { return surrogate.numerator_gradient(x); },
    };
    const RVec candidate = dinkelbach(numerator, denominator, box, p, options).argmax;
    const double next = gee_fixed_filters(candidate, gains, power);
    if (!(next > objective)) {
      out.trace.converged = true;
      break;
    }
    const double gain = relative_gain(objective, next);
    p = candidate;
    objective = next;
    out.trace.objective_per_iteration.push_back(objective);
    if (gain < options.outer_tol) {
      out.trace.converged = true;
      break;
    }
  }
  out.p = std::move(p);
  return out;
}

RunResult algorithm_one(const ChannelSet& ch, const LinkBudget& budget, const MethodConfig& config,
                        const std::optional<StartPoint>& start) {
  config.options.validate();
  budget.power.validate();
  const ReflectionSet set = reflection_set_for(config, ch.elements(), budget.P_R);
  const SolverOptions& opt = config.options;

  CVec gamma = start ? start->gamma : set.initial_point();
  RVec p = start ? start->p : budget.power.Pmax_w;
  require_feasible(gamma, set);
  require_in_box(p, budget.power);

  RunResult out;
  FilterBank C = mmse_directions(gamma, p, ch);
  double gee = rates_and_gee(gamma, p, C, ch, budget.power, budget.bandwidth_hz).gee;
  out.trace.objective_per_iteration.push_back(gee);

  for (int it = 0; it < opt.outer_max_iter; ++it) {
    out.trace.iterations_used = it + 1;
    C = mmse_directions(gamma, p, ch);
    gamma = optimize_gamma_sca(gamma, p, C, ch, opt, set).gamma;
    p = optimize_power_sfp(p, gamma, C, ch, budget.power, opt).p;
    const double next = rates_and_gee(gamma, p, C, ch, budget.power, budget.bandwidth_hz).gee;
    out.trace.objective_per_iteration.push_back(next);
    const double gain = relative_gain(gee, next);
    gee = next;
    if (gain < opt.outer_tol) {
      out.trace.converged = true;
      break;
    }
  }

  out.allocation.gamma = std::move(gamma);
  out.allocation.p = std::move(p);
  out.allocation.C = std::move(C);
  evaluate(out.allocation, ch, budget.power, budget.bandwidth_hz);
  return out;
}

// ---------------------------------------------------------------------------

RankOneExtraction extract_rank_one(const CMat& X, const ChannelSet& ch, const RVec& p, const ReflectionSet& set,
                                   int count, std::uint64_t seed) {
  return extract_rank_one(
      X, [&](const CVec& g) { return sr_mmse(g, p, ch); }, set.budget(), count, seed,
      [&set](const CVec& xi) { return set.rescale_candidate(xi); });
}

GammaResult optimize_gamma_sdr(const CVec& gamma0, const RVec& p, const ChannelSet& ch,
                               const SolverOptions& options, const ReflectionSet& set) {
  require_feasible(gamma0, set);
  GammaResult out;
  CMat X = gamma0 * gamma0.adjoint();
  double objective = sr_mmse_lifted(X, p, ch);
  out.trace.objective_per_iteration.push_back(objective);
  const MatrixProjector projector = [&set](const CMat& Y) { return set.project_lifted(Y); };

  bool moved = false;
  for (int it = 0; it < options.outer_max_iter; ++it) {
    out.trace.iterations_used = it + 1;
    const SrSurrogateX surrogate(X, p, ch);
    const MatrixField field{
        [&surrogate](const CMat& Y) { return surrogate.value(Y); },
        [&surrogate](const CMat& Y) { return surrogate.gradient(Y); },
    };
    CMat candidate = psd_projected_ascent(field, X, set.budget(), options, projector).argmax;
    const double next = sr_mmse_lifted(candidate, p, ch);
    if (!(next > objective)) {
      out.trace.converged = true;
      break;
    }
    const double gain = relative_gain(objective, next);
    X = std::move(candidate);
    objective = next;
    moved = true;
    out.trace.objective_per_iteration.push_back(objective);
    if (gain < options.outer_tol) {
      out.trace.converged = true;
      break;
    }
  }

  out.gamma = gamma0;
  if (!moved) return out;
  const auto extracted = extract_rank_one(X, ch, p, set, options.randomization_count, options.seed);
  const CVec gamma = set.project(extracted.gamma);
  if (sr_mmse(gamma, p, ch) > sr_mmse(gamma0, p, ch)) out.gamma = gamma;
  return out;
}

PowerResult optimize_power_mmse(const RVec& p0, const CVec& gamma, const ChannelSet& ch, const PowerModel& power,
                                const SolverOptions& options) {
  require_in_box(p0, power);
  const Box box = power_box(power);
  const AffineFunction denominator{power.mu, power.P_c_w};

  PowerResult out;
  RVec p = box.project(p0);
  double objective = gee_mmse_spectral(p, gamma, ch, power);
  out.trace.objective_per_iteration.push_back(objective);

  for (int it = 0; it < options.outer_max_iter; ++it) {
    out.trace.iterations_used = it + 1;
    const PowerSurrogateGeeMmse surrogate(p, gamma, ch, power);
    const ScalarField numerator{
        [&surrogate](const RVec& x) { return surrogate.numerator(x); },
        [&surrogate](const RVec& x) { return surrogate.numerator_gradient(x); },
    };
    const RVec candidate = dinkelbach(numerator, denominator, box, p, options).argmax;
    const double next = gee_mmse_spectral(candidate, gamma, ch, power);
    if (!(next > objective)) {
      out.trace.converged = true;
      break;
    }
    const double gain = relative_gain(objective, next);
    p = candidate;
    objective = next;
    out.trace.objective_per_iteration.push_back(objective);
    if (gain < options.outer_tol) {
      out.trace.converged = true;
      break;
    }
  }
  out.p = std::move(p);
  return out;
}

RunResult algorithm_two(const ChannelSet& ch, const LinkBudget& budget, const MethodConfig& config,
                        const std::optional<StartPoint>& start) {
  config.options.validate();
  budget.power.validate();
  const ReflectionSet set = reflection_set_for(config, ch.elements(), budget.P_R);

  CVec gamma = start ? start->gamma : set.initial_point();
  RVec p = start ? start->p : budget.power.Pmax_w;
  require_feasible(gamma, set);
  require_in_box(p, budget.power);

  RunResult out;
  double gee = gee_mmse(gamma, p, ch, budget.power, budget.bandwidth_hz);
  out.trace.objective_per_iteration.push_back(gee);

  for (int it = 0; it < config.options.outer_max_iter; ++it) {
    out.trace.iterations_used = it + 1;
    SolverOptions opt = config.options;
    opt.seed = mix_seed(config.options.seed, static_cast<std::uint64_t>(it));
    gamma = optimize_gamma_sdr(gamma, p, ch, opt, set).gamma;
    p = optimize_power_mmse(p, gamma, ch, budget.power, opt).p;
    const double next = gee_mmse(gamma, p, ch, budget.power, budget.bandwidth_hz);
    out.trace.objective_per_iteration.push_back(next);
    const double gain = relative_gain(gee, next);
    gee = next;
    if (gain < config.options.outer_tol) {
      out.trace.converged = true;
      break;
    }
  }

  out.allocation.C = mmse_filters(gamma, p, ch);
  out.allocation.gamma = std::move(gamma);
  out.allocation.p = std::move(p);
  evaluate(out.allocation, ch, budget.power, budget.bandwidth_hz);
  return out;
}

Allocation baseline_uniform_random(const ChannelSet& ch, const LinkBudget& budget, std::uint64_t seed,
                                   ReflectionConstraint constraint) {
  const ReflectionSet set(constraint, ch.elements(), budget.P_R);
  Rng rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi);
  const double r = std::sqrt(set.is_global() ? budget.P_R : set.element_cap());
  Allocation a;
  a.gamma.resize(ch.elements());
  for (Eigen::Index n = 0; n < a.gamma.size(); ++n) a.gamma(n) = std::polar(r, phase(rng));
  a.p = budget.power.Pmax_w;
  a.C = mmse_filters(a.gamma, a.p, ch);
  evaluate(a, ch, budget.power, budget.bandwidth_hz);
  return a;
}

RunResult run_method(const ChannelSet& ch, const LinkBudget& budget, const MethodConfig& config,
                     std::uint64_t seed) {
  if (config.method == Method::BaselineUniformRandom) {
    RunResult out;
    out.allocation = baseline_uniform_random(ch, budget, seed, config.reflection_constraint);
    out.trace.objective_per_iteration.push_back(out.allocation.gee_bits_per_joule);
    out.trace.converged = true;
    return out;
  }
  LinkBudget working = budget;
  if (config.objective == Objective::SumRate) working.power.mu.setZero();
  MethodConfig cfg = config;
  cfg.options.seed = mix_seed(config.options.seed, seed);
  RunResult out = config.method == Method::Approach1 ? algorithm_one(ch, working, cfg) : algorithm_two(ch, working, cfg);
  evaluate(out.allocation, ch, budget.power, budget.bandwidth_hz);
  return out;
}

}  // namespace risee
