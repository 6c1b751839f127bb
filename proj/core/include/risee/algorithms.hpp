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

#ifndef RISEE_ALGORITHMS_HPP
#define RISEE_ALGORITHMS_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "risee/kernels.hpp"
#include "risee/metrics.hpp"
#include "risee/scenario.hpp"
#include "risee/surrogates.hpp"
#include "risee/types.hpp"

namespace risee {

enum class Method {
  Approach1,  // alternating filters / reflection SCA / sequential fractional power
  Approach2,  // MMSE-embedded: lifted reflection SCA / sequential fractional power
  BaselineUniformRandom,
};

enum class Objective { Gee, SumRate };

enum class ReflectionConstraint {
  Global,        // ||gamma||^2 <= N P_R
  Local,         // |gamma_n|^2 <= P_R
  LocalModulus,  // |gamma_n| <= P_R
};

std::string to_string(Method m);
std::string to_string(Objective o);
std::string to_string(ReflectionConstraint c);
Method parse_method(const std::string& s);
Objective parse_objective(const std::string& s);
ReflectionConstraint parse_constraint(const std::string& s);

struct MethodConfig {
  Method method = Method::Approach2;
  Objective objective = Objective::Gee;
  ReflectionConstraint reflection_constraint = ReflectionConstraint::Global;
  SolverOptions options;

  // Short identifier such as "approach2/gee/global".
  std::string id() const;
};

// Feasible set of the reflection coefficients and the maps the solvers
// need to stay inside it.
class ReflectionSet {
 public:
  ReflectionSet(ReflectionConstraint kind, int elements, double P_R);

  ReflectionConstraint kind() const { return kind_; }
  bool is_global() const { return kind_ == ReflectionConstraint::Global; }
  int elements() const { return elements_; }
  // N P_R under the global constraint, N times the element cap otherwise.
  double budget() const;
  // Per-element bound on |gamma_n|^2 (infinite under the global constraint).
  double element_cap() const;

  bool contains(const CVec& gamma, double slack = 1e-9) const;
  // Euclidean projection.
  CVec project(const CVec& gamma) const;
  // Maps a randomized candidate to a full-power feasible point: scaled to
  // the budget, or every element to the cap with its phase kept.
  CVec rescale_candidate(const CVec& xi) const;
  // Projection of the lifted variable: trace ball, or PSD with capped
  // diagonal.
  CMat project_lifted(const CMat& X) const;
  // sqrt(cap) on every element: feasible, phases zero.
  CVec initial_point() const;

 private:
  ReflectionConstraint kind_;
  int elements_;
  double P_R_;
};

ReflectionSet reflection_set_for(const MethodConfig& config, int elements, double P_R);

// Constraint adapter for the per-element benchmark. Throws InvalidInput if
// `config` asks for the global constraint.
ReflectionSet apply_local_constraint(const MethodConfig& config, int elements, double P_R);

// Everything besides the channels needed to score an allocation.
struct LinkBudget {
  PowerModel power;
  double bandwidth_hz = 1.0;
  double P_R = 1.0;
};

LinkBudget link_budget(const SystemScenario& scenario);

struct GammaResult {
  CVec gamma;
  ConvergenceTrace trace;
};

struct PowerResult {
  RVec p;
  ConvergenceTrace trace;
};

struct RunResult {
  Allocation allocation;
  ConvergenceTrace trace;  // objective after every outer iteration, bits/J
};

struct StartPoint {
  CVec gamma;
  RVec p;
};

// Maximizes sum_k log2(1 + SINR_k) over gamma with fixed filters by
// sequential concave minorization. Trace holds the true objective.
GammaResult optimize_gamma_sca(const CVec& gamma0, const RVec& p, const FilterBank& C, const ChannelSet& ch,
                               const SolverOptions& options, const ReflectionSet& set);

// Maximizes the fixed-filter GEE over p in [0, Pmax] by sequential
// fractional programming. Trace holds the true GEE in bit/s/Hz/W.
PowerResult optimize_power_sfp(const RVec& p0, const CVec& gamma, const FilterBank& C, const ChannelSet& ch,
                               const PowerModel& power, const SolverOptions& options);

// Filters, reflection, powers in turn until the GEE settles.
RunResult algorithm_one(const ChannelSet& ch, const LinkBudget& budget, const MethodConfig& config,
                        const std::optional<StartPoint>& start = std::nullopt);

// Maximizes the MMSE sum rate over gamma through the lifted variable and
// randomized rank-one recovery. Never returns a point worse than gamma0.
// Trace holds the lifted objective.
GammaResult optimize_gamma_sdr(const CVec& gamma0, const RVec& p, const ChannelSet& ch,
                               const SolverOptions& options, const ReflectionSet& set);

// Maximizes GEE with MMSE filters over p. Trace holds the true value in
// bit/s/Hz/W.
PowerResult optimize_power_mmse(const RVec& p0, const CVec& gamma, const ChannelSet& ch, const PowerModel& power,
                                const SolverOptions& options);

RunResult algorithm_two(const ChannelSet& ch, const LinkBudget& budget, const MethodConfig& config,
                        const std::optional<StartPoint>& start = std::nullopt);

// Full power, random phases at the element cap, MMSE filters.
Allocation baseline_uniform_random(const ChannelSet& ch, const LinkBudget& budget, std::uint64_t seed,
                                   ReflectionConstraint constraint = ReflectionConstraint::Global);

// Dispatches on config.method. The sum-rate objective runs the chosen
// method with mu = 0; the returned allocation is scored with the true
// power model either way.
RunResult run_method(const ChannelSet& ch, const LinkBudget& budget, const MethodConfig& config,
                     std::uint64_t seed = 0);

// Extraction scored by the MMSE sum rate at powers p.
RankOneExtraction extract_rank_one(const CMat& X, const ChannelSet& ch, const RVec& p, const ReflectionSet& set,
                                   int count, std::uint64_t seed);

}  // namespace risee

#endif  // RISEE_ALGORITHMS_HPP
