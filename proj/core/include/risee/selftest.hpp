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

#ifndef RISEE_SELFTEST_HPP
#define RISEE_SELFTEST_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "risee/scenario.hpp"
#include "risee/types.hpp"

// Invariant and oracle checks shared by `risee check` and the acceptance
// suite. Every suite is deterministic given its seed.

namespace risee::selftest {

struct SuiteResult {
  std::string name;
  int passed = 0;
  int total = 0;
  double seconds = 0.0;
  double worst = 0.0;  // worst observed error (or slack) across checks
  std::vector<std::string> failures;  // first few failing cases

  bool ok() const { return total > 0 && passed == total; }
  void record(bool ok, const std::string& what);
};

// Small deployment used by the checks: default geometry, reduced sizes.
SystemScenario desk_scenario(int N, int K, int N_R);

// Uniform point in the ball ||x||^2 <= radius2.
CVec random_ball_point(int n, double radius2, Rng& rng);
// Standard circular complex Gaussian vector / matrix.
CVec random_cn(int n, Rng& rng);
CMat random_cn(int rows, int cols, Rng& rng);
// Hermitian PSD matrix of random rank with trace uniform in (0, budget].
CMat random_psd(int n, double budget, Rng& rng);
RVec random_box_point(const RVec& upper, Rng& rng);

// Channels with unit noise and CN(0, 1) entries; used next to realistic
// drops to exercise higher SNRs.
ChannelSet random_unit_channels(int N, int K, int N_R, Rng& rng);

// Tightness and minorization of the four surrogates.
SuiteResult surrogate_suite(int drops, int points, int N, int K, int N_R, std::uint64_t seed);
// Analytic gradients against central differences, absolute tolerance.
SuiteResult gradient_suite(int instances, double tolerance, std::uint64_t seed);
// SINR form against determinant form of the MMSE sum rate.
SuiteResult determinant_suite(int instances, std::uint64_t seed);
// MMSE filter against random filters on SINR.
SuiteResult mmse_dominance_suite(int instances, int filters, std::uint64_t seed);
// Non-decreasing traces and convergence of both algorithms.
SuiteResult convergence_suite(int drops, int N, int K, int N_R, std::uint64_t seed);
// Ball solver KKT, PSD projection, Dinkelbach test problem.
SuiteResult kernel_suite(int instances, std::uint64_t seed);

struct CheckOptions {
  int N = 16;
  int K = 2;
  int N_R = 2;
  int drops = 20;
  std::uint64_t seed = 7;
};

// Runs `suite`, turning an exception into a failed check.
SuiteResult guarded(const std::string& name, const std::function<SuiteResult()>& suite);

// Runs every suite at desk scale.
std::vector<SuiteResult> run_all(const CheckOptions& options);

}  // namespace risee::selftest

#endif  // RISEE_SELFTEST_HPP
