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

#include "risee/types.hpp"

#include <algorithm>
#include <cmath>

namespace risee {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidInput(what);
}

}  // namespace

void SolverOptions::validate() const {
  require(outer_tol > 0 && inner_tol > 0 && dinkelbach_tol > 0, "solver tolerances must be positive");
  require(outer_max_iter >= 1 && inner_max_iter >= 1 && dinkelbach_max_iter >= 1,
          "iteration caps must be at least 1");
  require(randomization_count >= 0, "randomization_count must be non-negative");
  require(armijo_c > 0 && armijo_c < 1, "armijo_c must lie in (0, 1)");
  require(armijo_shrink > 0 && armijo_shrink < 1, "armijo_shrink must lie in (0, 1)");
}

double ConvergenceTrace::worst_relative_decrease() const {
  double worst = 0.0;
  const auto& v = objective_per_iteration;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double scale = std::max({std::abs(v[i - 1]), std::abs(v[i]), 1e-300});
    worst = std::max(worst, (v[i - 1] - v[i]) / scale);
  }
  return worst;
}

}  // namespace risee
