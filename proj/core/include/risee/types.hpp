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

#ifndef RISEE_TYPES_HPP
#define RISEE_TYPES_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace risee {

using cdouble = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

// Thrown for malformed inputs: bad dimensions, out-of-range parameters,
// infeasible starting points.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when an iterative routine meets a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tolerances and iteration caps shared by every solver.
// Tolerances are relative to the magnitude of the quantity they compare,
// since objective values span many decades across scenarios.
struct SolverOptions {
  double outer_tol = 1e-6;
  int outer_max_iter = 100;
  double inner_tol = 1e-10;
  int inner_max_iter = 500;
  double dinkelbach_tol = 1e-10;
  int dinkelbach_max_iter = 50;
  int randomization_count = 100;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

// Objective values recorded once before the first update and once after
// every iteration.
struct ConvergenceTrace {
  std::vector<double> objective_per_iteration;
  bool converged = false;
  int iterations_used = 0;

  // Largest drop between consecutive entries, relative to the entry magnitude.
  // Zero for a non-decreasing sequence.
  double worst_relative_decrease() const;
  bool non_decreasing(double relative_slack) const {
    return worst_relative_decrease() <= relative_slack;
  }
};

// Re <a, b> for real or complex Eigen objects of equal shape.
template <typename A, typename B>
double real_inner(const A& a, const B& b) {
  return (a.array().conjugate() * b.array()).real().sum();
}

}  // namespace risee

#endif  // RISEE_TYPES_HPP
