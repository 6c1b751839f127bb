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

#ifndef RISEE_KERNELS_HPP
#define RISEE_KERNELS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

#include "risee/types.hpp"

namespace risee {

// ---------------------------------------------------------------------------
// Ball-constrained concave quadratic:
//   maximize Re(b^H g) - g^H Q g  subject to ||g||^2 <= radius2.

struct BallSolution {
  CVec gamma;
  double lambda = 0.0;  // multiplier of the norm constraint
  double value = 0.0;
};

// Exact solution through the eigendecomposition of Q and bisection on the
// multiplier. Throws InvalidInput if Q has an eigenvalue below
// -1e-9 * max(1, ||Q||) or radius2 <= 0.
BallSolution max_linear_minus_quadratic_ball(const CVec& b, const CMat& Q, double radius2);

// ---------------------------------------------------------------------------
// Projected gradient ascent with Armijo backtracking along the projection
// arc. Works for any Eigen vector/matrix type with Re<.,.> as inner product.
//
// The first trial step moves by max(1, ||x||) along the gradient; the step
// doubles after every accepted step and shrinks by options.armijo_shrink on
// rejection. Iteration stops when the accepted
// move falls below options.inner_tol relative to the iterate, when the
// objective gain falls below objective_rel_tol relative to the objective
// (or stalls to machine precision), or at options.inner_max_iter.

template <typename Point>
struct AscentProblem {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  std::function<Point(const Point&)> project;
};

template <typename Point>
struct AscentResult {
  Point argmax;
  double value = 0.0;
  ConvergenceTrace trace;
};

template <typename Point>
AscentResult<Point> projected_ascent(const AscentProblem<Point>& problem, const Point& start,
                                     const SolverOptions& options, double objective_rel_tol = 0.0) {
  AscentResult<Point> out;
  Point x = problem.project(start);
  double fx = problem.value(x);
  if (!std::isfinite(fx)) throw NumericalError("projected_ascent: non-finite objective at start");
  out.trace.objective_per_iteration.push_back(fx);

  double step = 0.0;
  for (int it = 0; it < options.inner_max_iter; ++it) {
    const Point g = problem.gradient(x);
    if (!g.allFinite()) throw NumericalError("projected_ascent: non-finite gradient");
    if (g.norm() == 0.0) {
      out.trace.converged = true;
      break;
    }
    if (step == 0.0) step = std::max(1.0, x.norm()) / g.norm();
    bool accepted = false;
    Point x_new;
    double f_new = fx;
    for (int shrink = 0; shrink < 200; ++shrink) {
      x_new = problem.project(x + step * g);
      const Point move = x_new - x;
      if (move.norm() <= std::numeric_limits<double>::epsilon() * (1.0 + x.norm())) break;
      f_new = problem.value(x_new);
      if (std::isfinite(f_new) && f_new >= fx + options.armijo_c * real_inner(g, move)) {
        accepted = true;
        break;
      }
      step *= options.armijo_shrink;
    }
    out.trace.iterations_used = it + 1;
    if (!accepted || f_new < fx) {
      // No ascent direction left at machine precision.
      out.trace.converged = true;
      break;
    }
    const double move_norm = (x_new - x).norm();
    const double gain = f_new - fx;
    x = std::move(x_new);
    fx = f_new;
    out.trace.objective_per_iteration.push_back(fx);
    if (move_norm <= options.inner_tol * std::max(1.0, x.norm()) ||
        gain <= std::max(objective_rel_tol, 4 * std::numeric_limits<double>::epsilon()) * std::abs(fx)) {
      out.trace.converged = true;
      break;
    }
    step *= 2.0;
  }
  out.argmax = std::move(x);
  out.value = fx;
  return out;
}

struct Box {
  RVec lower;
  RVec upper;

  RVec project(const RVec& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
  bool contains(const RVec& x, double slack = 0.0) const {
    return ((x - lower).array() >= -slack).all() && ((upper - x).array() >= -slack).all();
  }
};

struct ScalarField {
  std::function<double(const RVec&)> value;
  std::function<RVec(const RVec&)> gradient;
};

// Maximizes a concave f over the box. Throws NumericalError on non-finite
// values or gradients.
AscentResult<RVec> box_projected_ascent(const ScalarField& f, const Box& box, const RVec& start,
                                        const SolverOptions& options);

// ---------------------------------------------------------------------------
// Dinkelbach's method for max N(p) / D(p) over a box, N concave, D affine
// and positive.

struct AffineFunction {
  RVec slope;
  double offset = 0.0;

  double operator()(const RVec& p) const { return offset + slope.dot(p); }
};

// Maximizes a concave function over the box, warm-started.
using ConcaveMaximizer =
    std::function<RVec(const ScalarField& f, const Box& box, const RVec& start, const SolverOptions& options)>;

struct DinkelbachResult {
  RVec argmax;
  double value = 0.0;
  std::vector<double> lambdas;  // ratio after every parametric solve
  ConvergenceTrace trace;
};

// Iterates p <- argmax N(p) - lambda D(p), lambda <- N(p)/D(p) until
// |N(p) - lambda D(p)| <= dinkelbach_tol * |N(p)|. The lambda sequence is
// non-decreasing. Throws InvalidInput if D is not positive on the box.
DinkelbachResult dinkelbach(const ScalarField& numerator, const AffineFunction& denominator, const Box& box,
                            const RVec& start, const SolverOptions& options,
                            const ConcaveMaximizer& inner = {});

// ---------------------------------------------------------------------------
// PSD cone with trace budget.

// Frobenius projection onto {X Hermitian PSD, tr X <= budget}. `budget` may
// be +infinity. Throws InvalidInput if X deviates from Hermitian by more than
// 1e-9 relative.
CMat project_psd_trace_ball(const CMat& X, double budget);

// Euclidean projection of v onto {x >= 0, sum x <= budget}.
RVec project_capped_simplex(const RVec& v, double budget);

// Frobenius projection onto {X PSD, X_nn <= cap for all n} by Dykstra's
// alternating projections, followed by a scale-down that makes the result
// exactly feasible.
CMat project_psd_diagonal_cap(const CMat& X, double cap, double tol = 1e-8, int max_iter = 1000);

using MatrixProjector = std::function<CMat(const CMat&)>;

struct MatrixField {
  std::function<double(const CMat&)> value;
  std::function<CMat(const CMat&)> gradient;
};

// Projected ascent over {X PSD, tr X <= budget}, or over the set defined by
// `projector` when one is given. Objective stops on relative change below
// options.inner_tol.
AscentResult<CMat> psd_projected_ascent(const MatrixField& f, const CMat& start, double budget,
                                        const SolverOptions& options, const MatrixProjector& projector = {});

// ---------------------------------------------------------------------------
// Rank-one recovery from a relaxed solution.

struct RankOneExtraction {
  CVec gamma;
  double objective = 0.0;
  bool rank_one = false;   // principal eigenvector returned directly
  int chosen_candidate = 0;  // 0 is the scaled principal eigenvector
};

using VectorObjective = std::function<double(const CVec&)>;
using VectorRescale = std::function<CVec(const CVec&)>;

// If the second eigenvalue is below 1e-8 times the first, returns the
// principal eigenvector scaled to sqrt(tr X). Otherwise scores the principal
// eigenvector and `count` Gaussian draws with covariance X, each passed
// through `rescale`, and returns the best under `objective` (first index on
// ties). The default rescale sets ||gamma||^2 = budget.
RankOneExtraction extract_rank_one(const CMat& X, const VectorObjective& objective, double budget, int count,
                                   std::uint64_t seed, const VectorRescale& rescale = {});

}  // namespace risee

#endif  // RISEE_KERNELS_HPP
