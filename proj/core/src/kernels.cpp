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

#include "risee/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace risee {

BallSolution max_linear_minus_quadratic_ball(const CVec& b, const CMat& Q, double radius2) {
  if (!(radius2 > 0)) throw InvalidInput("ball solver: radius2 must be positive");
  if (Q.rows() != Q.cols() || Q.rows() != b.size()) throw InvalidInput("ball solver: dimension mismatch");
  const Eigen::Index n = b.size();

  BallSolution sol;
  if (b.squaredNorm() == 0.0) {
    sol.gamma = CVec::Zero(n);
    return sol;
  }

  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (Q + Q.adjoint()));
  RVec ev = es.eigenvalues();
  const double q_scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev(0) < -1e-9 * q_scale) throw InvalidInput("ball solver: Q is not positive semidefinite");
  ev = ev.cwiseMax(0.0);
  const CVec beta = es.eigenvectors().adjoint() * b;
  const RVec beta2 = beta.cwiseAbs2();

  auto gamma_at = [&](double lambda) -> CVec {
    CVec w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = 2.0 * (ev(i) + lambda);
      w(i) = d > 0.0 ? beta(i) / d : cdouble(0.0);
    }
    return es.eigenvectors() * w;
  };
  auto norm2_at = [&](double lambda) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = 2.0 * (ev(i) + lambda);
      if (d > 0.0)
        s += beta2(i) / (d * d);
      else if (beta2(i) > 0.0)
        return std::numeric_limits<double>::infinity();
    }
    return s;
  };

  // Unconstrained maximizer (minimum-norm if Q is singular), when it fits.
  const double ev_max = ev(n - 1);
  const double null_thr = 1e-14 * ev_max;
  bool unbounded = ev_max == 0.0;
  for (Eigen::Index i = 0; i < n && !unbounded; ++i)
    if (ev(i) <= null_thr && beta2(i) > 1e-28 * b.squaredNorm()) unbounded = true;
  if (!unbounded) {
    CVec w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = ev(i) > null_thr ? beta(i) / (2.0 * ev(i)) : cdouble(0.0);
    const CVec g0 = es.eigenvectors() * w;
    if (g0.squaredNorm() <= radius2) {
      sol.gamma = g0;
      sol.lambda = 0.0;
      sol.value = b.dot(g0).real() - g0.dot(Q * g0).real();
      return sol;
    }
  }

  // ||gamma(lambda)|| is decreasing; at hi it is at most ||b|| / (2 hi) = radius.
  double lo = 0.0;
  double hi = b.norm() / (2.0 * std::sqrt(radius2));
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double nm = norm2_at(mid);
    (nm > radius2 ? lo : hi) = mid;
    if (nm <= radius2 && radius2 - nm <= 1e-12 * radius2) break;
  }
  sol.lambda = hi;
  sol.gamma = gamma_at(hi);
  // Feasible side of the bracket; trim rounding excess.
  const double g2 = sol.gamma.squaredNorm();
  if (g2 > radius2) sol.gamma *= std::sqrt(radius2 / g2);
  sol.value = b.dot(sol.gamma).real() - sol.gamma.dot(Q * sol.gamma).real();
  return sol;
}

AscentResult<RVec> box_projected_ascent(const ScalarField& f, const Box& box, const RVec& start,
                                        const SolverOptions& options) {
  if (box.lower.size() != start.size() || box.upper.size() != start.size())
    throw InvalidInput("box_projected_ascent: dimension mismatch");
  if (((box.upper - box.lower).array() < 0).any()) throw InvalidInput("box_projected_ascent: empty box");
  AscentProblem<RVec> problem{f.value, f.gradient, [&box](const RVec& x) { return box.project(x); }};
  return projected_ascent(problem, start, options);
}

DinkelbachResult dinkelbach(const ScalarField& numerator, const AffineFunction& denominator, const Box& box,
                            const RVec& start, const SolverOptions& options, const ConcaveMaximizer& inner) {
  if (denominator.slope.size() != start.size()) throw InvalidInput("dinkelbach: dimension mismatch");
  double d_min = denominator.offset;
  for (Eigen::Index i = 0; i < start.size(); ++i)
    d_min += std::min(denominator.slope(i) * box.lower(i), denominator.slope(i) * box.upper(i));
  if (!(d_min > 0)) throw InvalidInput("dinkelbach: denominator must be positive on the box");

  const ConcaveMaximizer solve =
      inner ? inner : ConcaveMaximizer([](const ScalarField& f, const Box& b, const RVec& s, const SolverOptions& o) {
        return box_projected_ascent(f, b, s, o).argmax;
      });

  DinkelbachResult out;
  RVec p = box.project(start);
  double lambda = numerator.value(p) / denominator(p);
  if (!std::isfinite(lambda)) throw NumericalError("dinkelbach: non-finite ratio at start");
  out.lambdas.push_back(lambda);
  out.trace.objective_per_iteration.push_back(lambda);

  for (int it = 0; it < options.dinkelbach_max_iter; ++it) {
    const double lam = lambda;
    ScalarField parametric{
        [&](const RVec& x) { return numerator.value(x) - lam * denominator(x); },
        [&](const RVec& x) { return RVec(numerator.gradient(x) - lam * denominator.slope); },
    };
    const RVec p_new = solve(parametric, box, p, options);
    const double n_new = numerator.value(p_new);
    const double d_new = denominator(p_new);
    const double residual = n_new - lam * d_new;
    const double ratio = n_new / d_new;
    out.trace.iterations_used = it + 1;
    if (ratio >= lambda) {
      p = p_new;
      lambda = ratio;
    }
    out.lambdas.push_back(lambda);
    out.trace.objective_per_iteration.push_back(lambda);
    if (residual <= options.dinkelbach_tol * std::max(std::abs(n_new), std::abs(lam * d_new))) {
      out.trace.converged = true;
      break;
    }
  }
  out.argmax = std::move(p);
  out.value = lambda;
  return out;
}

RVec project_capped_simplex(const RVec& v, double budget) {
  RVec x = v.cwiseMax(0.0);
  if (!(x.sum() > budget)) return x;
  // Find tau with sum max(v_i - tau, 0) = budget.
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    const double t = (cumulative - budget) / static_cast<double>(i + 1);
    if (i + 1 == sorted.size() || sorted[i + 1] <= t) {
      tau = t;
      break;
    }
  }
  return (x.array() - tau).cwiseMax(0.0).matrix();
}

CMat project_psd_trace_ball(const CMat& X, double budget) {
  if (X.rows() != X.cols()) throw InvalidInput("project_psd_trace_ball: matrix must be square");
  if (!(budget >= 0)) throw InvalidInput("project_psd_trace_ball: budget must be non-negative");
  const double scale = std::max(X.norm(), 1e-300);
  if ((X - X.adjoint()).norm() > 1e-9 * scale) throw InvalidInput("project_psd_trace_ball: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (X + X.adjoint()));
  const RVec ev = project_capped_simplex(es.eigenvalues(), budget);
  CMat out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

CMat project_psd_diagonal_cap(const CMat& X, double cap, double tol, int max_iter) {
  const double inf = std::numeric_limits<double>::infinity();
  auto clip_diagonal = [cap](CMat Y) {
    for (Eigen::Index i = 0; i < Y.rows(); ++i) Y(i, i) = std::min(Y(i, i).real(), cap);
    return Y;
  };
  CMat x = 0.5 * (X + X.adjoint());
  CMat p = CMat::Zero(X.rows(), X.cols());
  CMat q = CMat::Zero(X.rows(), X.cols());
  CMat y = x;
  for (int it = 0; it < max_iter; ++it) {
    y = project_psd_trace_ball(x + p, inf);
    p = x + p - y;
    const CMat x_next = clip_diagonal(y + q);
    q = y + q - x_next;
    const double change = (x_next - x).norm();
    x = x_next;
    if (change <= tol * std::max(1.0, x.norm())) break;
  }
  // y is PSD; scaling keeps it PSD and enforces the diagonal cap exactly.
  const double d_max = y.diagonal().real().maxCoeff();
  if (d_max > cap) y *= cap / d_max;
  return y;
}

AscentResult<CMat> psd_projected_ascent(const MatrixField& f, const CMat& start, double budget,
                                        const SolverOptions& options, const MatrixProjector& projector) {
  AscentProblem<CMat> problem{
      f.value, f.gradient,
      projector ? projector : MatrixProjector([budget](const CMat& X) { return project_psd_trace_ball(X, budget); })};
  return projected_ascent(problem, start, options, options.inner_tol);
}

RankOneExtraction extract_rank_one(const CMat& X, const VectorObjective& objective, double budget, int count,
                                   std::uint64_t seed, const VectorRescale& rescale) {
  const Eigen::Index n = X.rows();
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (X + X.adjoint()));
  const RVec ev = es.eigenvalues().cwiseMax(0.0);
  const CVec principal = es.eigenvectors().col(n - 1);
  const VectorRescale to_budget = rescale ? rescale : VectorRescale([budget](const CVec& g) -> CVec {
    const double nrm = g.norm();
    return nrm > 0.0 ? CVec(g * (std::sqrt(budget) / nrm)) : g;
  });

  RankOneExtraction out;
  const double lead = ev(n - 1);
  if (n == 1 || ev(n - 2) < 1e-8 * lead || lead == 0.0) {
    out.rank_one = true;
    out.gamma = std::sqrt(std::max(X.trace().real(), 0.0)) * principal;
    out.objective = objective(out.gamma);
    return out;
  }

  out.gamma = to_budget(principal);
  out.objective = objective(out.gamma);
  out.chosen_candidate = 0;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  const CMat root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
  CVec z(n);
  for (int c = 1; c <= count; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      z(i) = cdouble(re, im);
    }
    const CVec candidate = to_budget(root * z);
    const double value = objective(candidate);
    if (value > out.objective) {
      out.gamma = candidate;
      out.objective = value;
      out.chosen_candidate = c;
    }
  }
  return out;
}

}  // namespace risee
