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

#ifndef RISEE_SURROGATES_HPP
#define RISEE_SURROGATES_HPP

#include "risee/metrics.hpp"
#include "risee/scenario.hpp"
#include "risee/types.hpp"

// Concave (or concave-over-affine) minorizers used by the sequential
// methods. Each one is built at an expansion point, equals its true
// objective there, and lies below it everywhere else on the feasible set.
//
// Units: rate-like quantities are in bit/s/Hz (no bandwidth factor) and
// efficiency-like ones in bit/s/Hz/W. Gradients with respect to complex
// variables are returned as g = df/dRe + i df/dIm, so that
// f(z + t g) > f(z) for small t > 0 and df = Re<g, dz>.

namespace risee {

// Raised when the modulus term of the gamma surrogate is expanded at a point
// where it vanishes.
class DegenerateExpansion : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Lower bound on log2(1 + x/y) that is tight at (x, y) = (xb, yb):
//   log2(1 + xb/yb) + (xb/yb) (2 sqrt(x/xb) - (x + y)/(xb + yb) - 1) / ln 2.
// All arguments must be positive.
double ratio_log_bound(double x, double y, double xb, double yb);

// ---------------------------------------------------------------------------
// Reflection-coefficient surrogate with fixed filters.

// Weight on the quadratic signal-plus-interference term.
enum class QuadraticWeight {
  Tight,      // 1 / (I_k + p_k |c_k^H A_k gamma_bar|^2): tight at gamma_bar
  Published,  // 1 / I_k: kept to show the loss of tightness
};

struct GammaSurrogateCoeffs {
  CVec gamma_bar;
  // Per-user constants of the bound; all zero for users that carry no signal
  // (p_k = 0 or c_k = 0), whose rate is identically zero.
  RVec A_bar, B_bar, D_bar, E_bar, F_bar, I;
  // Assembled form: constant + Re(b^H gamma) - gamma^H Q gamma.
  CVec b;
  CMat Q;
  double constant = 0.0;
};

// sum_k log2(1 + SINR_k) for fixed filters; zero filters contribute nothing.
double sum_rate_fixed_filters(const CVec& gamma, const RVec& p, const FilterBank& C, const ChannelSet& ch);

// Throws DegenerateExpansion if an active user has c_k^H A_k gamma_bar = 0.
GammaSurrogateCoeffs build_gamma_surrogate(const CVec& gamma_bar, const RVec& p, const FilterBank& C,
                                           const ChannelSet& ch,
                                           QuadraticWeight weight = QuadraticWeight::Tight);

double gamma_surrogate(const CVec& gamma, const GammaSurrogateCoeffs& coeffs);
CVec gamma_surrogate_gradient(const CVec& gamma, const GammaSurrogateCoeffs& coeffs);

// ---------------------------------------------------------------------------
// Power surrogates. Both are ratios of a concave numerator to the affine
// consumed power P_c + mu^T p.

// a(k, m) = |c_k^H A_m gamma|^2, d(k) = sigma^2 ||c_k||^2.
struct FixedFilterGains {
  RMat a;
  RVec d;

  bool active(int k) const { return d(k) > 0.0; }
};

FixedFilterGains fixed_filter_gains(const CVec& gamma, const FilterBank& C, const ChannelSet& ch);

// sum_k log2(1 + p_k a_kk / (d_k + sum_{m != k} p_m a_km)) / (P_c + mu^T p).
double gee_fixed_filters(const RVec& p, const FixedFilterGains& gains, const PowerModel& power);

// The interference log-sum sum_k log2(d_k + sum_{m != k} p_m a_km) is
// replaced by its tangent plane at p_bar.
class PowerSurrogateGee {
 public:
  PowerSurrogateGee(RVec p_bar, FixedFilterGains gains, PowerModel power);

  double numerator(const RVec& p) const;
  RVec numerator_gradient(const RVec& p) const;
  double value(const RVec& p) const;
  RVec gradient(const RVec& p) const;

  // The two concave log-sums the true numerator is the difference of.
  double signal_logsum(const RVec& p) const;
  RVec signal_logsum_gradient(const RVec& p) const;
  double interference_logsum(const RVec& p) const;
  RVec interference_logsum_gradient(const RVec& p) const;

  const PowerModel& power() const { return power_; }

 private:
  RVec p_bar_;
  FixedFilterGains gains_;
  PowerModel power_;
  double f_bar_ = 0.0;
  RVec grad_f_bar_;
};

// F(p) = sum_k log2|sigma^2 I + sum_{m != k} p_m v_m v_m^H| with v_m = A_m gamma.
double interference_logdet_sum(const RVec& p, const CVec& gamma, const ChannelSet& ch);
RVec interference_logdet_sum_gradient(const RVec& p, const CVec& gamma, const ChannelSet& ch);

// (K log2|sigma^2 I + sum_m p_m v_m v_m^H| - F(p_bar) - grad F(p_bar)^T (p - p_bar))
//   / (P_c + mu^T p)
class PowerSurrogateGeeMmse {
 public:
  PowerSurrogateGeeMmse(RVec p_bar, const CVec& gamma, const ChannelSet& ch, PowerModel power);

  double numerator(const RVec& p) const;
  RVec numerator_gradient(const RVec& p) const;
  double value(const RVec& p) const;
  RVec gradient(const RVec& p) const;

  const PowerModel& power() const { return power_; }

 private:
  RVec p_bar_;
  CMat V_;  // effective channels scaled by 1/sigma
  PowerModel power_;
  double f_bar_ = 0.0;  // F(p_bar) without the K N_R log2 sigma^2 offset
  RVec grad_f_bar_;
};

// sum_k log2(1 + SINR_k) with MMSE filters, divided by P_c + mu^T p.
double gee_mmse_spectral(const RVec& p, const CVec& gamma, const ChannelSet& ch, const PowerModel& power);

// ---------------------------------------------------------------------------
// Lifted sum rate in X = gamma gamma^H.
//   G1(X) = K log2|I + sum_m p_m A_m X A_m^H / sigma^2|
//   G2(X) = sum_k log2|I + sum_{m != k} p_m A_m X A_m^H / sigma^2|
// Both omit the common K N_R log2 sigma^2 term, which cancels in G1 - G2.

double lifted_G1(const CMat& X, const RVec& p, const ChannelSet& ch);
double lifted_G2(const CMat& X, const RVec& p, const ChannelSet& ch);
CMat lifted_G1_gradient(const CMat& X, const RVec& p, const ChannelSet& ch);
CMat lifted_G2_gradient(const CMat& X, const RVec& p, const ChannelSet& ch);

// G1(X) - G2(X); equals sr_mmse(gamma) at X = gamma gamma^H.
double sr_mmse_lifted(const CMat& X, const RVec& p, const ChannelSet& ch);

// G1(X) - G2(X_bar) - Re tr(grad G2(X_bar)^H (X - X_bar)). Concave in X.
class SrSurrogateX {
 public:
  // Throws InvalidInput if X_bar is not Hermitian PSD.
  SrSurrogateX(CMat X_bar, RVec p, const ChannelSet& ch);

  double value(const CMat& X) const;
  CMat gradient(const CMat& X) const;

 private:
  CMat X_bar_;
  RVec p_;
  const ChannelSet* ch_;
  double g2_bar_ = 0.0;
  CMat grad_g2_bar_;
};

// Throws InvalidInput unless X is Hermitian (1e-9 relative) with no
// eigenvalue below -1e-9 relative to its spectral radius.
void require_hermitian_psd(const CMat& X, const char* what);

}  // namespace risee

#endif  // RISEE_SURROGATES_HPP
