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

#include "risee/surrogates.hpp"

#include <cmath>
#include <numbers>

namespace risee {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void require_power_length(const RVec& p, int users) {
  if (p.size() != users) throw InvalidInput("power vector length must equal the user count");
}

}  // namespace

double ratio_log_bound(double x, double y, double xb, double yb) {
  if (!(x > 0 && y > 0 && xb > 0 && yb > 0)) throw InvalidInput("ratio_log_bound: arguments must be positive");
  const double r = xb / yb;
  return std::log1p(r) / kLn2 + r * (2.0 * std::sqrt(x / xb) - (x + y) / (xb + yb) - 1.0) / kLn2;
}

double sum_rate_fixed_filters(const CVec& gamma, const RVec& p, const FilterBank& C, const ChannelSet& ch) {
  double total = 0.0;
  for (int k = 0; k < ch.users(); ++k)
    if (C.at(static_cast<std::size_t>(k)).squaredNorm() > 0.0) total += std::log1p(sinr(k, gamma, p, C, ch));
  return total / kLn2;
}

GammaSurrogateCoeffs build_gamma_surrogate(const CVec& gamma_bar, const RVec& p, const FilterBank& C,
                                           const ChannelSet& ch, QuadraticWeight weight) {
  const int K = ch.users();
  const int N = ch.elements();
  require_power_length(p, K);
  if (gamma_bar.size() != N) throw InvalidInput("gamma length must equal the RIS element count");
  if (static_cast<int>(C.size()) != K) throw InvalidInput("one filter per user expected");

  GammaSurrogateCoeffs co;
  co.gamma_bar = gamma_bar;
  co.A_bar = co.B_bar = co.D_bar = co.E_bar = co.F_bar = co.I = RVec::Zero(K);
  co.b = CVec::Zero(N);
  co.Q = CMat::Zero(N, N);

  // Row m of `proj` holds (A_m^H c_k)^H, so proj * gamma gives c_k^H A_m gamma.
  CMat proj(K, N);
  for (int k = 0; k < K; ++k) {
    const CVec& c = C[k];
    const double c_norm2 = c.squaredNorm();
    if (p(k) <= 0.0 || c_norm2 == 0.0) continue;

    for (int m = 0; m < K; ++m) proj.row(m) = c.adjoint() * ch.A[m];
    const CVec u = proj * gamma_bar;
    const cdouble s_bar = u(k);
    const double s_abs = std::abs(s_bar);
    if (s_abs == 0.0) throw DegenerateExpansion("gamma surrogate expanded where c_k^H A_k gamma vanishes");

    const double noise = ch.noise_power_w * c_norm2;
    double interference = noise;
    for (int m = 0; m < K; ++m)
      if (m != k) interference += p(m) * std::norm(u(m));
    const double x_bar = p(k) * s_abs * s_abs;

    co.I(k) = interference;
    co.A_bar(k) = std::log1p(x_bar / interference) / kLn2;
    co.B_bar(k) = x_bar / interference;
    co.D_bar(k) = 2.0 / s_abs;
    co.E_bar(k) = weight == QuadraticWeight::Tight ? 1.0 / (interference + x_bar) : 1.0 / interference;
    co.F_bar(k) = co.E_bar(k) * noise + 1.0;

    // The bound holds in nats; B_bar / ln 2 converts the correction to bits.
    const double scale = co.B_bar(k) / kLn2;
    co.b += (scale * co.D_bar(k) / s_abs) * s_bar * proj.row(k).adjoint();
    for (int m = 0; m < K; ++m)
      if (p(m) > 0.0) co.Q.noalias() += (scale * co.E_bar(k) * p(m)) * proj.row(m).adjoint() * proj.row(m);
    co.constant += co.A_bar(k) - scale * co.F_bar(k);
  }
  co.Q = 0.5 * (co.Q + co.Q.adjoint()).eval();
  return co;
}

double gamma_surrogate(const CVec& gamma, const GammaSurrogateCoeffs& co) {
  return co.constant + co.b.dot(gamma).real() - gamma.dot(co.Q * gamma).real();
}

CVec gamma_surrogate_gradient(const CVec& gamma, const GammaSurrogateCoeffs& co) {
  return co.b - 2.0 * (co.Q * gamma);
}

// ---------------------------------------------------------------------------

FixedFilterGains fixed_filter_gains(const CVec& gamma, const FilterBank& C, const ChannelSet& ch) {
  const int K = ch.users();
  if (static_cast<int>(C.size()) != K) throw InvalidInput("one filter per user expected");
  const CMat V = effective_channels(gamma, ch);
  FixedFilterGains g{RMat::Zero(K, K), RVec::Zero(K)};
  for (int k = 0; k < K; ++k) {
    g.d(k) = ch.noise_power_w * C[k].squaredNorm();
    g.a.row(k) = (C[k].adjoint() * V).cwiseAbs2();
  }
  return g;
}

double gee_fixed_filters(const RVec& p, const FixedFilterGains& gains, const PowerModel& power) {
  const int K = static_cast<int>(gains.d.size());
  require_power_length(p, K);
  double rate = 0.0;
  for (int k = 0; k < K; ++k) {
    if (!gains.active(k)) continue;
    const double interference = gains.d(k) + gains.a.row(k).dot(p) - p(k) * gains.a(k, k);
    rate += std::log1p(p(k) * gains.a(k, k) / interference);
  }
  return rate / kLn2 / power.consumed(p);
}

PowerSurrogateGee::PowerSurrogateGee(RVec p_bar, FixedFilterGains gains, PowerModel power)
    : p_bar_(std::move(p_bar)), gains_(std::move(gains)), power_(std::move(power)) {
  require_power_length(p_bar_, static_cast<int>(gains_.d.size()));
  f_bar_ = interference_logsum(p_bar_);
  grad_f_bar_ = interference_logsum_gradient(p_bar_);
}

// Both log-sums are normalized by d_k: sum_k log2(1 + (...)/d_k). The
// dropped constant sum_k log2 d_k is common to both and cancels.
double PowerSurrogateGee::signal_logsum(const RVec& p) const {
  double total = 0.0;
  for (int k = 0; k < p.size(); ++k)
    if (gains_.active(k)) total += std::log1p(gains_.a.row(k).dot(p) / gains_.d(k));
  return total / kLn2;
}

RVec PowerSurrogateGee::signal_logsum_gradient(const RVec& p) const {
  RVec g = RVec::Zero(p.size());
  for (int k = 0; k < p.size(); ++k)
    if (gains_.active(k)) g += gains_.a.row(k).transpose() / ((gains_.d(k) + gains_.a.row(k).dot(p)) * kLn2);
  return g;
}

double PowerSurrogateGee::interference_logsum(const RVec& p) const {
  double total = 0.0;
  for (int k = 0; k < p.size(); ++k)
    if (gains_.active(k)) total += std::log1p((gains_.a.row(k).dot(p) - p(k) * gains_.a(k, k)) / gains_.d(k));
  return total / kLn2;
}

RVec PowerSurrogateGee::interference_logsum_gradient(const RVec& p) const {
  RVec g = RVec::Zero(p.size());
  for (int k = 0; k < p.size(); ++k) {
    if (!gains_.active(k)) continue;
    RVec row = gains_.a.row(k).transpose();
    row(k) = 0.0;
    g += row / ((gains_.d(k) + row.dot(p)) * kLn2);
  }
  return g;
}

double PowerSurrogateGee::numerator(const RVec& p) const {
  return signal_logsum(p) - f_bar_ - grad_f_bar_.dot(p - p_bar_);
}

RVec PowerSurrogateGee::numerator_gradient(const RVec& p) const { return signal_logsum_gradient(p) - grad_f_bar_; }

double PowerSurrogateGee::value(const RVec& p) const { return numerator(p) / power_.consumed(p); }

RVec PowerSurrogateGee::gradient(const RVec& p) const {
  const double D = power_.consumed(p);
  return numerator_gradient(p) / D - (numerator(p) / (D * D)) * power_.mu;
}

// ---------------------------------------------------------------------------

namespace {

// sum_k log2|I + sum_{m != k} p_m v_m v_m^H| for normalized channels V.
double normalized_interference_logdet(const RVec& p, const CMat& V) {
  double total = 0.0;
  for (int k = 0; k < V.cols(); ++k) total += log2_det_identity_plus(interference_covariance(k, V, p, 0.0));
  return total;
}

RVec normalized_interference_logdet_gradient(const RVec& p, const CMat& V) {
  const int K = static_cast<int>(V.cols());
  RVec g = RVec::Zero(K);
  for (int k = 0; k < K; ++k) {
    Eigen::LLT<CMat> llt(interference_covariance(k, V, p, 1.0));
    for (int j = 0; j < K; ++j)
      if (j != k) g(j) += V.col(j).dot(llt.solve(V.col(j))).real() / kLn2;
  }
  return g;
}

}  // namespace

double interference_logdet_sum(const RVec& p, const CVec& gamma, const ChannelSet& ch) {
  require_power_length(p, ch.users());
  const CMat V = effective_channels(gamma, ch) / std::sqrt(ch.noise_power_w);
  return normalized_interference_logdet(p, V) +
         ch.users() * ch.rx_antennas() * std::log2(ch.noise_power_w);
}

RVec interference_logdet_sum_gradient(const RVec& p, const CVec& gamma, const ChannelSet& ch) {
  require_power_length(p, ch.users());
  const CMat V = effective_channels(gamma, ch) / std::sqrt(ch.noise_power_w);
  return normalized_interference_logdet_gradient(p, V);
}

PowerSurrogateGeeMmse::PowerSurrogateGeeMmse(RVec p_bar, const CVec& gamma, const ChannelSet& ch,
                                             PowerModel power)
    : p_bar_(std::move(p_bar)),
      V_(effective_channels(gamma, ch) / std::sqrt(ch.noise_power_w)),
      power_(std::move(power)) {
  require_power_length(p_bar_, ch.users());
  f_bar_ = normalized_interference_logdet(p_bar_, V_);
  grad_f_bar_ = normalized_interference_logdet_gradient(p_bar_, V_);
}

double PowerSurrogateGeeMmse::numerator(const RVec& p) const {
  const double total = log2_det_identity_plus(interference_covariance(-1, V_, p, 0.0));
  return V_.cols() * total - f_bar_ - grad_f_bar_.dot(p - p_bar_);
}

RVec PowerSurrogateGeeMmse::numerator_gradient(const RVec& p) const {
  Eigen::LLT<CMat> llt(interference_covariance(-1, V_, p, 1.0));
  const CMat W = llt.solve(V_);
  RVec g(V_.cols());
  for (int j = 0; j < V_.cols(); ++j) g(j) = V_.cols() * V_.col(j).dot(W.col(j)).real() / kLn2;
  return g - grad_f_bar_;
}

double PowerSurrogateGeeMmse::value(const RVec& p) const { return numerator(p) / power_.consumed(p); }

RVec PowerSurrogateGeeMmse::gradient(const RVec& p) const {
  const double D = power_.consumed(p);
  return numerator_gradient(p) / D - (numerator(p) / (D * D)) * power_.mu;
}

double gee_mmse_spectral(const RVec& p, const CVec& gamma, const ChannelSet& ch, const PowerModel& power) {
  return sr_mmse(gamma, p, ch) / power.consumed(p);
}

// ---------------------------------------------------------------------------

namespace {

// T_m = A_m X A_m^H / sigma^2 for every user.
std::vector<CMat> lifted_terms(const CMat& X, const ChannelSet& ch) {
  std::vector<CMat> T;
  T.reserve(ch.A.size());
  for (const CMat& A : ch.A) T.emplace_back(A * X * A.adjoint() / ch.noise_power_w);
  return T;
}

// diagonal * I + sum_{m != skip} p_m T_m
CMat lifted_total(const std::vector<CMat>& T, const RVec& p, int skip, double diagonal) {
  CMat S = diagonal * CMat::Identity(T.front().rows(), T.front().cols());
  for (int m = 0; m < static_cast<int>(T.size()); ++m)
    if (m != skip) S += p(m) * T[m];
  return S;
}

void check_lifted(const CMat& X, const RVec& p, const ChannelSet& ch) {
  require_power_length(p, ch.users());
  if (X.rows() != ch.elements() || X.cols() != ch.elements())
    throw InvalidInput("lifted variable must be N x N");
}

}  // namespace

double lifted_G1(const CMat& X, const RVec& p, const ChannelSet& ch) {
  check_lifted(X, p, ch);
  return ch.users() * log2_det_identity_plus(lifted_total(lifted_terms(X, ch), p, -1, 0.0));
}

double lifted_G2(const CMat& X, const RVec& p, const ChannelSet& ch) {
  check_lifted(X, p, ch);
  const auto T = lifted_terms(X, ch);
  double total = 0.0;
  for (int k = 0; k < ch.users(); ++k) total += log2_det_identity_plus(lifted_total(T, p, k, 0.0));
  return total;
}

CMat lifted_G1_gradient(const CMat& X, const RVec& p, const ChannelSet& ch) {
  check_lifted(X, p, ch);
  const CMat S_inv = lifted_total(lifted_terms(X, ch), p, -1, 1.0).llt().solve(
      CMat::Identity(ch.rx_antennas(), ch.rx_antennas()));
  CMat g = CMat::Zero(ch.elements(), ch.elements());
  for (int m = 0; m < ch.users(); ++m)
    if (p(m) != 0.0) g.noalias() += p(m) * ch.A[m].adjoint() * S_inv * ch.A[m];
  g *= ch.users() / (ch.noise_power_w * kLn2);
  return 0.5 * (g + g.adjoint());
}

CMat lifted_G2_gradient(const CMat& X, const RVec& p, const ChannelSet& ch) {
  check_lifted(X, p, ch);
  const auto T = lifted_terms(X, ch);
  const int K = ch.users();
  const CMat I = CMat::Identity(ch.rx_antennas(), ch.rx_antennas());
  std::vector<CMat> W_inv;
  W_inv.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) W_inv.emplace_back(lifted_total(T, p, k, 1.0).llt().solve(I));
  CMat g = CMat::Zero(ch.elements(), ch.elements());
  for (int m = 0; m < K; ++m) {
    if (p(m) == 0.0) continue;
    CMat weight = CMat::Zero(I.rows(), I.cols());
    for (int k = 0; k < K; ++k)
      if (k != m) weight += W_inv[k];
    g.noalias() += p(m) * ch.A[m].adjoint() * weight * ch.A[m];
  }
  g /= ch.noise_power_w * kLn2;
  return 0.5 * (g + g.adjoint());
}

double sr_mmse_lifted(const CMat& X, const RVec& p, const ChannelSet& ch) {
  return lifted_G1(X, p, ch) - lifted_G2(X, p, ch);
}

void require_hermitian_psd(const CMat& X, const char* what) {
  if (X.rows() != X.cols()) throw InvalidInput(std::string(what) + ": matrix must be square");
  const double scale = std::max(X.norm(), 1e-300);
  if ((X - X.adjoint()).norm() > 1e-9 * scale) throw InvalidInput(std::string(what) + ": matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(X, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (ev.size() > 0 && ev(0) < -1e-9 * std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1))))
    throw InvalidInput(std::string(what) + ": matrix is not positive semidefinite");
}

SrSurrogateX::SrSurrogateX(CMat X_bar, RVec p, const ChannelSet& ch)
    : X_bar_(std::move(X_bar)), p_(std::move(p)), ch_(&ch) {
  require_hermitian_psd(X_bar_, "SrSurrogateX");
  g2_bar_ = lifted_G2(X_bar_, p_, ch);
  grad_g2_bar_ = lifted_G2_gradient(X_bar_, p_, ch);
}

double SrSurrogateX::value(const CMat& X) const {
  return lifted_G1(X, p_, *ch_) - g2_bar_ - real_inner(grad_g2_bar_, X - X_bar_);
}

CMat SrSurrogateX::gradient(const CMat& X) const { return lifted_G1_gradient(X, p_, *ch_) - grad_g2_bar_; }

}  // namespace risee
