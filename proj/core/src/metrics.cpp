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

#include "risee/metrics.hpp"

#include <cmath>
#include <numbers>

namespace risee {

namespace {

void check_sizes(const CVec& gamma, const RVec& p, const ChannelSet& ch) {
  if (gamma.size() != ch.elements()) throw InvalidInput("gamma length must equal the RIS element count");
  if (p.size() != ch.users()) throw InvalidInput("power vector length must equal the user count");
}

}  // namespace

double sinr(int k, const CVec& gamma, const RVec& p, const FilterBank& C, const ChannelSet& ch) {
  check_sizes(gamma, p, ch);
  if (k < 0 || k >= ch.users()) throw InvalidInput("user index out of range");
  const CVec& c = C.at(static_cast<std::size_t>(k));
  const double c_norm2 = c.squaredNorm();
  if (c_norm2 == 0.0) throw InvalidInput("sinr: zero receive filter");
  const double signal = p(k) * std::norm(c.dot(ch.A[k] * gamma));
  double interference = ch.noise_power_w * c_norm2;
  for (int m = 0; m < ch.users(); ++m)
    if (m != k) interference += p(m) * std::norm(c.dot(ch.A[m] * gamma));
  return signal / interference;
}

RatesAndGee rates_and_gee(const CVec& gamma, const RVec& p, const FilterBank& C, const ChannelSet& ch,
                          const PowerModel& power, double bandwidth_hz) {
  check_sizes(gamma, p, ch);
  if (static_cast<int>(C.size()) != ch.users()) throw InvalidInput("one filter per user expected");
  RatesAndGee out;
  out.sinr = RVec::Zero(ch.users());
  for (int k = 0; k < ch.users(); ++k)
    if (C[k].squaredNorm() > 0.0) out.sinr(k) = sinr(k, gamma, p, C, ch);
  out.rates_bps = bandwidth_hz * out.sinr.array().log1p() / std::numbers::ln2;
  out.gee = out.rates_bps.sum() / power.consumed(p);
  return out;
}

void evaluate(Allocation& alloc, const ChannelSet& ch, const PowerModel& power, double bandwidth_hz) {
  auto r = rates_and_gee(alloc.gamma, alloc.p, alloc.C, ch, power, bandwidth_hz);
  alloc.sinr = std::move(r.sinr);
  alloc.rates_bps = std::move(r.rates_bps);
  alloc.gee_bits_per_joule = r.gee;
}

CMat effective_channels(const CVec& gamma, const ChannelSet& ch) {
  CMat V(ch.rx_antennas(), ch.users());
  for (int m = 0; m < ch.users(); ++m) V.col(m) = ch.A[m] * gamma;
  return V;
}

CMat interference_covariance(int k, const CMat& V, const RVec& p, double noise_power_w) {
  CMat M = noise_power_w * CMat::Identity(V.rows(), V.rows());
  for (int m = 0; m < V.cols(); ++m)
    if (m != k && p(m) != 0.0) M.noalias() += p(m) * V.col(m) * V.col(m).adjoint();
  return M;
}

FilterBank mmse_directions(const CVec& gamma, const RVec& p, const ChannelSet& ch) {
  check_sizes(gamma, p, ch);
  const CMat V = effective_channels(gamma, ch);
  FilterBank C;
  C.reserve(static_cast<std::size_t>(ch.users()));
  for (int k = 0; k < ch.users(); ++k) {
    Eigen::LLT<CMat> llt(interference_covariance(k, V, p, ch.noise_power_w));
    C.emplace_back(llt.solve(V.col(k)));
  }
  return C;
}

CVec mmse_filter(int k, const CVec& gamma, const RVec& p, const ChannelSet& ch) {
  check_sizes(gamma, p, ch);
  const CMat V = effective_channels(gamma, ch);
  Eigen::LLT<CMat> llt(interference_covariance(k, V, p, ch.noise_power_w));
  return std::sqrt(p(k)) * llt.solve(V.col(k));
}

FilterBank mmse_filters(const CVec& gamma, const RVec& p, const ChannelSet& ch) {
  FilterBank C = mmse_directions(gamma, p, ch);
  for (int k = 0; k < ch.users(); ++k) C[k] *= std::sqrt(p(k));
  return C;
}

RVec sr_mmse_per_user(const CVec& gamma, const RVec& p, const ChannelSet& ch) {
  check_sizes(gamma, p, ch);
  const CMat V = effective_channels(gamma, ch);
  RVec r(ch.users());
  for (int k = 0; k < ch.users(); ++k) {
    Eigen::LLT<CMat> llt(interference_covariance(k, V, p, ch.noise_power_w));
    const double q = V.col(k).dot(llt.solve(V.col(k))).real();
    r(k) = std::log1p(p(k) * q) / std::numbers::ln2;
  }
  return r;
}

double sr_mmse(const CVec& gamma, const RVec& p, const ChannelSet& ch) {
  return sr_mmse_per_user(gamma, p, ch).sum();
}

double log2_det_identity_plus(const CMat& E) {
  Eigen::SelfAdjointEigenSolver<CMat> es(E, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("log2_det_identity_plus: eigendecomposition failed");
  double total = 0.0;
  for (double ev : es.eigenvalues()) {
    if (!(ev > -1.0)) throw NumericalError("log2_det_identity_plus: I + E is not positive definite");
    total += std::log1p(ev);
  }
  return total / std::numbers::ln2;
}

double log2_det_hpd(const CMat& M) {
  Eigen::LLT<CMat> llt(M);
  if (llt.info() != Eigen::Success) throw NumericalError("log2_det_hpd: matrix is not positive definite");
  const auto diag = llt.matrixLLT().diagonal().real();
  return 2.0 * diag.array().log().sum() / std::numbers::ln2;
}

RVec sr_mmse_determinant_per_user(const CVec& gamma, const RVec& p, const ChannelSet& ch) {
  check_sizes(gamma, p, ch);
  // Both determinants are divided by sigma^2 per dimension; the difference is unchanged.
  const CMat V = effective_channels(gamma, ch) / std::sqrt(ch.noise_power_w);
  const double total = log2_det_identity_plus(interference_covariance(-1, V, p, 0.0));
  RVec r(ch.users());
  for (int k = 0; k < ch.users(); ++k) r(k) = total - log2_det_identity_plus(interference_covariance(k, V, p, 0.0));
  return r;
}

double sr_mmse_determinant(const CVec& gamma, const RVec& p, const ChannelSet& ch) {
  return sr_mmse_determinant_per_user(gamma, p, ch).sum();
}

double gee_mmse(const CVec& gamma, const RVec& p, const ChannelSet& ch, const PowerModel& power,
                double bandwidth_hz) {
  return bandwidth_hz * sr_mmse(gamma, p, ch) / power.consumed(p);
}

}  // namespace risee
