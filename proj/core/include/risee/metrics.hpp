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

#ifndef RISEE_METRICS_HPP
#define RISEE_METRICS_HPP

#include <vector>

#include "risee/scenario.hpp"
#include "risee/types.hpp"

namespace risee {

using FilterBank = std::vector<CVec>;  // one receive filter c_k per user

// Decision variables and the metrics they induce.
struct Allocation {
  CVec gamma;
  RVec p;
  FilterBank C;
  RVec sinr;
  RVec rates_bps;
  double gee_bits_per_joule = 0.0;

  double sum_rate_bps() const { return rates_bps.sum(); }
};

// SINR of user k after filter C[k]. Throws InvalidInput for a zero filter.
double sinr(int k, const CVec& gamma, const RVec& p, const FilterBank& C, const ChannelSet& ch);

struct RatesAndGee {
  RVec sinr;
  RVec rates_bps;
  double gee = 0.0;
};

// Per-user rates B log2(1 + SINR_k) and GEE = sum rate / (P_c + mu^T p).
// A zero filter carries no signal and yields a zero rate.
RatesAndGee rates_and_gee(const CVec& gamma, const RVec& p, const FilterBank& C, const ChannelSet& ch,
                          const PowerModel& power, double bandwidth_hz);

// Fills sinr, rates and GEE of `alloc` from its (gamma, p, C).
void evaluate(Allocation& alloc, const ChannelSet& ch, const PowerModel& power, double bandwidth_hz);

// Effective channels v_m = A_m gamma, one column per user.
CMat effective_channels(const CVec& gamma, const ChannelSet& ch);

// sigma^2 I + sum_{m != k} p_m v_m v_m^H.
CMat interference_covariance(int k, const CMat& V, const RVec& p, double noise_power_w);

// sqrt(p_k) M_k^{-1} A_k gamma. Zero when p_k = 0.
CVec mmse_filter(int k, const CVec& gamma, const RVec& p, const ChannelSet& ch);
FilterBank mmse_filters(const CVec& gamma, const RVec& p, const ChannelSet& ch);

// M_k^{-1} A_k gamma: the MMSE direction without the sqrt(p_k) scale, so it
// stays nonzero for silent users. Same SINR as mmse_filter whenever p_k > 0.
FilterBank mmse_directions(const CVec& gamma, const RVec& p, const ChannelSet& ch);

// Per-user log2(1 + p_k v_k^H M_k^{-1} v_k).
RVec sr_mmse_per_user(const CVec& gamma, const RVec& p, const ChannelSet& ch);
double sr_mmse(const CVec& gamma, const RVec& p, const ChannelSet& ch);

// Same quantity through log-determinants:
// log2|sigma^2 I + sum_m p_m v_m v_m^H| - log2|M_k|, per user.
RVec sr_mmse_determinant_per_user(const CVec& gamma, const RVec& p, const ChannelSet& ch);
double sr_mmse_determinant(const CVec& gamma, const RVec& p, const ChannelSet& ch);

double gee_mmse(const CVec& gamma, const RVec& p, const ChannelSet& ch, const PowerModel& power,
                double bandwidth_hz);

// log2|I + E| for Hermitian E through the eigenvalues of E, which keeps
// full relative accuracy when E is small. Throws NumericalError if I + E is
// not positive definite.
double log2_det_identity_plus(const CMat& E);

// log2 of the determinant of a Hermitian positive-definite matrix.
// Throws NumericalError when the Cholesky factorization fails.
double log2_det_hpd(const CMat& M);

}  // namespace risee

#endif  // RISEE_METRICS_HPP
