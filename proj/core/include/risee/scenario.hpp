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

#ifndef RISEE_SCENARIO_HPP
#define RISEE_SCENARIO_HPP

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "risee/types.hpp"

namespace risee {

using Rng = std::mt19937_64;

// Deployment and hardware parameters of one uplink network.
// Powers are in dBm, distances in meters, Rician factors linear.
struct SystemScenario {
  int K = 4;    // single-antenna users
  int N_R = 4;  // base-station antennas
  int N = 100;  // RIS elements
  double bandwidth_hz = 20e6;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 10.0;
  double pathloss_exponent = 4.0;
  double ref_gain_db_at_1m = -30.0;
  double user_radius_m = 100.0;
  double bs_ris_distance_m = 50.0;
  double ris_height_m = 15.0;
  double bs_height_m = 10.0;
  std::array<double, 2> user_height_range_m{0.0, 5.0};
  double rice_K_tx = 4.0;  // RIS -> BS
  double rice_K_rx = 2.0;  // users -> RIS
  double P0_dbm = 40.0;
  double P0_ris_dbm = 20.0;
  double Pcn_dbm = 0.0;
  std::vector<double> mu = std::vector<double>(4, 1.0);
  double P_R = 1.0;
  std::vector<double> Pmax_dbm = std::vector<double>(4, 20.0);

  // Throws InvalidInput on the first violated invariant.
  void validate() const;

  // Resizes per-user vectors to K, broadcasting their first entry.
  void broadcast_per_user();
};

void to_json(nlohmann::json& j, const SystemScenario& s);
// Missing keys keep their defaults; `mu` and `Pmax_dbm` accept a scalar.
void from_json(const nlohmann::json& j, SystemScenario& s);

SystemScenario load_scenario(const std::string& path);

// One channel realization. A[k] is G * diag(h[k]).
struct ChannelSet {
  CMat G;               // N_R x N
  std::vector<CVec> h;  // K vectors of length N
  std::vector<CMat> A;  // K matrices N_R x N
  double noise_power_w = 1.0;

  int users() const { return static_cast<int>(A.size()); }
  int rx_antennas() const { return static_cast<int>(G.rows()); }
  int elements() const { return static_cast<int>(G.cols()); }

  void validate() const;
};

// Builds a ChannelSet from G and the per-user RIS channels.
ChannelSet make_channel_set(CMat G, std::vector<CVec> h, double noise_power_w);

struct PowerModel {
  double P_c_w = 0.0;  // static power: P_0 + N * P_cn + P_0,RIS
  RVec mu;
  RVec Pmax_w;

  void validate() const;
  double consumed(const RVec& p) const { return P_c_w + mu.dot(p); }
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

double noise_power(double bandwidth_hz, double psd_dbm_hz, double nf_db);

PowerModel total_static_power(const SystemScenario& scenario);

// Linear power gain ref * d^-exponent, for d >= 1 m.
double path_loss_gain(double distance_m, double exponent, double ref_gain_db_at_1m);

// Unit-modulus rank-one line-of-sight matrix u v^H with per-call random
// steering angles and phase offsets drawn from rng.
CMat los_component(int rows, int cols, Rng& rng);

// amplitude * (sqrt(K/(K+1)) LOS + sqrt(1/(K+1)) NLOS). The LOS part is
// drawn from rng first, then the NLOS entries.
CMat rician_channel(int rows, int cols, double K_factor, double amplitude, Rng& rng);
CMat rician_channel(int rows, int cols, double K_factor, double amplitude, std::uint64_t seed);

std::vector<CMat> build_cascades(const CMat& G, const std::vector<CVec>& h);

struct DropGeometry {
  std::vector<std::array<double, 3>> users;
  std::array<double, 3> ris;
  std::array<double, 3> bs;
};

ChannelSet generate_drop(const SystemScenario& scenario, std::uint64_t seed,
                         DropGeometry* geometry = nullptr);

}  // namespace risee

#endif  // RISEE_SCENARIO_HPP
