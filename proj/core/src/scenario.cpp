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

#include "risee/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

namespace risee {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

void SystemScenario::validate() const {
  require(K >= 1 && N_R >= 1 && N >= 1, "K, N_R and N must be at least 1");
  require(bandwidth_hz > 0, "bandwidth_hz must be positive");
  require(pathloss_exponent > 0, "pathloss_exponent must be positive");
  require(rice_K_tx >= 0 && rice_K_rx >= 0, "Rician factors must be non-negative");
  require(P_R > 0 && P_R <= 1, "P_R must lie in (0, 1]");
  require(user_radius_m >= 0, "user_radius_m must be non-negative");
  require(user_height_range_m[0] <= user_height_range_m[1], "user_height_range_m must be [lo, hi] with lo <= hi");
  require(static_cast<int>(mu.size()) == K, "mu must have K entries");
  require(static_cast<int>(Pmax_dbm.size()) == K, "Pmax_dbm must have K entries");
  for (double m : mu) require(m > 0, "mu entries must be positive");
  for (double pm : Pmax_dbm) require(std::isfinite(pm), "Pmax_dbm entries must be finite");
}

void SystemScenario::broadcast_per_user() {
  const double m0 = mu.empty() ? 1.0 : mu.front();
  const double p0 = Pmax_dbm.empty() ? 20.0 : Pmax_dbm.front();
  if (static_cast<int>(mu.size()) != K) mu.assign(K, m0);
  if (static_cast<int>(Pmax_dbm.size()) != K) Pmax_dbm.assign(K, p0);
}

void to_json(nlohmann::json& j, const SystemScenario& s) {
  j = nlohmann::json{
      {"K", s.K},
      {"N_R", s.N_R},
      {"N", s.N},
      {"bandwidth_hz", s.bandwidth_hz},
      {"noise_psd_dbm_hz", s.noise_psd_dbm_hz},
      {"noise_figure_db", s.noise_figure_db},
      {"pathloss_exponent", s.pathloss_exponent},
      {"ref_gain_db_at_1m", s.ref_gain_db_at_1m},
      {"user_radius_m", s.user_radius_m},
      {"bs_ris_distance_m", s.bs_ris_distance_m},
      {"ris_height_m", s.ris_height_m},
      {"bs_height_m", s.bs_height_m},
      {"user_height_range_m", s.user_height_range_m},
      {"rice_K_tx", s.rice_K_tx},
      {"rice_K_rx", s.rice_K_rx},
      {"P0_dbm", s.P0_dbm},
      {"P0_ris_dbm", s.P0_ris_dbm},
      {"Pcn_dbm", s.Pcn_dbm},
      {"mu", s.mu},
      {"P_R", s.P_R},
      {"Pmax_dbm", s.Pmax_dbm},
  };
}

void from_json(const nlohmann::json& j, SystemScenario& s) {
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  auto get_per_user = [&j](const char* key, std::vector<double>& field) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (v.is_number())
      field.assign(1, v.get<double>());
    else
      v.get_to(field);
  };
  get("K", s.K);
  get("N_R", s.N_R);
  get("N", s.N);
  get("bandwidth_hz", s.bandwidth_hz);
  get("noise_psd_dbm_hz", s.noise_psd_dbm_hz);
  get("noise_figure_db", s.noise_figure_db);
  get("pathloss_exponent", s.pathloss_exponent);
  get("ref_gain_db_at_1m", s.ref_gain_db_at_1m);
  get("user_radius_m", s.user_radius_m);
  get("bs_ris_distance_m", s.bs_ris_distance_m);
  get("ris_height_m", s.ris_height_m);
  get("bs_height_m", s.bs_height_m);
  get("user_height_range_m", s.user_height_range_m);
  get("rice_K_tx", s.rice_K_tx);
  get("rice_K_rx", s.rice_K_rx);
  get("P0_dbm", s.P0_dbm);
  get("P0_ris_dbm", s.P0_ris_dbm);
  get("Pcn_dbm", s.Pcn_dbm);
  get_per_user("mu", s.mu);
  get("P_R", s.P_R);
  get_per_user("Pmax_dbm", s.Pmax_dbm);
  // Explicit arrays of the wrong length are left for validate() to reject.
  auto explicit_array = [&j](const char* key) { return j.contains(key) && j.at(key).is_array(); };
  if (!explicit_array("mu") && static_cast<int>(s.mu.size()) != s.K) s.mu.assign(s.K, s.mu.empty() ? 1.0 : s.mu.front());
  if (!explicit_array("Pmax_dbm") && static_cast<int>(s.Pmax_dbm.size()) != s.K)
    s.Pmax_dbm.assign(s.K, s.Pmax_dbm.empty() ? 20.0 : s.Pmax_dbm.front());
}

SystemScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open scenario file: " + path);
  SystemScenario s = nlohmann::json::parse(in).get<SystemScenario>();
  s.validate();
  return s;
}

void ChannelSet::validate() const {
  require(noise_power_w > 0 && std::isfinite(noise_power_w), "noise power must be positive");
  require(h.size() == A.size(), "one RIS channel per cascade expected");
  for (std::size_t k = 0; k < A.size(); ++k) {
    require(A[k].rows() == G.rows() && A[k].cols() == G.cols(), "cascade shape mismatch");
    require(h[k].size() == G.cols(), "RIS channel length mismatch");
    require(A[k].allFinite() && h[k].allFinite(), "non-finite channel entry");
  }
  require(G.allFinite(), "non-finite channel entry");
}

ChannelSet make_channel_set(CMat G, std::vector<CVec> h, double noise_power_w) {
  ChannelSet ch;
  ch.A = build_cascades(G, h);
  ch.G = std::move(G);
  ch.h = std::move(h);
  ch.noise_power_w = noise_power_w;
  ch.validate();
  return ch;
}

void PowerModel::validate() const {
  require(P_c_w > 0 && std::isfinite(P_c_w), "static power P_c must be positive");
  require(mu.size() == Pmax_w.size(), "mu and Pmax must have equal length");
  require((mu.array() >= 0).all(), "mu entries must be non-negative");
  require((Pmax_w.array() > 0).all(), "Pmax entries must be positive");
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

double noise_power(double bandwidth_hz, double psd_dbm_hz, double nf_db) {
  require(bandwidth_hz > 0, "bandwidth must be positive");
  return dbm_to_watt(psd_dbm_hz + nf_db) * bandwidth_hz;
}

PowerModel total_static_power(const SystemScenario& scenario) {
  PowerModel pm;
  pm.P_c_w = dbm_to_watt(scenario.P0_dbm) + scenario.N * dbm_to_watt(scenario.Pcn_dbm) +
             dbm_to_watt(scenario.P0_ris_dbm);
  pm.mu = Eigen::Map<const RVec>(scenario.mu.data(), static_cast<Eigen::Index>(scenario.mu.size()));
  pm.Pmax_w.resize(static_cast<Eigen::Index>(scenario.Pmax_dbm.size()));
  for (std::size_t k = 0; k < scenario.Pmax_dbm.size(); ++k)
    pm.Pmax_w(static_cast<Eigen::Index>(k)) = dbm_to_watt(scenario.Pmax_dbm[k]);
  return pm;
}

double path_loss_gain(double distance_m, double exponent, double ref_gain_db_at_1m) {
  require(distance_m >= 1.0, "path-loss model requires distance >= 1 m");
  return std::pow(10.0, ref_gain_db_at_1m / 10.0) * std::pow(distance_m, -exponent);
}

CMat los_component(int rows, int cols, Rng& rng) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi / 2, std::numbers::pi / 2);
  std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi);
  const double theta_r = angle(rng), theta_c = angle(rng);
  const double phi_r = phase(rng), phi_c = phase(rng);
  // Half-wavelength spacing: phase step pi * sin(theta) per element.
  CVec u(rows), v(cols);
  for (int i = 0; i < rows; ++i) u(i) = std::polar(1.0, phi_r + std::numbers::pi * i * std::sin(theta_r));
  for (int i = 0; i < cols; ++i) v(i) = std::polar(1.0, phi_c + std::numbers::pi * i * std::sin(theta_c));
  return u * v.adjoint();
}

CMat rician_channel(int rows, int cols, double K_factor, double amplitude, Rng& rng) {
  require(K_factor >= 0, "Rician factor must be non-negative");
  require(amplitude >= 0, "amplitude must be non-negative");
  const CMat los = los_component(rows, cols, rng);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  CMat nlos(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      nlos(r, c) = cdouble(re, im);
    }
  const double w_los = std::sqrt(K_factor / (K_factor + 1.0));
  const double w_nlos = std::sqrt(1.0 / (K_factor + 1.0));
  return amplitude * (w_los * los + w_nlos * nlos);
}

CMat rician_channel(int rows, int cols, double K_factor, double amplitude, std::uint64_t seed) {
  Rng rng(seed);
  return rician_channel(rows, cols, K_factor, amplitude, rng);
}

std::vector<CMat> build_cascades(const CMat& G, const std::vector<CVec>& h) {
  std::vector<CMat> A;
  A.reserve(h.size());
  for (const CVec& hk : h) {
    if (hk.size() != G.cols()) throw InvalidInput("build_cascades: h_k length must equal the column count of G");
    A.emplace_back(G * hk.asDiagonal());
  }
  return A;
}

ChannelSet generate_drop(const SystemScenario& scenario, std::uint64_t seed, DropGeometry* geometry) {
  scenario.validate();
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::array<double, 3> ris{0.0, 0.0, scenario.ris_height_m};
  const std::array<double, 3> bs{scenario.bs_ris_distance_m, 0.0, scenario.bs_height_m};
  std::vector<std::array<double, 3>> users(static_cast<std::size_t>(scenario.K));
  const auto [h_lo, h_hi] = scenario.user_height_range_m;
  for (auto& u : users) {
    // Users closer than 1 m to the RIS are re-drawn.
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) throw InvalidInput("cannot place users at least 1 m from the RIS");
      const double r = scenario.user_radius_m * std::sqrt(unit(rng));
      const double az = 2 * std::numbers::pi * unit(rng);
      u = {r * std::cos(az), r * std::sin(az), h_lo + (h_hi - h_lo) * unit(rng)};
      if (distance(u, ris) >= 1.0) break;
    }
  }

  const double g_bs = path_loss_gain(distance(bs, ris), scenario.pathloss_exponent, scenario.ref_gain_db_at_1m);
  CMat G = rician_channel(scenario.N_R, scenario.N, scenario.rice_K_tx, std::sqrt(g_bs), rng);
  std::vector<CVec> h;
  h.reserve(users.size());
  for (const auto& u : users) {
    const double g = path_loss_gain(distance(u, ris), scenario.pathloss_exponent, scenario.ref_gain_db_at_1m);
    h.emplace_back(rician_channel(scenario.N, 1, scenario.rice_K_rx, std::sqrt(g), rng).col(0));
  }

  if (geometry != nullptr) *geometry = DropGeometry{users, ris, bs};
  return make_channel_set(std::move(G), std::move(h),
                          noise_power(scenario.bandwidth_hz, scenario.noise_psd_dbm_hz, scenario.noise_figure_db));
}

}  // namespace risee
