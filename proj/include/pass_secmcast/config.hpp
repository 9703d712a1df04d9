// SPDX-License-Identifier: Apache-2.0
//
// pass-secmcast: secure multicast beamforming for pinching-antenna systems
// Copyright (C) 2026 The pass-secmcast authors
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

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pass {

inline constexpr double kSpeedOfLight = 2.998e8;  // m/s
inline constexpr double kDefaultNeff = 1.44;
inline constexpr double kDefaultNoiseDbm = -90.0;

// Absolute slack (meters) used when comparing PA coordinates. Grid points are
// computed as i*D_x/(Q-1), so spacing checks must tolerate last-bit rounding.
inline constexpr double kGeomTol = 1e-12;

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Physical and optimization constants of one PASS deployment.
///
/// Derived quantities (wavelengths, wavenumbers, eta, delta_min) are filled by
/// make_config and never edited afterwards.
struct SystemConfig {
  double f_c = 28e9;  // Hz
  double c = kSpeedOfLight;
  double lambda = 0.0;    // free-space wavelength, m
  double k0 = 0.0;        // free-space wavenumber, rad/m
  double n_eff = kDefaultNeff;
  double lambda_g = 0.0;  // guided wavelength, m
  double k_g = 0.0;       // guided wavenumber, rad/m
  double eta = 0.0;       // c^2 / (16 pi^2 f_c^2), m^2
  double h = 5.0;         // deployment height, m
  double D_x = 20.0;
  double D_y = 6.0;
  int M = 4;  // waveguides
  int N = 2;  // PAs per waveguide
  double delta_min = 0.0;  // lambda / 2
  int Q = 1000;            // grid points
  double P_t = 1e-5;       // W
  int G = 1;
};

inline SystemConfig make_config(double f_c, double h, double D_x, double D_y, int M, int N, int Q,
                                double P_t, int G, double n_eff = kDefaultNeff) {
  if (!(f_c > 0.0) || !(h > 0.0) || !(D_x > 0.0) || !(D_y > 0.0) || !(P_t > 0.0) || !(n_eff > 0.0))
    throw std::invalid_argument("make_config: physical dimensions must be positive");
  if (M < 1 || N < 1 || G < 1) throw std::invalid_argument("make_config: M, N, G must be >= 1");
  if (Q < 2) throw std::invalid_argument("make_config: Q must be >= 2");
  if (M < G) throw std::invalid_argument("make_config: M must be >= G");

  SystemConfig cfg;
  cfg.f_c = f_c;
  cfg.c = kSpeedOfLight;
  cfg.lambda = cfg.c / f_c;
  cfg.k0 = 2.0 * std::numbers::pi / cfg.lambda;
  cfg.n_eff = n_eff;
  cfg.lambda_g = cfg.lambda / n_eff;
  cfg.k_g = 2.0 * std::numbers::pi / cfg.lambda_g;
  cfg.eta = cfg.c * cfg.c / (16.0 * std::numbers::pi * std::numbers::pi * f_c * f_c);
  cfg.h = h;
  cfg.D_x = D_x;
  cfg.D_y = D_y;
  cfg.M = M;
  cfg.N = N;
  cfg.delta_min = cfg.lambda / 2.0;
  cfg.Q = Q;
  cfg.P_t = P_t;
  cfg.G = G;
  return cfg;
}

/// y-coordinate of waveguide m (0-based). A single waveguide sits mid-region.
inline double waveguide_y(const SystemConfig& cfg, int m) {
  if (cfg.M == 1) return cfg.D_y / 2.0;
  return static_cast<double>(m) * cfg.D_y / static_cast<double>(cfg.M - 1);
}

/// x-coordinate of grid point i of the Q-point search grid over [0, D_x].
inline double grid_point(const SystemConfig& cfg, int i) {
  if (i == cfg.Q - 1) return cfg.D_x;
  return cfg.D_x * static_cast<double>(i) / static_cast<double>(cfg.Q - 1);
}

// PA x-coordinates (M x N, row m = waveguide m) plus waveguide y-coordinates.
struct PinchingLayout {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  double h = 0.0;

  int M() const { return static_cast<int>(x.rows()); }
  int N() const { return static_cast<int>(x.cols()); }
  Eigen::Vector3d position(int m, int n) const { return {x(m, n), y(m), h}; }
};

/// Layout with the given x-coordinates and the configuration's waveguide rows.
inline PinchingLayout make_layout(const SystemConfig& cfg, const Eigen::MatrixXd& x) {
  PinchingLayout layout;
  layout.x = x;
  layout.y.resize(cfg.M);
  for (int m = 0; m < cfg.M; ++m) layout.y(m) = waveguide_y(cfg, m);
  layout.h = cfg.h;
  return layout;
}

struct LayoutViolation {
  enum class Kind { range, ordering, spacing };
  Kind kind;
  int m = 0;
  int n = 0;
  double value = 0.0;  // offending coordinate (range) or gap (ordering/spacing)
};

inline const char* to_string(LayoutViolation::Kind kind) {
  switch (kind) {
    case LayoutViolation::Kind::range: return "range";
    case LayoutViolation::Kind::ordering: return "ordering";
    case LayoutViolation::Kind::spacing: return "spacing";
  }
  return "unknown";
}

/// Every violated placement constraint; empty iff the layout is feasible.
/// A dimension mismatch is a caller error and throws instead.
inline std::vector<LayoutViolation> validate_layout(const PinchingLayout& layout,
                                                    const SystemConfig& cfg) {
  if (layout.M() != cfg.M || layout.N() != cfg.N || layout.y.size() != cfg.M)
    throw std::invalid_argument("validate_layout: layout is " + std::to_string(layout.M()) + "x" +
                                std::to_string(layout.N()) + ", config expects " +
                                std::to_string(cfg.M) + "x" + std::to_string(cfg.N));
  std::vector<LayoutViolation> out;
  for (int m = 0; m < cfg.M; ++m) {
    for (int n = 0; n < cfg.N; ++n) {
      const double xv = layout.x(m, n);
      if (!std::isfinite(xv) || xv < -kGeomTol || xv > cfg.D_x + kGeomTol)
        out.push_back({LayoutViolation::Kind::range, m, n, xv});
      if (n == 0) continue;
      const double gap = xv - layout.x(m, n - 1);
      if (!(gap > 0.0))
        out.push_back({LayoutViolation::Kind::ordering, m, n, gap});
      else if (gap < cfg.delta_min - kGeomTol)
        out.push_back({LayoutViolation::Kind::spacing, m, n, gap});
    }
  }
  return out;
}

inline bool is_feasible(const PinchingLayout& layout, const SystemConfig& cfg) {
  return validate_layout(layout, cfg).empty();
}

/// Random sorted grid placement honoring delta_min on every waveguide.
/// Deterministic in (cfg, seed) for a given standard library.
inline PinchingLayout random_feasible_layout(const SystemConfig& cfg, std::uint64_t seed) {
  if (cfg.N * cfg.delta_min > cfg.D_x)
    throw std::invalid_argument("random_feasible_layout: N*delta_min exceeds D_x");
  const double step = cfg.D_x / static_cast<double>(cfg.Q - 1);
  // Smallest index gap whose physical spacing clears delta_min.
  const int gap = std::max(1, static_cast<int>(std::ceil((cfg.delta_min - kGeomTol) / step)));
  const int slots = cfg.Q - (cfg.N - 1) * (gap - 1);
  if (slots < cfg.N)
    throw std::invalid_argument("random_feasible_layout: grid too coarse for delta_min spacing");

  std::mt19937_64 rng(seed);
  Eigen::MatrixXd x(cfg.M, cfg.N);
  std::vector<int> picks;
  for (int m = 0; m < cfg.M; ++m) {
    // Floyd's sampling of N distinct slots, then spread by (gap - 1) per rank.
    picks.clear();
    for (int j = slots - cfg.N; j < slots; ++j) {
      std::uniform_int_distribution<int> pick(0, j);
      const int t = pick(rng);
      if (std::find(picks.begin(), picks.end(), t) == picks.end())
        picks.push_back(t);
      else
        picks.push_back(j);
    }
    std::sort(picks.begin(), picks.end());
    for (int n = 0; n < cfg.N; ++n) x(m, n) = grid_point(cfg, picks[n] + n * (gap - 1));
  }
  return make_layout(cfg, x);
}

// ---------------------------------------------------------------------------
// Receivers

struct Bob {
  int group = 0;
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();
  double noise_w = dbm_to_watt(kDefaultNoiseDbm);
};

struct Eve {
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();
  double noise_w = dbm_to_watt(kDefaultNoiseDbm);
};

/// Bobs partitioned into groups plus a common set of Eves. Group ids are
/// 0-based; group_members()[g] lists indices into `bobs`.
struct Scenario {
  int groups = 1;
  std::vector<Bob> bobs;
  std::vector<Eve> eves;

  std::vector<std::vector<int>> group_members() const {
    std::vector<std::vector<int>> members(static_cast<std::size_t>(std::max(groups, 0)));
    for (int i = 0; i < static_cast<int>(bobs.size()); ++i) {
      const int g = bobs[static_cast<std::size_t>(i)].group;
      if (g >= 0 && g < groups) members[static_cast<std::size_t>(g)].push_back(i);
    }
    return members;
  }
};

/// Human-readable list of scenario problems; empty iff valid for cfg.
inline std::vector<std::string> validate_scenario(const Scenario& sc, const SystemConfig& cfg) {
  std::vector<std::string> issues;
  if (sc.groups != cfg.G)
    issues.push_back("scenario has " + std::to_string(sc.groups) + " groups, config has G=" +
                     std::to_string(cfg.G));
  auto in_region = [&](const Eigen::Vector3d& p) {
    return p.x() >= -kGeomTol && p.x() <= cfg.D_x + kGeomTol && p.y() >= -kGeomTol &&
           p.y() <= cfg.D_y + kGeomTol && std::abs(p.z()) <= kGeomTol;
  };
  for (std::size_t i = 0; i < sc.bobs.size(); ++i) {
    const Bob& b = sc.bobs[i];
    if (b.group < 0 || b.group >= sc.groups)
      issues.push_back("bob " + std::to_string(i) + ": group id out of range");
    if (!in_region(b.pos)) issues.push_back("bob " + std::to_string(i) + ": position outside region");
    if (!(b.noise_w > 0.0)) issues.push_back("bob " + std::to_string(i) + ": noise power must be > 0");
  }
  for (std::size_t l = 0; l < sc.eves.size(); ++l) {
    const Eve& e = sc.eves[l];
    if (!in_region(e.pos)) issues.push_back("eve " + std::to_string(l) + ": position outside region");
    if (!(e.noise_w > 0.0)) issues.push_back("eve " + std::to_string(l) + ": noise power must be > 0");
  }
  const auto members = sc.group_members();
  for (std::size_t g = 0; g < members.size(); ++g)
    if (members[g].empty()) issues.push_back("group " + std::to_string(g) + " has no bobs");
  return issues;
}

}  // namespace pass
