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

#include "pass_secmcast/channel.hpp"
#include "pass_secmcast/config.hpp"
#include "pass_secmcast/metrics.hpp"
#include "pass_secmcast/solvers.hpp"
#include "pass_secmcast/txbf_single.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace pass {

/// FNV-1a over the raw bytes of the PA coordinates.
inline std::uint64_t layout_hash(const PinchingLayout& layout) {
  std::uint64_t h = 1469598103934665603ULL;
  for (Eigen::Index i = 0; i < layout.x.size(); ++i) {
    unsigned char bytes[sizeof(double)];
    const double v = layout.x.data()[i];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

/// Noise-normalized received amplitudes t_r = h_r^T w / sigma_r for one beam,
/// kept in sync with the layout as elements move.
struct AmplitudeState {
  std::vector<cplx> bob;
  std::vector<cplx> eve;
};

inline AmplitudeState amplitudes(const ChannelSet& cs, const Scenario& sc, const Eigen::VectorXcd& w) {
  AmplitudeState a;
  for (std::size_t k = 0; k < cs.bob.size(); ++k)
    a.bob.push_back(cs.bob[k].cwiseProduct(w).sum() / std::sqrt(sc.bobs[k].noise_w));
  for (std::size_t l = 0; l < cs.eve.size(); ++l)
    a.eve.push_back(cs.eve[l].cwiseProduct(w).sum() / std::sqrt(sc.eves[l].noise_w));
  return a;
}

/// Exact single-group min secrecy rate (unclamped) from amplitudes.
inline double single_group_rate_unclamped(const AmplitudeState& a) {
  double leak = 0.0;
  for (const cplx& t : a.eve) leak = std::max(leak, std::log2(1.0 + std::norm(t)));
  double r = std::numeric_limits<double>::infinity();
  for (const cplx& t : a.bob) r = std::min(r, std::log2(1.0 + std::norm(t)) - leak);
  return std::isfinite(r) ? r : 0.0;
}

/// Fixed and variable parts of every receiver's amplitude with respect to
/// PA (m, n): t_r = S_r + A_r(x).
struct ElementDecomposition {
  int m = 0;
  int n = 0;
  double y = 0.0;
  double h = 0.0;
  double amp = 0.0;  // sqrt(eta / N)
  double k0 = 0.0;
  double k_g = 0.0;
  cplx w_m = 0.0;
  std::vector<Eigen::Vector3d> bob_pos, eve_pos;
  std::vector<double> bob_scale, eve_scale;  // 1 / sigma
  std::vector<cplx> S_bob, S_eve;

  /// D_r(x): distance between the PA at x and a receiver.
  double distance(double x, const Eigen::Vector3d& rx) const {
    return (Eigen::Vector3d(x, y, h) - rx).norm();
  }
  cplx A(double x, const Eigen::Vector3d& rx, double scale) const {
    const double d = distance(x, rx);
    return std::polar(amp * scale / d, -(k0 * d + k_g * x)) * w_m;
  }
};

inline ElementDecomposition decompose(const PinchingLayout& layout, const Scenario& sc,
                                      const Eigen::VectorXcd& w, const AmplitudeState& amps,
                                      const SystemConfig& cfg, int m, int n) {
  ElementDecomposition d;
  d.m = m;
  d.n = n;
  d.y = layout.y(m);
  d.h = layout.h;
  d.amp = std::sqrt(cfg.eta / layout.N());
  d.k0 = cfg.k0;
  d.k_g = cfg.k_g;
  d.w_m = w(m);
  const double x = layout.x(m, n);
  for (std::size_t k = 0; k < sc.bobs.size(); ++k) {
    d.bob_pos.push_back(sc.bobs[k].pos);
    d.bob_scale.push_back(1.0 / std::sqrt(sc.bobs[k].noise_w));
    d.S_bob.push_back(amps.bob[k] - d.A(x, d.bob_pos.back(), d.bob_scale.back()));
  }
  for (std::size_t l = 0; l < sc.eves.size(); ++l) {
    d.eve_pos.push_back(sc.eves[l].pos);
    d.eve_scale.push_back(1.0 / std::sqrt(sc.eves[l].noise_w));
    d.S_eve.push_back(amps.eve[l] - d.A(x, d.eve_pos.back(), d.eve_scale.back()));
  }
  return d;
}

/// [min_k (|A_k|^2 + 2 Re S_k^* A_k) - max_l (|A_l|^2 + 2 Re S_l^* A_l)]^+;
/// the |S|^2 constants are dropped and an empty eve set contributes 0.
inline double element_objective(const ElementDecomposition& d, double x) {
  auto term = [&](const cplx& S, const Eigen::Vector3d& rx, double scale) {
    const cplx a = d.A(x, rx, scale);
    return std::norm(a) + 2.0 * std::real(std::conj(S) * a);
  };
  double bob = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < d.S_bob.size(); ++k) bob = std::min(bob, term(d.S_bob[k], d.bob_pos[k], d.bob_scale[k]));
  double eve = 0.0;
  if (!d.S_eve.empty()) {
    eve = -std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < d.S_eve.size(); ++l) eve = std::max(eve, term(d.S_eve[l], d.eve_pos[l], d.eve_scale[l]));
  }
  return std::max(0.0, bob - eve);
}

/// Grid indices for PA (m, n) that keep row m ordered with delta_min spacing,
/// using the same comparisons as validate_layout.
inline std::vector<int> feasible_grid(const PinchingLayout& layout, const SystemConfig& cfg, int m, int n) {
  std::vector<int> out;
  const int N = layout.N();
  for (int i = 0; i < cfg.Q; ++i) {
    const double x = grid_point(cfg, i);
    if (n > 0) {
      const double gap = x - layout.x(m, n - 1);
      if (!(gap > 0.0) || gap < cfg.delta_min - kGeomTol) continue;
    }
    if (n + 1 < N) {
      const double gap = layout.x(m, n + 1) - x;
      if (!(gap > 0.0) || gap < cfg.delta_min - kGeomTol) continue;
    }
    out.push_back(i);
  }
  return out;
}

struct ElementUpdate {
  double x = 0.0;          // position after the update
  double candidate = 0.0;  // grid argmax of the surrogate
  double surrogate = 0.0;  // surrogate value at the candidate
  bool accepted = false;
};

/// Grid argmax of `objective` over the feasible grid of (m, n); the ascending
/// scan with strict comparison keeps the smallest x on ties.
template <class Objective>
std::optional<std::pair<double, double>> grid_argmax(const PinchingLayout& layout, const SystemConfig& cfg,
                                                     int m, int n, Objective&& objective) {
  const std::vector<int> grid = feasible_grid(layout, cfg, m, n);
  if (grid.empty()) return std::nullopt;
  double best_x = grid_point(cfg, grid.front());
  double best_v = objective(best_x);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double x = grid_point(cfg, grid[i]);
    const double v = objective(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  return std::make_pair(best_x, best_v);
}

/// Moves PA (m, n) to the surrogate's grid argmax when the exact
/// (unclamped) min secrecy rate does not decrease. Updates layout and amps.
inline ElementUpdate update_element(PinchingLayout& layout, int m, int n, const Scenario& sc,
                                    const Eigen::VectorXcd& w, AmplitudeState& amps, const SystemConfig& cfg) {
  const ElementDecomposition d = decompose(layout, sc, w, amps, cfg, m, n);
  ElementUpdate up;
  up.x = layout.x(m, n);
  const auto best = grid_argmax(layout, cfg, m, n, [&](double x) { return element_objective(d, x); });
  if (!best) {
    up.candidate = up.x;
    return up;
  }
  up.candidate = best->first;
  up.surrogate = best->second;
  if (up.candidate == up.x) return up;

  AmplitudeState trial;
  for (std::size_t k = 0; k < d.S_bob.size(); ++k)
    trial.bob.push_back(d.S_bob[k] + d.A(up.candidate, d.bob_pos[k], d.bob_scale[k]));
  for (std::size_t l = 0; l < d.S_eve.size(); ++l)
    trial.eve.push_back(d.S_eve[l] + d.A(up.candidate, d.eve_pos[l], d.eve_scale[l]));
  if (single_group_rate_unclamped(trial) >= single_group_rate_unclamped(amps)) {
    layout.x(m, n) = up.candidate;
    amps = std::move(trial);
    up.x = up.candidate;
    up.accepted = true;
  }
  return up;
}

/// Lexicographic sweep over all PAs; returns the number of accepted moves.
inline int sweep_elements(PinchingLayout& layout, const Scenario& sc, const Eigen::VectorXcd& w,
                          AmplitudeState& amps, const SystemConfig& cfg) {
  int moves = 0;
  for (int m = 0; m < layout.M(); ++m)
    for (int n = 0; n < layout.N(); ++n)
      if (update_element(layout, m, n, sc, w, amps, cfg).accepted) ++moves;
  return moves;
}

// ---------------------------------------------------------------------------
// Alternating optimization driver

enum class TxbfMethod { sdr, dinkelbach_admm, mm_sdr, socp };

inline const char* to_string(TxbfMethod m) {
  switch (m) {
    case TxbfMethod::sdr: return "sdr";
    case TxbfMethod::dinkelbach_admm: return "dinkelbach_admm";
    case TxbfMethod::mm_sdr: return "mm_sdr";
    case TxbfMethod::socp: return "socp";
  }
  return "unknown";
}

struct AoOptions {
  int max_iters = 50;
  double eps = 1e-3;
  std::uint64_t seed = 0;
  solvers::SolverSettings solver;
  DinkelbachOptions dinkelbach;
  std::optional<PinchingLayout> initial_layout;
  std::optional<std::vector<Eigen::VectorXcd>> initial_beams;  // physical
};

struct AoTraceRow {
  int iteration = 0;  // 0 is the initial point
  double rate = 0.0;
  double rate_unclamped = 0.0;
  std::uint64_t layout_hash = 0;
  double txbf_ms = 0.0;
  double pinch_ms = 0.0;
};

struct AoResult {
  std::vector<Eigen::VectorXcd> beams;  // physical, one per group
  std::optional<PinchingLayout> layout;  // empty for fixed-array systems
  SecrecyReport report;
  std::vector<AoTraceRow> trace;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

inline std::vector<Eigen::VectorXcd> gaussian_beams(std::mt19937_64& rng, int G, Eigen::Index M, double P_t) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  std::vector<Eigen::VectorXcd> out(static_cast<std::size_t>(G), Eigen::VectorXcd(M));
  double n2 = 0.0;
  for (auto& w : out) {
    for (Eigen::Index i = 0; i < M; ++i) w(i) = {nd(rng), nd(rng)};
    n2 += w.squaredNorm();
  }
  for (auto& w : out) w *= std::sqrt(P_t / n2);
  return out;
}

// Phase of b rotated onto a (SINRs are invariant), then the power-normalized gap.
inline double beam_change(const std::vector<Eigen::VectorXcd>& a, std::vector<Eigen::VectorXcd>& b, double P_t) {
  double d2 = 0.0;
  for (std::size_t g = 0; g < a.size(); ++g) {
    const cplx ip = a[g].dot(b[g]);
    if (std::abs(ip) > 0.0) b[g] *= std::conj(ip) / std::abs(ip);
    d2 += (a[g] - b[g]).squaredNorm();
  }
  return std::sqrt(d2 / P_t);
}

}  // namespace detail

/// Single-group transmit update for fixed channels. Returns the candidate beam.
inline Eigen::VectorXcd single_group_txbf(const ChannelSet& cs, const Scenario& sc, const SystemConfig& cfg,
                                          TxbfMethod method, const Eigen::VectorXcd& current,
                                          const AoOptions& opt, std::uint64_t seed) {
  if (method == TxbfMethod::sdr) {
    SdrOptions so;
    so.solver = opt.solver;
    so.seed = seed;
    return sdr_single_group(cs, sc, cfg.P_t, so).w;
  }
  if (method == TxbfMethod::dinkelbach_admm) {
    DinkelbachOptions d = opt.dinkelbach;
    d.start = current;
    d.seed = seed;
    return dinkelbach_admm(cs, sc, cfg.P_t, d).w;
  }
  throw std::invalid_argument("single_group_txbf: method must be sdr or dinkelbach_admm");
}

/// Single-group alternating optimization. With `fixed` channels the pinching
/// step is skipped (fixed-array systems).
inline AoResult optimize_single_group(const Scenario& sc, const SystemConfig& cfg, TxbfMethod method,
                                      const AoOptions& opt = {},
                                      const std::optional<ChannelSet>& fixed = std::nullopt) {
  detail::require_single_group(sc);
  std::mt19937_64 rng(opt.seed);
  const std::uint64_t layout_seed = rng();
  AoResult res;
  if (!fixed) res.layout = opt.initial_layout ? *opt.initial_layout : random_feasible_layout(cfg, layout_seed);
  ChannelSet cs = fixed ? *fixed : pass_channels(*res.layout, sc, cfg);
  const Eigen::Index M = cs.dim();
  std::vector<Eigen::VectorXcd> w = opt.initial_beams ? *opt.initial_beams : detail::gaussian_beams(rng, 1, M, cfg.P_t);

  auto rate_u = [&](const Eigen::VectorXcd& v) { return single_group_rate_unclamped(amplitudes(cs, sc, v)); };
  double u = rate_u(w[0]);
  auto push_row = [&](int it, double tx_ms, double pa_ms) {
    res.trace.push_back({it, std::max(0.0, u), u, res.layout ? layout_hash(*res.layout) : 0, tx_ms, pa_ms});
  };
  push_row(0, 0.0, 0.0);

  for (int j = 1; j <= opt.max_iters; ++j) {
    const std::vector<Eigen::VectorXcd> w_prev = w;
    const Eigen::MatrixXd x_prev = res.layout ? res.layout->x : Eigen::MatrixXd();

    auto t0 = std::chrono::steady_clock::now();
    Eigen::VectorXcd cand = single_group_txbf(cs, sc, cfg, method, w[0], opt, rng());
    const double uc = rate_u(cand);
    if (uc >= u) {
      w[0] = cand;
      u = uc;
    }
    const double tx_ms = detail::elapsed_ms(t0);

    t0 = std::chrono::steady_clock::now();
    if (res.layout) {
      AmplitudeState amps = amplitudes(cs, sc, w[0]);
      sweep_elements(*res.layout, sc, w[0], amps, cfg);
      cs = pass_channels(*res.layout, sc, cfg);
      u = rate_u(w[0]);
    }
    push_row(j, tx_ms, detail::elapsed_ms(t0));
    res.iterations = j;

    const double dw = detail::beam_change(w_prev, w, cfg.P_t);
    const double dp = res.layout ? (res.layout->x - x_prev).norm() : 0.0;
    if (dw <= opt.eps && dp <= opt.eps) {
      res.converged = true;
      break;
    }
  }
  res.beams = w;
  res.report = secrecy_report(cs, w, sc);
  return res;
}

/// Algorithm: alternate transmit beamforming and a full element sweep.
inline AoResult ao_single_group(const Scenario& sc, const SystemConfig& cfg, TxbfMethod method,
                                const AoOptions& opt = {}) {
  return optimize_single_group(sc, cfg, method, opt);
}

}  // namespace pass
