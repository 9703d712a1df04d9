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
#include "pass_secmcast/pinch_single.hpp"
#include "pass_secmcast/solvers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace pass {

// ---------------------------------------------------------------------------
// Difference-of-concave rate terms

/// Per-group log-trace terms. Bob k of group g: F1 - J1 is its rate; eve l:
/// J2 - F2 is its leakage. Units follow the inputs (physical: log2 of watts).
struct DocTerms {
  std::vector<std::vector<double>> F1, J1;  // [g][k], k over group members
  std::vector<std::vector<double>> F2, J2;  // [g][l]
  std::vector<double> group_value;          // min_k (F1 - J1) + min_l (F2 - J2)
  double value = 0.0;                       // min over non-empty groups
};

/// DoC terms for covariances {W_g} (watts) on physical channels.
inline DocTerms doc_rate_terms(std::span<const Eigen::MatrixXcd> W, const ChannelSet& cs, const Scenario& sc) {
  const int G = sc.groups;
  if (static_cast<int>(W.size()) != G) throw std::invalid_argument("doc_rate_terms: one covariance per group");
  const auto members = sc.group_members();
  auto powers = [&](const Eigen::VectorXcd& h) {
    const Eigen::MatrixXcd H = gain_matrix(h);
    Eigen::VectorXd p(G);
    for (int i = 0; i < G; ++i) p(i) = std::real((H * W[static_cast<std::size_t>(i)]).trace());
    return p;
  };
  DocTerms d;
  d.F1.resize(G);
  d.J1.resize(G);
  d.F2.resize(G);
  d.J2.resize(G);
  d.group_value.assign(G, 0.0);
  double best = std::numeric_limits<double>::infinity();
  for (int g = 0; g < G; ++g) {
    double bob = std::numeric_limits<double>::infinity();
    for (int i : members[g]) {
      const Eigen::VectorXd p = powers(cs.bob[static_cast<std::size_t>(i)]);
      const double s2 = sc.bobs[static_cast<std::size_t>(i)].noise_w;
      d.F1[g].push_back(std::log2(s2 + p.sum()));
      d.J1[g].push_back(std::log2(s2 + p.sum() - p(g)));
      bob = std::min(bob, d.F1[g].back() - d.J1[g].back());
    }
    double eve = 0.0;
    for (std::size_t l = 0; l < sc.eves.size(); ++l) {
      const Eigen::VectorXd p = powers(cs.eve[l]);
      const double s2 = sc.eves[l].noise_w;
      d.F2[g].push_back(std::log2(s2 + p.sum() - p(g)));
      d.J2[g].push_back(std::log2(s2 + p.sum()));
      eve = std::min(eve, d.F2[g].back() - d.J2[g].back());
    }
    if (members[g].empty()) continue;
    d.group_value[g] = bob + eve;
    best = std::min(best, d.group_value[g]);
  }
  d.value = std::isfinite(best) ? best : 0.0;
  return d;
}

// ---------------------------------------------------------------------------
// MM surrogate for the transmit covariances (normalized units)

/// Concave minorant of the DoC rates: J1 and J2 replaced by their tangent
/// planes at the expansion point W~. Channels are noise-normalized and the
/// covariances share sum tr(W_g) <= 1.
struct MmSurrogate {
  struct Triple {
    int g;
    int bob;  // index into Scenario::bobs
    int eve;  // index into Scenario::eves, -1 without eves
  };
  int G = 1;
  std::vector<Eigen::MatrixXcd> Hb, He;  // gain matrices
  std::vector<int> bob_group;
  std::vector<Triple> triples;
  std::vector<Eigen::MatrixXcd> W_tilde;
  std::vector<double> J1_tilde, J1_coef, J1_q;               // per bob
  std::vector<std::vector<double>> J2_tilde, J2_coef, J2_q;  // [g][l]

  int count() const { return static_cast<int>(triples.size()); }

  static Eigen::VectorXd powers(const Eigen::MatrixXcd& H, std::span<const Eigen::MatrixXcd> W) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(W.size()));
    for (std::size_t i = 0; i < W.size(); ++i) p(static_cast<Eigen::Index>(i)) = std::real((H * W[i]).trace());
    return p;
  }

  double J1_hat(int k, std::span<const Eigen::MatrixXcd> W) const {
    const Eigen::VectorXd p = powers(Hb[k], W);
    return J1_tilde[k] + J1_coef[k] * (p.sum() - p(bob_group[k]) - J1_q[k]);
  }
  double J2_hat(int g, int l, std::span<const Eigen::MatrixXcd> W) const {
    const Eigen::VectorXd p = powers(He[l], W);
    return J2_tilde[g][l] + J2_coef[g][l] * (p.sum() - J2_q[g][l]);
  }

  /// F1 - J1^ + F2 - J2^ for every (g, k, l).
  void values(std::span<const Eigen::MatrixXcd> W, Eigen::VectorXd& out) const {
    out.resize(count());
    std::vector<double> bob_part(Hb.size());
    for (std::size_t k = 0; k < Hb.size(); ++k) {
      const Eigen::VectorXd p = powers(Hb[k], W);
      const int g = bob_group[k];
      bob_part[k] = std::log2(1.0 + p.sum()) -
                    (J1_tilde[k] + J1_coef[k] * (p.sum() - p(g) - J1_q[k]));
    }
    std::vector<Eigen::VectorXd> pe;
    for (const auto& H : He) pe.push_back(powers(H, W));
    for (int j = 0; j < count(); ++j) {
      const Triple& t = triples[static_cast<std::size_t>(j)];
      double v = bob_part[static_cast<std::size_t>(t.bob)];
      if (t.eve >= 0) {
        const Eigen::VectorXd& p = pe[static_cast<std::size_t>(t.eve)];
        v += std::log2(1.0 + p.sum() - p(t.g)) -
             (J2_tilde[t.g][t.eve] + J2_coef[t.g][t.eve] * (p.sum() - J2_q[t.g][t.eve]));
      }
      out(j) = v;
    }
  }

  void gradient(int j, std::span<const Eigen::MatrixXcd> W, std::vector<Eigen::MatrixXcd>& out) const {
    const Triple& t = triples[static_cast<std::size_t>(j)];
    const double ln2 = std::numbers::ln2;
    out.assign(W.size(), Eigen::MatrixXcd::Zero(W[0].rows(), W[0].cols()));
    const Eigen::VectorXd pb = powers(Hb[t.bob], W);
    for (int i = 0; i < G; ++i) {
      out[i] += Hb[t.bob] / ((1.0 + pb.sum()) * ln2);
      if (i != t.g) out[i] -= J1_coef[t.bob] * Hb[t.bob];
    }
    if (t.eve < 0) return;
    const Eigen::VectorXd pe = powers(He[t.eve], W);
    for (int i = 0; i < G; ++i) {
      if (i != t.g) out[i] += He[t.eve] / ((1.0 + pe.sum() - pe(t.g)) * ln2);
      out[i] -= J2_coef[t.g][t.eve] * He[t.eve];
    }
  }

  double objective(std::span<const Eigen::MatrixXcd> W) const {
    Eigen::VectorXd v;
    values(W, v);
    return v.size() ? v.minCoeff() : 0.0;
  }
};

/// Surrogate on normalized channels `ncs` expanded at normalized covariances W~.
inline MmSurrogate make_mm_surrogate(const ChannelSet& ncs, const Scenario& sc,
                                     std::span<const Eigen::MatrixXcd> W_tilde) {
  MmSurrogate s;
  s.G = sc.groups;
  s.W_tilde.assign(W_tilde.begin(), W_tilde.end());
  const double ln2 = std::numbers::ln2;
  for (std::size_t k = 0; k < ncs.bob.size(); ++k) {
    s.Hb.push_back(gain_matrix(ncs.bob[k]));
    s.bob_group.push_back(sc.bobs[k].group);
    const Eigen::VectorXd p = MmSurrogate::powers(s.Hb.back(), W_tilde);
    const double q = p.sum() - p(sc.bobs[k].group);
    s.J1_q.push_back(q);
    s.J1_tilde.push_back(std::log2(1.0 + q));
    s.J1_coef.push_back(1.0 / ((1.0 + q) * ln2));
  }
  for (const auto& h : ncs.eve) s.He.push_back(gain_matrix(h));
  s.J2_tilde.assign(s.G, {});
  s.J2_coef.assign(s.G, {});
  s.J2_q.assign(s.G, {});
  for (int g = 0; g < s.G; ++g)
    for (const auto& H : s.He) {
      const double q = MmSurrogate::powers(H, W_tilde).sum();
      s.J2_q[g].push_back(q);
      s.J2_tilde[g].push_back(std::log2(1.0 + q));
      s.J2_coef[g].push_back(1.0 / ((1.0 + q) * ln2));
    }
  for (std::size_t k = 0; k < ncs.bob.size(); ++k) {
    const int g = sc.bobs[k].group;
    if (ncs.eve.empty()) s.triples.push_back({g, static_cast<int>(k), -1});
    for (std::size_t l = 0; l < ncs.eve.size(); ++l) s.triples.push_back({g, static_cast<int>(k), static_cast<int>(l)});
  }
  return s;
}

struct MmSdrResult {
  std::vector<Eigen::MatrixXcd> W;  // watts
  double t = 0.0;                   // surrogate min at W
  double t_start = 0.0;             // surrogate min at the expansion point
  solvers::SolveInfo info;
};

/// One MM step: maximize the surrogate min over {W_g PSD, sum tr W_g <= P_t}
/// by projected supergradient ascent started at W~.
inline MmSdrResult mm_sdr_txbf_update(std::span<const Eigen::MatrixXcd> W_tilde, const ChannelSet& cs,
                                      const Scenario& sc, double P_t, const solvers::SolverSettings& set = {}) {
  const ChannelSet ncs = normalized_channels(cs, sc, P_t);
  std::vector<Eigen::MatrixXcd> Wn;
  for (const auto& W : W_tilde) Wn.push_back(W / P_t);
  const MmSurrogate s = make_mm_surrogate(ncs, sc, Wn);
  const solvers::MaxMinResult mm = solvers::projected_supergradient_max_min(s, std::span<const Eigen::MatrixXcd>(Wn), 1.0, set);
  MmSdrResult r;
  r.info = mm.info;
  r.t_start = s.objective(solvers::project_trace_budget(Wn, 1.0));
  r.t = mm.info.objective;
  for (const auto& W : mm.W) r.W.push_back(P_t * W);
  return r;
}

// ---------------------------------------------------------------------------
// SOCP path

/// First-order lower bound of |x|^2 / r at (x~, r~), jointly in (x, r).
inline double b_bound(cplx x, double r, cplx xt, double rt) {
  return 2.0 * std::real(std::conj(xt) * x) / rt - std::norm(xt) * r / (rt * rt);
}

/// SINR bound variables in normalized units.
struct SocpBounds {
  std::vector<double> xi_b;               // per bob
  std::vector<std::vector<double>> xi_e;  // [g][l]
  double t = 0.0;                         // bits/s/Hz
};

inline constexpr double kXiFloor = 1e-9;

/// Achieved SINRs of beams v (normalized channels, unit noise).
inline SocpBounds achieved_bounds(const ChannelSet& ncs, const Scenario& sc, std::span<const Eigen::VectorXcd> v) {
  const std::vector<double> bn(sc.bobs.size(), 1.0), en(sc.eves.size(), 1.0);
  const auto f = as_factors(v);
  const Eigen::MatrixXd pb = received_powers(ncs.bob, f), pe = received_powers(ncs.eve, f);
  SocpBounds b;
  for (std::size_t k = 0; k < sc.bobs.size(); ++k) {
    const int g = sc.bobs[k].group;
    const auto r = static_cast<Eigen::Index>(k);
    b.xi_b.push_back(pb(r, g) / (pb.row(r).sum() - pb(r, g) + 1.0));
  }
  b.xi_e.assign(sc.groups, {});
  for (int g = 0; g < sc.groups; ++g)
    for (std::size_t l = 0; l < sc.eves.size(); ++l) {
      const auto r = static_cast<Eigen::Index>(l);
      b.xi_e[g].push_back(pe(r, g) / (pe.row(r).sum() - pe(r, g) + 1.0));
    }
  return b;
}

struct SocpResult {
  std::vector<Eigen::VectorXcd> beams;  // watts
  SocpBounds bounds;                    // solved xi_b, fixed xi_e, t
  solvers::SolveInfo info;
  int relaxations = 0;                  // xi_e enlargements needed for feasibility
};

namespace detail {

// Real coefficient rows of Re(a^T v_g) and Im(a^T v_g) in z = [Re v; Im v; ...].
struct ComplexLinear {
  Eigen::VectorXd re, im;
};

inline ComplexLinear complex_linear(const Eigen::VectorXcd& a, int g, Eigen::Index M, Eigen::Index n) {
  ComplexLinear c{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  const Eigen::Index o = 2 * M * g;
  c.re.segment(o, M) = a.real();
  c.re.segment(o + M, M) = -a.imag();
  c.im.segment(o, M) = a.imag();
  c.im.segment(o + M, M) = a.real();
  return c;
}

}  // namespace detail

/// One convexified step around beams w~ (watts). Bob SINR bounds use the
/// first-order bound of |x|^2 / r, eve SINRs are capped at fixed xi_e
/// (default: achieved at w~) via a linearized interference floor, and
/// 2^t (1 + xi_e) <= 1 + xi_b couples them.
inline SocpResult socp_txbf_update(std::span<const Eigen::VectorXcd> w_tilde, const ChannelSet& cs,
                                   const Scenario& sc, double P_t,
                                   const std::optional<SocpBounds>& expansion = std::nullopt,
                                   const solvers::SolverSettings& set = {}) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const ChannelSet ncs = normalized_channels(cs, sc, P_t);
  const int G = sc.groups;
  const Eigen::Index M = ncs.dim();
  const auto K = static_cast<Eigen::Index>(sc.bobs.size());
  const auto L = sc.eves.size();
  std::vector<Eigen::VectorXcd> vt;
  for (const auto& w : w_tilde) vt.push_back(w / std::sqrt(P_t));
  const SocpBounds at = achieved_bounds(ncs, sc, vt);
  SocpBounds xi = expansion ? *expansion : at;
  for (auto& row : xi.xi_e)
    for (double& e : row) e = std::max(e, kXiFloor);

  const Eigen::Index nv = 2 * M * G;
  const Eigen::Index n = nv + K + 1;  // beams, xi_b, tau = 2^t
  const Eigen::Index itau = n - 1;

  auto square = [&](const detail::ComplexLinear& c, double weight, solvers::Quadratic& q) {
    if (q.P.size() == 0) q.P = MatrixXd::Zero(n, n);
    q.P += 2.0 * weight * (c.re * c.re.transpose() + c.im * c.im.transpose());
  };
  auto linear_of = [&](const detail::ComplexLinear& c, cplx coef) {
    return VectorXd(std::real(coef) * c.re + std::imag(coef) * c.im);  // Re(conj(coef) x)
  };

  SocpResult res;
  for (int attempt = 0; attempt <= 5; ++attempt) {
    solvers::QcqpProblem prob;
    prob.objective.q = VectorXd::Zero(n);
    prob.objective.q(itau) = -1.0;

    for (Eigen::Index k = 0; k < K; ++k) {
      const int g = sc.bobs[static_cast<std::size_t>(k)].group;
      const Eigen::VectorXcd& h = ncs.bob[static_cast<std::size_t>(k)];
      solvers::Quadratic c;
      c.q = VectorXd::Zero(n);
      c.r = 1.0;
      for (int j = 0; j < G; ++j)
        if (j != g) square(detail::complex_linear(h, j, M, n), 1.0, c);
      const cplx xt = h.cwiseProduct(vt[g]).sum();
      const double rt = std::max(xi.xi_b[static_cast<std::size_t>(k)], kXiFloor);
      // - 2 Re(conj(xt) x) / rt + |xt|^2 xi_b / rt^2
      c.q -= 2.0 / rt * linear_of(detail::complex_linear(h, g, M, n), xt);
      c.q(nv + k) += std::norm(xt) / (rt * rt);
      prob.constraints.push_back(std::move(c));
    }
    for (int g = 0; g < G; ++g)
      for (std::size_t l = 0; l < L; ++l) {
        const Eigen::VectorXcd& h = ncs.eve[l];
        solvers::Quadratic c;
        c.q = VectorXd::Zero(n);
        c.r = -1.0;
        square(detail::complex_linear(h, g, M, n), 1.0 / xi.xi_e[g][l], c);
        for (int j = 0; j < G; ++j) {
          if (j == g) continue;
          const cplx xt = h.cwiseProduct(vt[j]).sum();
          c.q -= 2.0 * linear_of(detail::complex_linear(h, j, M, n), xt);
          c.r += std::norm(xt);
        }
        prob.constraints.push_back(std::move(c));
      }
    for (Eigen::Index k = 0; k < K; ++k) {
      const int g = sc.bobs[static_cast<std::size_t>(k)].group;
      const std::size_t nl = std::max<std::size_t>(L, 1);
      for (std::size_t l = 0; l < nl; ++l) {
        const double e = L ? xi.xi_e[g][l] : 0.0;
        solvers::Quadratic c;
        c.q = VectorXd::Zero(n);
        c.q(itau) = 1.0 + e;
        c.q(nv + k) = -1.0;
        c.r = -1.0;
        prob.constraints.push_back(std::move(c));
      }
      solvers::Quadratic nonneg;
      nonneg.q = VectorXd::Zero(n);
      nonneg.q(nv + k) = -1.0;
      prob.constraints.push_back(std::move(nonneg));
    }
    solvers::Quadratic power;
    power.P = MatrixXd::Zero(n, n);
    power.P.topLeftCorner(nv, nv) = 2.0 * MatrixXd::Identity(nv, nv);
    power.q = VectorXd::Zero(n);
    power.r = -1.0;
    prob.constraints.push_back(std::move(power));

    // Start slightly inside the expansion point.
    VectorXd z0 = VectorXd::Zero(n);
    for (int g = 0; g < G; ++g) {
      z0.segment(2 * M * g, M) = 0.99 * vt[g].real();
      z0.segment(2 * M * g + M, M) = 0.99 * vt[g].imag();
    }
    double tau0 = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < K; ++k) {
      z0(nv + k) = 0.99 * at.xi_b[static_cast<std::size_t>(k)];
      const int g = sc.bobs[static_cast<std::size_t>(k)].group;
      for (std::size_t l = 0; l < std::max<std::size_t>(L, 1); ++l)
        tau0 = std::min(tau0, (1.0 + z0(nv + k)) / (1.0 + (L ? xi.xi_e[g][l] : 0.0)));
    }
    z0(itau) = std::isfinite(tau0) ? 0.99 * tau0 : 0.0;

    const solvers::QcqpResult q = solvers::solve_qcqp_convex(prob, z0, set);
    res.info = q.info;
    res.relaxations = attempt;
    if (q.info.status == solvers::Status::infeasible) {
      for (auto& row : xi.xi_e)
        for (double& e : row) e *= 1.1;
      continue;
    }
    res.beams.assign(G, Eigen::VectorXcd(M));
    for (int g = 0; g < G; ++g) {
      const Eigen::VectorXd re = q.z.segment(2 * M * g, M), im = q.z.segment(2 * M * g + M, M);
      res.beams[g] = std::sqrt(P_t) * (re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>());
    }
    xi.xi_b.assign(q.z.data() + nv, q.z.data() + nv + K);
    xi.t = std::log2(std::max(q.z(itau), std::numeric_limits<double>::min()));
    res.bounds = xi;
    return res;
  }
  res.beams.assign(w_tilde.begin(), w_tilde.end());
  res.bounds = xi;
  return res;
}

// ---------------------------------------------------------------------------
// MM pinching update

/// Noise-normalized received amplitudes per (receiver, group), one entry per
/// factor column: t = F_g^T h / sigma, so tr(H W_g) / sigma^2 = |t|^2.
struct GroupAmplitudes {
  std::vector<std::vector<Eigen::VectorXcd>> bob, eve;
};

inline GroupAmplitudes group_amplitudes(const ChannelSet& cs, const Scenario& sc,
                                        std::span<const Eigen::MatrixXcd> factors) {
  GroupAmplitudes a;
  for (std::size_t k = 0; k < cs.bob.size(); ++k) {
    a.bob.emplace_back();
    for (const auto& F : factors) a.bob.back().push_back(F.transpose() * cs.bob[k] / std::sqrt(sc.bobs[k].noise_w));
  }
  for (std::size_t l = 0; l < cs.eve.size(); ++l) {
    a.eve.emplace_back();
    for (const auto& F : factors) a.eve.back().push_back(F.transpose() * cs.eve[l] / std::sqrt(sc.eves[l].noise_w));
  }
  return a;
}

/// Exact min over groups of min_k rate_k - max_l leakage_l (unclamped).
inline double multigroup_rate_unclamped(const GroupAmplitudes& a, const Scenario& sc) {
  const int G = sc.groups;
  auto split = [&](const std::vector<Eigen::VectorXcd>& t, int g) {
    double all = 0.0;
    for (const auto& c : t) all += c.squaredNorm();
    return std::make_pair(all, all - t[static_cast<std::size_t>(g)].squaredNorm());
  };
  std::vector<double> bob(G, std::numeric_limits<double>::infinity()), leak(G, 0.0);
  for (std::size_t k = 0; k < a.bob.size(); ++k) {
    const int g = sc.bobs[k].group;
    const auto [all, other] = split(a.bob[k], g);
    bob[g] = std::min(bob[g], std::log2(1.0 + all) - std::log2(1.0 + other));
  }
  for (int g = 0; g < G; ++g)
    for (const auto& t : a.eve) {
      const auto [all, other] = split(t, g);
      leak[g] = std::max(leak[g], std::log2(1.0 + all) - std::log2(1.0 + other));
    }
  double r = std::numeric_limits<double>::infinity();
  for (int g = 0; g < G; ++g)
    if (std::isfinite(bob[g])) r = std::min(r, bob[g] - leak[g]);
  return std::isfinite(r) ? r : 0.0;
}

/// Fixed parts and linearization constants for PA (m, n) in the multigroup
/// pinching surrogate. Receivers are bobs followed by eves.
struct MmElement {
  int m = 0, n = 0, N = 1, G = 1, K = 0;
  double y = 0.0, h = 0.0;
  const SystemConfig* cfg = nullptr;
  std::vector<Eigen::Vector3d> pos;
  std::vector<double> scale;
  std::vector<std::vector<Eigen::VectorXcd>> S;  // [r][g] over factor columns
  std::vector<Eigen::VectorXcd> Fm;              // row m of each factor
  std::vector<int> bob_group;
  std::vector<double> J1_tilde, J1_coef, J1_q;                // per bob
  std::vector<std::vector<double>> J2_tilde, J2_coef, J2_q;   // [g][l]

  cplx a(double x, std::size_t r) const {
    return pa_contribution(x, y, h, pos[r], *cfg, N) * scale[r];
  }
  /// Received power of group g at receiver r with the PA at x.
  Eigen::VectorXd powers(double x, std::size_t r) const {
    const cplx ar = a(x, r);
    Eigen::VectorXd p(G);
    for (int g = 0; g < G; ++g) p(g) = (S[r][g] + ar * Fm[g]).squaredNorm();
    return p;
  }

  /// min_g [min_k (F1 - J1^) + min_l (F2 - J2^)].
  double surrogate(double x) const {
    const std::size_t R = pos.size();
    std::vector<double> bob(G, std::numeric_limits<double>::infinity()), eve(G, 0.0);
    const int L = static_cast<int>(R) - K;
    if (L > 0) std::fill(eve.begin(), eve.end(), std::numeric_limits<double>::infinity());
    for (int k = 0; k < K; ++k) {
      const Eigen::VectorXd p = powers(x, static_cast<std::size_t>(k));
      const int g = bob_group[k];
      const double other = p.sum() - p(g);
      bob[g] = std::min(bob[g], std::log2(1.0 + p.sum()) - (J1_tilde[k] + J1_coef[k] * (other - J1_q[k])));
    }
    for (int l = 0; l < L; ++l) {
      const Eigen::VectorXd p = powers(x, static_cast<std::size_t>(K + l));
      for (int g = 0; g < G; ++g)
        eve[g] = std::min(eve[g], std::log2(1.0 + p.sum() - p(g)) -
                                      (J2_tilde[g][l] + J2_coef[g][l] * (p.sum() - J2_q[g][l])));
    }
    double r = std::numeric_limits<double>::infinity();
    for (int g = 0; g < G; ++g)
      if (std::isfinite(bob[g])) r = std::min(r, bob[g] + eve[g]);
    return std::isfinite(r) ? r : 0.0;
  }
};

inline MmElement decompose_mm(const PinchingLayout& layout, const Scenario& sc,
                              std::span<const Eigen::MatrixXcd> factors, const GroupAmplitudes& amps,
                              const SystemConfig& cfg, int m, int n) {
  MmElement e;
  e.m = m;
  e.n = n;
  e.N = layout.N();
  e.G = sc.groups;
  e.K = static_cast<int>(sc.bobs.size());
  e.y = layout.y(m);
  e.h = layout.h;
  e.cfg = &cfg;
  for (const auto& F : factors) e.Fm.push_back(F.row(m).transpose());
  const double x = layout.x(m, n);
  const double ln2 = std::numbers::ln2;
  auto add = [&](const Eigen::Vector3d& p, double noise, const std::vector<Eigen::VectorXcd>& t) {
    e.pos.push_back(p);
    e.scale.push_back(1.0 / std::sqrt(noise));
    const cplx ar = e.a(x, e.pos.size() - 1);
    e.S.emplace_back();
    for (int g = 0; g < e.G; ++g) e.S.back().push_back(t[static_cast<std::size_t>(g)] - ar * e.Fm[g]);
  };
  for (std::size_t k = 0; k < sc.bobs.size(); ++k) {
    add(sc.bobs[k].pos, sc.bobs[k].noise_w, amps.bob[k]);
    const int g = sc.bobs[k].group;
    e.bob_group.push_back(g);
    double q = 0.0;
    for (int i = 0; i < e.G; ++i)
      if (i != g) q += amps.bob[k][i].squaredNorm();
    e.J1_q.push_back(q);
    e.J1_tilde.push_back(std::log2(1.0 + q));
    e.J1_coef.push_back(1.0 / ((1.0 + q) * ln2));
  }
  e.J2_tilde.assign(e.G, {});
  e.J2_coef.assign(e.G, {});
  e.J2_q.assign(e.G, {});
  for (std::size_t l = 0; l < sc.eves.size(); ++l) {
    add(sc.eves[l].pos, sc.eves[l].noise_w, amps.eve[l]);
    double q = 0.0;
    for (const auto& t : amps.eve[l]) q += t.squaredNorm();
    for (int g = 0; g < e.G; ++g) {
      e.J2_q[g].push_back(q);
      e.J2_tilde[g].push_back(std::log2(1.0 + q));
      e.J2_coef[g].push_back(1.0 / ((1.0 + q) * ln2));
    }
  }
  return e;
}

/// Grid argmax of the MM surrogate for PA (m, n) with exact-objective gating.
inline ElementUpdate mm_update_element(PinchingLayout& layout, int m, int n, const Scenario& sc,
                                       std::span<const Eigen::MatrixXcd> factors, GroupAmplitudes& amps,
                                       const SystemConfig& cfg) {
  const MmElement e = decompose_mm(layout, sc, factors, amps, cfg, m, n);
  ElementUpdate up;
  up.x = layout.x(m, n);
  const auto best = grid_argmax(layout, cfg, m, n, [&](double x) { return e.surrogate(x); });
  if (!best) {
    up.candidate = up.x;
    return up;
  }
  up.candidate = best->first;
  up.surrogate = best->second;
  if (up.candidate == up.x) return up;

  GroupAmplitudes trial = amps;
  const std::size_t K = sc.bobs.size();
  for (std::size_t r = 0; r < e.pos.size(); ++r) {
    const cplx ar = e.a(up.candidate, r);
    auto& t = r < K ? trial.bob[r] : trial.eve[r - K];
    for (int g = 0; g < e.G; ++g) t[g] = e.S[r][g] + ar * e.Fm[g];
  }
  if (multigroup_rate_unclamped(trial, sc) >= multigroup_rate_unclamped(amps, sc)) {
    layout.x(m, n) = up.candidate;
    amps = std::move(trial);
    up.x = up.candidate;
    up.accepted = true;
  }
  return up;
}

/// Lexicographic MM sweep; returns the number of accepted moves.
inline int mm_pinch_update(PinchingLayout& layout, const Scenario& sc, std::span<const Eigen::MatrixXcd> factors,
                           GroupAmplitudes& amps, const SystemConfig& cfg) {
  int moves = 0;
  for (int m = 0; m < layout.M(); ++m)
    for (int n = 0; n < layout.N(); ++n)
      if (mm_update_element(layout, m, n, sc, factors, amps, cfg).accepted) ++moves;
  return moves;
}

// ---------------------------------------------------------------------------
// Multigroup alternating optimization

namespace detail {

// Square-root factor of a PSD matrix with negligible directions dropped.
inline Eigen::MatrixXcd psd_factor(const Eigen::MatrixXcd& W) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(solvers::herm(W));
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  const double top = lam.size() ? lam.maxCoeff() : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = lam.size() - 1; i >= 0; --i)
    if (lam(i) > 1e-12 * top) keep.push_back(i);
  if (keep.empty()) return Eigen::MatrixXcd::Zero(W.rows(), 1);
  Eigen::MatrixXcd F(W.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    F.col(static_cast<Eigen::Index>(c)) = std::sqrt(lam(keep[c])) * es.eigenvectors().col(keep[c]);
  return F;
}

}  // namespace detail

/// Multigroup transmit step plus MM pinching sweep until both iterates settle.
/// `fixed` channels skip the pinching step.
inline AoResult optimize_multigroup(const Scenario& sc, const SystemConfig& cfg, TxbfMethod method,
                                    const AoOptions& opt = {},
                                    const std::optional<ChannelSet>& fixed = std::nullopt) {
  if (method != TxbfMethod::mm_sdr && method != TxbfMethod::socp)
    throw std::invalid_argument("optimize_multigroup: method must be mm_sdr or socp");
  const int G = sc.groups;
  std::mt19937_64 rng(opt.seed);
  const std::uint64_t layout_seed = rng();
  AoResult res;
  if (!fixed) res.layout = opt.initial_layout ? *opt.initial_layout : random_feasible_layout(cfg, layout_seed);
  ChannelSet cs = fixed ? *fixed : pass_channels(*res.layout, sc, cfg);
  const Eigen::Index M = cs.dim();
  std::vector<Eigen::VectorXcd> beams = opt.initial_beams ? *opt.initial_beams : detail::gaussian_beams(rng, G, M, cfg.P_t);

  // Transmit state as square-root factors (rank one for the SOCP path).
  std::vector<Eigen::MatrixXcd> factors(beams.begin(), beams.end());
  auto covariances = [&]() {
    std::vector<Eigen::MatrixXcd> W;
    for (const auto& F : factors) W.push_back(F * F.adjoint());
    return W;
  };
  auto rate_u = [&](std::span<const Eigen::MatrixXcd> F) {
    return multigroup_rate_unclamped(group_amplitudes(cs, sc, F), sc);
  };
  double u = rate_u(factors);
  auto push_row = [&](int it, double tx_ms, double pa_ms) {
    res.trace.push_back({it, std::max(0.0, u), u, res.layout ? layout_hash(*res.layout) : 0, tx_ms, pa_ms});
  };
  push_row(0, 0.0, 0.0);

  for (int j = 1; j <= opt.max_iters; ++j) {
    const std::vector<Eigen::MatrixXcd> W_prev = covariances();
    const Eigen::MatrixXd x_prev = res.layout ? res.layout->x : Eigen::MatrixXd();

    auto t0 = std::chrono::steady_clock::now();
    std::vector<Eigen::MatrixXcd> cand;
    if (method == TxbfMethod::mm_sdr) {
      for (const auto& W : mm_sdr_txbf_update(W_prev, cs, sc, cfg.P_t, opt.solver).W)
        cand.push_back(detail::psd_factor(W));
    } else {
      std::vector<Eigen::VectorXcd> cur;
      for (const auto& F : factors) cur.push_back(F.col(0));
      for (const auto& w : socp_txbf_update(cur, cs, sc, cfg.P_t, std::nullopt, opt.solver).beams)
        cand.emplace_back(w);
    }
    const double uc = rate_u(cand);
    if (uc >= u) {
      factors = std::move(cand);
      u = uc;
    }
    const double tx_ms = detail::elapsed_ms(t0);

    t0 = std::chrono::steady_clock::now();
    if (res.layout) {
      GroupAmplitudes amps = group_amplitudes(cs, sc, factors);
      mm_pinch_update(*res.layout, sc, factors, amps, cfg);
      cs = pass_channels(*res.layout, sc, cfg);
      u = rate_u(factors);
    }
    push_row(j, tx_ms, detail::elapsed_ms(t0));
    res.iterations = j;

    double dw2 = 0.0;
    const auto W_now = covariances();
    for (int g = 0; g < G; ++g) dw2 += (W_now[g] - W_prev[g]).squaredNorm();
    double dw = std::sqrt(dw2) / cfg.P_t;
    if (method == TxbfMethod::socp) {
      std::vector<Eigen::VectorXcd> a, b;
      for (int g = 0; g < G; ++g) {
        a.push_back(detail::psd_factor(W_prev[g]).col(0));
        b.push_back(factors[g].col(0));
      }
      dw = detail::beam_change(a, b, cfg.P_t);
    }
    const double dp = res.layout ? (res.layout->x - x_prev).norm() : 0.0;
    if (dw <= opt.eps && dp <= opt.eps) {
      res.converged = true;
      break;
    }
  }

  if (method == TxbfMethod::mm_sdr) {
    solvers::RandomizationOptions ro;
    ro.trials = opt.solver.randomization_trials;
    ro.seed = rng();
    ro.full_power = true;
    const auto W = covariances();
    const auto score = [&](std::span<const Eigen::VectorXcd> b) { return secrecy_report(cs, b, sc).min_rate_unclamped; };
    beams = solvers::rank_one_extract_set(W, cfg.P_t, score, ro);
  } else {
    beams.clear();
    for (const auto& F : factors) beams.push_back(F.col(0));
  }
  res.beams = beams;
  res.report = secrecy_report(cs, res.beams, sc);
  return res;
}

/// Algorithm: alternate the multigroup transmit update and the MM sweep.
inline AoResult ao_multigroup(const Scenario& sc, const SystemConfig& cfg, TxbfMethod method,
                              const AoOptions& opt = {}) {
  return optimize_multigroup(sc, cfg, method, opt);
}

}  // namespace pass
