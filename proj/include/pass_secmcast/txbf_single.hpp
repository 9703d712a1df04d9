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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace pass {

// All single-group optimizers work in normalized units: channels scaled by
// sqrt(P_t)/sigma and beamformers by 1/sqrt(P_t), so the budget is ||v|| <= 1
// and every noise power is one. Physical beamformers are returned.

namespace detail {

inline void require_single_group(const Scenario& sc) {
  if (sc.groups != 1) throw std::invalid_argument("single-group routine called with G != 1");
  if (sc.bobs.empty()) throw std::invalid_argument("single-group routine needs at least one bob");
}

// Eve channels, or a single zero channel standing in for an empty eve set.
inline std::vector<Eigen::VectorXcd> eve_or_dummy(const ChannelSet& ncs) {
  if (!ncs.eve.empty()) return ncs.eve;
  return {Eigen::VectorXcd::Zero(ncs.dim())};
}

inline double identity_weight_or_default(double c, Eigen::Index M) {
  return c > 0.0 ? c : 1.0 / static_cast<double>(M);
}

inline Eigen::VectorXcd gaussian_unit(std::mt19937_64& rng, Eigen::Index M) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  Eigen::VectorXcd v(M);
  for (Eigen::Index i = 0; i < M; ++i) v(i) = {nd(rng), nd(rng)};
  return v / v.norm();
}

inline double exact_rate_normalized(const ChannelSet& ncs, const Scenario& sc, const Eigen::VectorXcd& v,
                                    bool unclamped = false) {
  const std::vector<Eigen::MatrixXcd> f{v};
  const SecrecyReport r = secrecy_report_normalized(ncs, f, sc);
  return unclamped ? r.min_rate_unclamped : r.min_rate;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SDR with the Charnes-Cooper transformation

struct SdrOptions {
  solvers::SolverSettings solver;
  std::uint64_t seed = 0;
  double identity_weight = 0.0;  // <= 0 selects 1/M
};

struct SdrResult {
  Eigen::VectorXcd w;          // physical, ||w||^2 = P_t
  double upper_bound = 0.0;    // bits/s/Hz, bounds the achievable rate from above
  double rate = 0.0;           // exact rate of w
  Eigen::MatrixXcd W;          // relaxed solution (scaled covariance)
  solvers::SolveInfo info;
};

/// Ratio SDR: min gamma s.t. tr(A_l Wt) <= gamma, tr(B_k Wt) >= 1, Wt PSD,
/// with A = cI + conj(h)conj(h)^H on normalized channels. The ratio is
/// scale invariant, so the power cap drops out after the transformation.
inline SdrResult sdr_single_group(const ChannelSet& cs, const Scenario& sc, double P_t,
                                  const SdrOptions& opt = {}) {
  detail::require_single_group(sc);
  const ChannelSet ncs = normalized_channels(cs, sc, P_t);
  const Eigen::Index M = ncs.dim();
  const double c = detail::identity_weight_or_default(opt.identity_weight, M);
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(M, M);

  using solvers::Sense;
  solvers::LinearSDP prob;
  prob.C = Eigen::MatrixXcd::Zero(M + 1, M + 1);
  prob.C(M, M) = 1.0;
  for (const auto& h : detail::eve_or_dummy(ncs)) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(M + 1, M + 1);
    A.topLeftCorner(M, M) = c * I + gain_matrix(h);
    A(M, M) = -1.0;
    prob.constraints.push_back({A, Sense::le, 0.0});
  }
  for (const auto& h : ncs.bob) {
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(M + 1, M + 1);
    B.topLeftCorner(M, M) = c * I + gain_matrix(h);
    prob.constraints.push_back({B, Sense::ge, 1.0});
  }
  const solvers::SdpSolution sol = solvers::solve_linear_sdp(prob, opt.solver);

  SdrResult res;
  res.info = sol.info;
  res.W = solvers::herm(sol.X.topLeftCorner(M, M));
  const double gamma = std::max(std::real(sol.X(M, M)), std::numeric_limits<double>::min());
  res.upper_bound = std::max(0.0, -std::log2(gamma));

  solvers::RandomizationOptions ro;
  ro.trials = opt.solver.randomization_trials;
  ro.seed = opt.seed;
  ro.full_power = true;
  const auto score = [&](const Eigen::VectorXcd& v) { return detail::exact_rate_normalized(ncs, sc, v, true); };
  Eigen::VectorXcd v = solvers::rank_one_extract(res.W, 1.0, score, ro);
  if (!(v.squaredNorm() > 0.0)) v = Eigen::VectorXcd::Unit(M, 0);
  res.rate = detail::exact_rate_normalized(ncs, sc, v);
  res.w = std::sqrt(P_t) * v;
  return res;
}

// ---------------------------------------------------------------------------
// LSE-smoothed Dinkelbach objective

/// phi_s(v) = f1(v) - s f2(v) with f1 = beta LSE(a / beta) over eves and
/// f2 = -beta LSE(-b / beta) over bobs, a_l = v^H A_l v, b_k = v^H B_k v.
struct SmoothedObjective {
  std::vector<Eigen::MatrixXcd> A;  // eve forms c I + H_l
  std::vector<Eigen::MatrixXcd> B;  // bob forms c I + H_k
  double beta = 1.0;
  double identity_weight = 0.0;
  double varsigma = 0.0;
};

struct SmoothedValue {
  double f1 = 0.0;
  double f2 = 0.0;
  double phi = 0.0;
  Eigen::VectorXcd grad;  // d phi = Re(grad^H dv)
};

/// Max-shifted beta * ln sum exp(x / beta) and its softmax weights.
inline double lse(const Eigen::VectorXd& x, double beta, Eigen::VectorXd* weights = nullptr) {
  const double mx = x.maxCoeff();
  const Eigen::ArrayXd e = ((x.array() - mx) / beta).exp();
  const double s = e.sum();
  if (weights) *weights = (e / s).matrix();
  return mx + beta * std::log(s);
}

/// Smoothing factor that keeps f2 positive on the unit sphere:
/// beta ln(count) stays below a quarter of the identity floor c.
inline double default_beta(double identity_weight, std::size_t K, std::size_t L) {
  const double n = static_cast<double>(std::max<std::size_t>({K, L, 2}));
  return identity_weight / (4.0 * std::log(n));
}

inline SmoothedObjective make_smoothed_objective(const ChannelSet& ncs, double beta, double identity_weight) {
  SmoothedObjective s;
  const Eigen::Index M = ncs.dim();
  s.identity_weight = detail::identity_weight_or_default(identity_weight, M);
  const Eigen::MatrixXcd cI = s.identity_weight * Eigen::MatrixXcd::Identity(M, M);
  for (const auto& h : detail::eve_or_dummy(ncs)) s.A.push_back(cI + gain_matrix(h));
  for (const auto& h : ncs.bob) s.B.push_back(cI + gain_matrix(h));
  s.beta = beta > 0.0 ? beta : default_beta(s.identity_weight, s.B.size(), s.A.size());
  return s;
}

inline SmoothedValue lse_value_and_gradient(const SmoothedObjective& st, const Eigen::VectorXcd& v) {
  if (!(st.beta > 0.0)) throw std::invalid_argument("lse_value_and_gradient: beta must be positive");
  const auto L = static_cast<Eigen::Index>(st.A.size());
  const auto K = static_cast<Eigen::Index>(st.B.size());
  std::vector<Eigen::VectorXcd> Av(static_cast<std::size_t>(L)), Bv(static_cast<std::size_t>(K));
  Eigen::VectorXd a(L), b(K);
  for (Eigen::Index l = 0; l < L; ++l) {
    Av[static_cast<std::size_t>(l)] = st.A[static_cast<std::size_t>(l)] * v;
    a(l) = v.dot(Av[static_cast<std::size_t>(l)]).real();
  }
  for (Eigen::Index k = 0; k < K; ++k) {
    Bv[static_cast<std::size_t>(k)] = st.B[static_cast<std::size_t>(k)] * v;
    b(k) = v.dot(Bv[static_cast<std::size_t>(k)]).real();
  }
  Eigen::VectorXd p, q;
  SmoothedValue out;
  out.f1 = lse(a, st.beta, &p);
  out.f2 = -lse(-b, st.beta, &q);
  out.phi = out.f1 - st.varsigma * out.f2;
  out.grad = Eigen::VectorXcd::Zero(v.size());
  for (Eigen::Index l = 0; l < L; ++l) out.grad += 2.0 * p(l) * Av[static_cast<std::size_t>(l)];
  for (Eigen::Index k = 0; k < K; ++k) out.grad -= 2.0 * st.varsigma * q(k) * Bv[static_cast<std::size_t>(k)];
  return out;
}

/// Twice the spectral norm of the softmax-weighted Hessian of phi at v,
/// sum_l p_l A_l - s sum_k q_k B_k. Softmax curvature is not included.
inline double lipschitz_estimate(const SmoothedObjective& st, const Eigen::VectorXcd& v) {
  const auto L = static_cast<Eigen::Index>(st.A.size());
  const auto K = static_cast<Eigen::Index>(st.B.size());
  Eigen::VectorXd a(L), b(K), p, q;
  for (Eigen::Index l = 0; l < L; ++l) a(l) = v.dot(st.A[static_cast<std::size_t>(l)] * v).real();
  for (Eigen::Index k = 0; k < K; ++k) b(k) = v.dot(st.B[static_cast<std::size_t>(k)] * v).real();
  lse(a, st.beta, &p);
  lse(-b, st.beta, &q);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(v.size(), v.size());
  for (Eigen::Index l = 0; l < L; ++l) H += p(l) * st.A[static_cast<std::size_t>(l)];
  for (Eigen::Index k = 0; k < K; ++k) H -= st.varsigma * q(k) * st.B[static_cast<std::size_t>(k)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(solvers::herm(H), Eigen::EigenvaluesOnly);
  const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
  return 2.0 * std::max(norm, 1e-3 * st.identity_weight);
}

// ---------------------------------------------------------------------------
// Dinkelbach outer loop with the linearized ADMM inner solver

struct AdmmState {
  Eigen::VectorXcd u;
  Eigen::VectorXcd w;
  Eigen::VectorXcd nu;
  double rho = 1.0;
  double alpha = 1.0;
  double L_phi = 1.0;
};

/// One ADMM pass: projected gradient step on u, closed-form w, dual ascent.
/// `grad` evaluates the gradient of phi.
template <class Grad>
void admm_step(AdmmState& s, double budget, Grad&& grad) {
  s.u = solvers::project_power_ball(s.u - s.alpha * (s.nu + s.rho * (s.u - s.w)), budget);
  s.w = s.u - (grad(s.u) - s.nu) / s.rho;
  s.nu += s.rho * (s.u - s.w);
}

struct DinkelbachOptions {
  double beta = 0.0;            // <= 0 selects default_beta
  double identity_weight = 0.0;  // <= 0 selects 1/M
  int outer_iters = 50;
  int inner_iters = 50;
  double tol = 1e-7;  // stop when |phi| < tol * max(1, |f1|)
  std::uint64_t seed = 0;
  std::optional<Eigen::VectorXcd> start;  // physical beamformer; random when empty
};

struct DinkelbachTraceRow {
  int iteration = 0;
  double varsigma = 0.0;
  double phi = 0.0;   // phi at the new iterate under this iteration's varsigma
  double rate = 0.0;  // exact rate of the new iterate
};

struct DinkelbachResult {
  Eigen::VectorXcd w;  // physical
  double rate = 0.0;
  double final_phi = 0.0;
  double final_f1 = 0.0;
  double beta = 0.0;
  double L_phi = 0.0;
  bool converged = false;
  std::vector<DinkelbachTraceRow> trace;
};

inline DinkelbachResult dinkelbach_admm(const ChannelSet& cs, const Scenario& sc, double P_t,
                                        const DinkelbachOptions& opt = {}) {
  detail::require_single_group(sc);
  const ChannelSet ncs = normalized_channels(cs, sc, P_t);
  const Eigen::Index M = ncs.dim();
  SmoothedObjective st = make_smoothed_objective(ncs, opt.beta, opt.identity_weight);

  Eigen::VectorXcd v;
  if (opt.start && opt.start->squaredNorm() > 0.0) {
    v = solvers::project_power_ball(*opt.start / std::sqrt(P_t), 1.0);
  } else {
    std::mt19937_64 rng(opt.seed);
    v = detail::gaussian_unit(rng, M);
  }

  DinkelbachResult res;
  res.beta = st.beta;
  AdmmState a;
  for (int j = 0; j < opt.outer_iters; ++j) {
    st.varsigma = 0.0;
    const SmoothedValue cur = lse_value_and_gradient(st, v);
    if (!(cur.f2 > 0.0)) throw std::runtime_error("dinkelbach_admm: f2 not positive; reduce beta");
    st.varsigma = cur.f1 / cur.f2;

    // The ADMM state carries over between outer iterations; u restarts at v.
    a.L_phi = lipschitz_estimate(st, v);
    a.rho = 4.0 * a.L_phi;
    a.alpha = 8.0 / (37.0 * a.L_phi);
    if (j == 0) {
      a.w = v;
      a.nu = Eigen::VectorXcd::Zero(M);
    }
    a.u = v;
    res.L_phi = a.L_phi;

    Eigen::VectorXcd best = v;
    double best_phi = lse_value_and_gradient(st, v).phi;
    for (int p = 0; p < opt.inner_iters; ++p) {
      admm_step(a, 1.0, [&](const Eigen::VectorXcd& x) { return lse_value_and_gradient(st, x).grad; });
      const double ph = lse_value_and_gradient(st, a.u).phi;
      if (ph < best_phi) {
        best_phi = ph;
        best = a.u;
      }
    }
    v = best;
    const SmoothedValue nxt = lse_value_and_gradient(st, v);
    res.trace.push_back({j, st.varsigma, nxt.phi, detail::exact_rate_normalized(ncs, sc, v)});
    res.final_phi = nxt.phi;
    res.final_f1 = nxt.f1;
    if (std::abs(nxt.phi) < opt.tol * std::max(1.0, std::abs(nxt.f1))) {
      res.converged = true;
      break;
    }
  }
  res.w = std::sqrt(P_t) * v;
  res.rate = detail::exact_rate_normalized(ncs, sc, v);
  return res;
}

}  // namespace pass
