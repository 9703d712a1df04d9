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

#include "pass_secmcast/solvers/common.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace pass::solvers {

/// Scales w onto the ball ||w||^2 <= P only when it lies outside.
inline Eigen::VectorXcd project_power_ball(const Eigen::VectorXcd& w, double P) {
  const double n2 = w.squaredNorm();
  if (n2 <= P) return w;
  return w * std::sqrt(P / n2);
}

/// Joint ball projection for a set of beamformers sharing one budget.
inline void project_power_ball(std::span<Eigen::VectorXcd> ws, double P) {
  double n2 = 0.0;
  for (const auto& w : ws) n2 += w.squaredNorm();
  if (n2 <= P) return;
  const double s = std::sqrt(P / n2);
  for (auto& w : ws) w *= s;
}

/// Nearest PSD matrix in Frobenius norm: negative eigenvalues clamped to zero.
inline Eigen::MatrixXcd project_psd(const Eigen::MatrixXcd& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm(H));
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

/// Euclidean projection of v onto {x >= 0, sum(x) <= cap}.
inline Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& v, double cap) {
  Eigen::VectorXd x = v.cwiseMax(0.0);
  if (x.sum() <= cap) return x;
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    cum += s[i];
    const double t = (cum - cap) / static_cast<double>(i + 1);
    if (i + 1 == s.size() || s[i + 1] <= t) {
      theta = t;
      break;
    }
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

/// Exact Frobenius projection of a block set onto
/// {W_g PSD, sum_g tr(W_g) <= cap}: eigenvalues of all blocks are projected
/// jointly onto the capped simplex.
inline std::vector<Eigen::MatrixXcd> project_trace_budget(std::span<const Eigen::MatrixXcd> blocks,
                                                          double cap) {
  std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>> eig;
  eig.reserve(blocks.size());
  Eigen::Index total = 0;
  for (const auto& B : blocks) {
    eig.emplace_back(herm(B));
    total += B.rows();
  }
  Eigen::VectorXd lam(total);
  Eigen::Index off = 0;
  for (const auto& es : eig) {
    lam.segment(off, es.eigenvalues().size()) = es.eigenvalues();
    off += es.eigenvalues().size();
  }
  const Eigen::VectorXd p = project_capped_simplex(lam, cap);
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(blocks.size());
  off = 0;
  for (const auto& es : eig) {
    const Eigen::Index d = es.eigenvalues().size();
    out.push_back(es.eigenvectors() * p.segment(off, d).asDiagonal() * es.eigenvectors().adjoint());
    off += d;
  }
  return out;
}

struct RandomizationOptions {
  int trials = 200;
  std::uint64_t seed = 0;
  double rank_gap_tol = 1e-6;  // lambda_2 <= tol * lambda_1 counts as rank one
  bool full_power = false;     // rescale every candidate to the budget instead of projecting
};

inline Eigen::VectorXcd fit_power(Eigen::VectorXcd w, double P, bool full_power) {
  const double n2 = w.squaredNorm();
  if (n2 <= 0.0) return w;
  if (full_power || n2 > P) w *= std::sqrt(P / n2);
  return w;
}

/// Rank-one beamformer from a covariance W. Returns sqrt(lambda_1) v_1 when W
/// is numerically rank one; otherwise the best-scoring candidate among the
/// principal direction and `trials` Gaussian randomization draws
/// w = U diag(sqrt(lambda)) z, z ~ CN(0, I). Every candidate is fitted to the
/// power budget before scoring.
inline Eigen::VectorXcd rank_one_extract(
    const Eigen::MatrixXcd& W, double P,
    const std::function<double(const Eigen::VectorXcd&)>& score,
    const RandomizationOptions& opt = {}) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm(W));
  const Eigen::Index d = W.rows();
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  const double l1 = lam(d - 1);
  if (!(l1 > 0.0)) return Eigen::VectorXcd::Zero(d);
  const Eigen::VectorXcd principal = fit_power(std::sqrt(l1) * es.eigenvectors().col(d - 1), P,
                                               opt.full_power);
  const double l2 = d > 1 ? lam(d - 2) : 0.0;
  if (l2 <= opt.rank_gap_tol * l1 || opt.trials <= 0) return principal;

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  const Eigen::MatrixXcd root = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
  Eigen::VectorXcd best = principal;
  double best_score = score(principal);
  Eigen::VectorXcd z(d);
  for (int t = 0; t < opt.trials; ++t) {
    for (Eigen::Index i = 0; i < d; ++i) z(i) = {nd(rng), nd(rng)};
    Eigen::VectorXcd cand = fit_power(root * z, P, opt.full_power);
    const double s = score(cand);
    if (s > best_score) {
      best_score = s;
      best = std::move(cand);
    }
  }
  return best;
}

/// Joint rank-one extraction for a set of covariances sharing one budget.
/// Candidates are drawn per block and fitted jointly to the budget.
inline std::vector<Eigen::VectorXcd> rank_one_extract_set(
    std::span<const Eigen::MatrixXcd> Ws, double P,
    const std::function<double(std::span<const Eigen::VectorXcd>)>& score,
    const RandomizationOptions& opt = {}) {
  const std::size_t G = Ws.size();
  std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>> eig;
  std::vector<Eigen::MatrixXcd> roots;
  bool all_rank_one = true;
  std::vector<Eigen::VectorXcd> principal;
  for (const auto& W : Ws) {
    eig.emplace_back(herm(W));
    const auto& es = eig.back();
    const Eigen::Index d = W.rows();
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    roots.push_back(es.eigenvectors() * lam.cwiseSqrt().asDiagonal());
    principal.push_back(std::sqrt(lam(d - 1)) * es.eigenvectors().col(d - 1));
    if (d > 1 && lam(d - 2) > opt.rank_gap_tol * lam(d - 1)) all_rank_one = false;
  }
  auto fit = [&](std::vector<Eigen::VectorXcd>& ws) {
    double n2 = 0.0;
    for (const auto& w : ws) n2 += w.squaredNorm();
    if (n2 <= 0.0) return;
    if (opt.full_power || n2 > P)
      for (auto& w : ws) w *= std::sqrt(P / n2);
  };
  fit(principal);
  if (all_rank_one || opt.trials <= 0) return principal;

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  std::vector<Eigen::VectorXcd> best = principal;
  double best_score = score(best);
  std::vector<Eigen::VectorXcd> cand(G);
  for (int t = 0; t < opt.trials; ++t) {
    for (std::size_t g = 0; g < G; ++g) {
      Eigen::VectorXcd z(roots[g].cols());
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = {nd(rng), nd(rng)};
      cand[g] = roots[g] * z;
    }
    fit(cand);
    const double s = score(cand);
    if (s > best_score) {
      best_score = s;
      best = cand;
    }
  }
  return best;
}

}  // namespace pass::solvers
