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
#include "pass_secmcast/solvers/projections.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <span>
#include <vector>

namespace pass::solvers {

/// A family of concave functions F_j of a block set {W_g}. `gradient` writes
/// the Hermitian supergradient blocks G_g with dF_j = sum_g Re tr(G_g dW_g).
template <class P>
concept MaxMinProblem = requires(const P& p, std::span<const Eigen::MatrixXcd> W, Eigen::VectorXd& F,
                                 std::vector<Eigen::MatrixXcd>& G, int j) {
  { p.count() } -> std::convertible_to<int>;
  p.values(W, F);
  p.gradient(j, W, G);
};

struct MaxMinResult {
  SolveInfo info;
  std::vector<Eigen::MatrixXcd> W;  // best iterate
};

/// Projected supergradient ascent on min_j F_j over
/// {W_g PSD, sum_g tr(W_g) <= cap}. Step p moves a / sqrt(p) along the
/// normalized supergradient of the active function; a is a fraction of the
/// start's norm. Keeps the best iterate, the start included.
template <MaxMinProblem P>
MaxMinResult projected_supergradient_max_min(const P& prob, std::span<const Eigen::MatrixXcd> start,
                                             double cap, const SolverSettings& set = {}) {
  std::vector<Eigen::MatrixXcd> W = project_trace_budget(start, cap);
  double start_norm = 0.0;
  for (const auto& B : W) start_norm += B.squaredNorm();
  start_norm = std::sqrt(start_norm);
  const double a = set.supergradient_first_step * (start_norm > 0.0 ? start_norm : cap);

  Eigen::VectorXd F(prob.count());
  std::vector<Eigen::MatrixXcd> G(W.size());
  MaxMinResult res;
  res.W = W;
  prob.values(W, F);
  double best = F.size() ? F.minCoeff() : 0.0;
  int best_iter = 0;
  double last = best;

  for (int p = 1; p <= set.supergradient_iters; ++p) {
    Eigen::Index j = 0;
    F.minCoeff(&j);
    prob.gradient(static_cast<int>(j), W, G);
    double gn = 0.0;
    for (const auto& B : G) gn += B.squaredNorm();
    gn = std::sqrt(gn);
    if (!(gn > 0.0)) break;
    const double step = a / std::sqrt(static_cast<double>(p)) / gn;
    for (std::size_t g = 0; g < W.size(); ++g) W[g] += step * herm(G[g]);
    W = project_trace_budget(W, cap);
    prob.values(W, F);
    last = F.minCoeff();
    res.info.iterations = p;
    if (last > best) {
      best = last;
      best_iter = p;
      res.W = W;
    }
  }
  res.info.status = Status::max_iters;
  res.info.objective = best;
  res.info.primal_residual = best - last;
  res.info.message = "best iterate " + std::to_string(best_iter);
  return res;
}

}  // namespace pass::solvers
