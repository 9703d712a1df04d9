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
#include <limits>
#include <optional>
#include <vector>

namespace pass::solvers {

enum class Sense { le, ge, eq };

struct SdpConstraint {
  Eigen::MatrixXcd A;  // Hermitian, d x d
  Sense sense = Sense::eq;
  double b = 0.0;
};

/// min tr(C X)  s.t.  tr(A_i X) {<=, >=, =} b_i,  X Hermitian PSD,
/// optionally tr(X) <= trace_cap.
struct LinearSDP {
  Eigen::MatrixXcd C;
  std::vector<SdpConstraint> constraints;
  std::optional<double> trace_cap;

  Eigen::Index dim() const { return C.rows(); }
};

/// Per-iteration record used to audit weak duality.
struct SdpIterate {
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double complementarity = 0.0;  // <X, Z> + s^T z
  double primal_res = 0.0;
  double dual_res = 0.0;
};

/// Optional starting point in the solver's internal form: one slack s_j and
/// dual slack z_j per inequality, in constraint order (trace cap last).
struct SdpStart {
  Eigen::MatrixXcd X;
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  Eigen::MatrixXcd Z;
  Eigen::VectorXd z;
};

struct SdpSolution {
  SolveInfo info;
  Eigen::MatrixXcd X;
  Eigen::VectorXd y;
  Eigen::MatrixXcd Z;
  std::vector<SdpIterate> history;
};

namespace detail {

// tr(A B) for square complex matrices, real part.
inline double re_trace_prod(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
  return (A.transpose().cwiseProduct(B)).sum().real();
}

// Largest alpha with X + alpha dX PSD (infinity when dX keeps X PSD).
inline double max_psd_step(const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& dX) {
  Eigen::LLT<Eigen::MatrixXcd> llt(X);
  double lam_min;
  if (llt.info() == Eigen::Success) {
    const Eigen::MatrixXcd Linv_dX = llt.matrixL().solve(dX);
    const Eigen::MatrixXcd S = llt.matrixL().solve(Linv_dX.adjoint()).adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm(S), Eigen::EigenvaluesOnly);
    lam_min = es.eigenvalues()(0);
  } else {
    return 0.0;
  }
  return lam_min >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lam_min;
}

inline double max_lp_step(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (dx(i) < 0.0) a = std::min(a, -x(i) / dx(i));
  return a;
}

}  // namespace detail

/// Primal-dual interior point (HKM direction, Mehrotra predictor-corrector)
/// for small dense complex SDPs. Inequalities get nonnegative slacks, so the
/// cone is one Hermitian block times a nonnegative orthant.
inline SdpSolution solve_linear_sdp(const LinearSDP& prob, const SolverSettings& set = {},
                                    const std::optional<SdpStart>& start = std::nullopt) {
  using Eigen::Index;
  using Eigen::MatrixXcd;
  using Eigen::MatrixXd;
  using Eigen::VectorXd;

  const Index d = prob.dim();
  std::vector<SdpConstraint> cons = prob.constraints;
  if (prob.trace_cap)
    cons.push_back({MatrixXcd::Identity(d, d), Sense::le, *prob.trace_cap});
  const Index m = static_cast<Index>(cons.size());

  // Slack bookkeeping: constraint i owns slack slot[i] (or -1) with sign sgn[i].
  std::vector<Index> slot(static_cast<std::size_t>(m), -1);
  VectorXd sgn = VectorXd::Zero(m);
  Index p = 0;
  for (Index i = 0; i < m; ++i) {
    const Sense s = cons[static_cast<std::size_t>(i)].sense;
    if (s == Sense::eq) continue;
    slot[static_cast<std::size_t>(i)] = p++;
    sgn(i) = s == Sense::le ? 1.0 : -1.0;
  }
  VectorXd b(m);
  for (Index i = 0; i < m; ++i) b(i) = cons[static_cast<std::size_t>(i)].b;
  const MatrixXcd C = herm(prob.C);
  std::vector<MatrixXcd> A;
  A.reserve(static_cast<std::size_t>(m));
  for (const auto& c : cons) A.push_back(herm(c.A));

  auto opA = [&](const MatrixXcd& X, const VectorXd& s) {
    VectorXd r(m);
    for (Index i = 0; i < m; ++i) {
      r(i) = detail::re_trace_prod(A[static_cast<std::size_t>(i)], X);
      if (slot[static_cast<std::size_t>(i)] >= 0) r(i) += sgn(i) * s(slot[static_cast<std::size_t>(i)]);
    }
    return r;
  };
  auto opAt = [&](const VectorXd& y, MatrixXcd& Mat, VectorXd& v) {
    Mat.setZero(d, d);
    v.setZero(p);
    for (Index i = 0; i < m; ++i) {
      Mat += y(i) * A[static_cast<std::size_t>(i)];
      if (slot[static_cast<std::size_t>(i)] >= 0) v(slot[static_cast<std::size_t>(i)]) += sgn(i) * y(i);
    }
  };

  double normA = 0.0;
  double ratio_b = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double na = A[static_cast<std::size_t>(i)].norm();
    normA = std::max(normA, na);
    ratio_b = std::max(ratio_b, (1.0 + std::abs(b(i))) / (1.0 + na));
  }
  const double normb = b.norm();
  const double normC = C.norm();

  MatrixXcd X, Z;
  VectorXd s, z, y;
  if (start) {
    X = start->X;
    s = start->s;
    y = start->y;
    Z = start->Z;
    z = start->z;
  } else {
    const double xi_p = std::max({10.0, std::sqrt(static_cast<double>(d)),
                                  static_cast<double>(d) * ratio_b});
    const double xi_d = std::max({10.0, std::sqrt(static_cast<double>(d)), normA, normC});
    X = xi_p * MatrixXcd::Identity(d, d);
    Z = xi_d * MatrixXcd::Identity(d, d);
    s = VectorXd::Constant(p, xi_p);
    z = VectorXd::Constant(p, xi_d);
    y = VectorXd::Zero(m);
  }
  const double n_tot = static_cast<double>(d + p);

  SdpSolution sol;
  MatrixXcd AtY;
  VectorXd aty;
  for (int it = 0; it <= set.sdp_max_iters; ++it) {
    const VectorXd Rp = b - opA(X, s);
    opAt(y, AtY, aty);
    const MatrixXcd Rd = C - Z - AtY;
    const VectorXd rd = -aty - z;
    const double pobj = detail::re_trace_prod(C, X);
    const double dobj = b.dot(y);
    const double compl_ = detail::re_trace_prod(X, Z) + s.dot(z);
    const double mu = compl_ / n_tot;
    const double pres = Rp.norm() / (1.0 + normb);
    const double dres = std::sqrt(Rd.squaredNorm() + rd.squaredNorm()) / (1.0 + normC);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    sol.history.push_back({pobj, dobj, compl_, pres, dres});

    sol.info.objective = pobj;
    sol.info.primal_residual = pres;
    sol.info.dual_residual = dres;
    sol.info.gap = gap;
    sol.info.iterations = it;
    if (pres < set.sdp_feas_tol && dres < set.sdp_feas_tol && gap < set.sdp_gap_tol) {
      sol.info.status = Status::optimal;
      break;
    }

    // Farkas certificate for primal infeasibility: b^T y > 0 with
    // -sum y_i A_i PSD and matching slack signs.
    if (dobj > 0.0 && it > 3) {
      const VectorXd ybar = y / dobj;
      MatrixXcd Ay;
      VectorXd ay;
      opAt(ybar, Ay, ay);
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(herm(-Ay), Eigen::EigenvaluesOnly);
      const double viol = std::max(-es.eigenvalues()(0), ay.size() ? ay.maxCoeff() : 0.0);
      if (viol < 1e-10 * std::max(1.0, normA)) {
        sol.info.status = Status::infeasible;
        sol.info.message = "primal infeasible (dual ray found)";
        break;
      }
    }
    // Primal ray: tr(C X) -> -inf with A(X) ~ 0.
    if (pobj < 0.0 && it > 3) {
      const VectorXd ax = opA(X, s) / (-pobj);
      if (ax.norm() < 1e-10 * std::max(1.0, normA)) {
        sol.info.status = Status::infeasible;
        sol.info.message = "dual infeasible (primal unbounded)";
        break;
      }
    }
    if (it == set.sdp_max_iters) {
      sol.info.status = Status::max_iters;
      sol.info.message = "iteration cap reached";
      break;
    }

    Eigen::LLT<MatrixXcd> zllt(Z);
    if (zllt.info() != Eigen::Success) {
      sol.info.status = Status::max_iters;
      sol.info.message = "dual slack lost definiteness";
      break;
    }
    const MatrixXcd Zinv = zllt.solve(MatrixXcd::Identity(d, d));
    const VectorXd sz = s.cwiseQuotient(z);

    // Schur complement M_ik = Re tr(A_i X A_k Z^-1) (+ s/z on slack diagonals).
    std::vector<MatrixXcd> XAZ(static_cast<std::size_t>(m));
    for (Index k = 0; k < m; ++k) XAZ[static_cast<std::size_t>(k)] = X * A[static_cast<std::size_t>(k)] * Zinv;
    MatrixXd Msch(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index k = i; k < m; ++k) {
        double v = detail::re_trace_prod(A[static_cast<std::size_t>(i)], XAZ[static_cast<std::size_t>(k)]);
        if (i == k && slot[static_cast<std::size_t>(i)] >= 0) v += sz(slot[static_cast<std::size_t>(i)]);
        Msch(i, k) = v;
        Msch(k, i) = v;
      }
    Msch.diagonal().array() += 1e-14 * (1.0 + Msch.diagonal().cwiseAbs().maxCoeff());
    Eigen::LDLT<MatrixXd> mfac(Msch);

    const MatrixXcd XRdZ = herm(X * Rd * Zinv);

    // Solves the HKM system for a given complementarity right-hand side.
    auto direction = [&](const MatrixXcd& Rc, const VectorXd& rc, MatrixXcd& dX, VectorXd& ds,
                         VectorXd& dy, MatrixXcd& dZ, VectorXd& dz) {
      VectorXd rhs(m);
      for (Index i = 0; i < m; ++i) {
        const auto& Ai = A[static_cast<std::size_t>(i)];
        double v = Rp(i) - detail::re_trace_prod(Ai, Rc) + detail::re_trace_prod(Ai, XRdZ);
        const Index j = slot[static_cast<std::size_t>(i)];
        if (j >= 0) v += -sgn(i) * rc(j) + sgn(i) * sz(j) * rd(j);
        rhs(i) = v;
      }
      dy = mfac.solve(rhs);
      MatrixXcd Ady;
      VectorXd ady;
      opAt(dy, Ady, ady);
      dZ = Rd - Ady;
      dz = rd - ady;
      dX = Rc - herm(X * dZ * Zinv);
      ds = rc - s.cwiseProduct(dz).cwiseQuotient(z);
    };

    // Predictor.
    MatrixXcd dXa, dZa;
    VectorXd dsa, dya, dza;
    direction(-X, -s, dXa, dsa, dya, dZa, dza);
    const double ap_a = std::min({1.0, detail::max_psd_step(X, dXa), detail::max_lp_step(s, dsa)});
    const double ad_a = std::min({1.0, detail::max_psd_step(Z, dZa), detail::max_lp_step(z, dza)});
    const double mu_a = (detail::re_trace_prod(X + ap_a * dXa, Z + ad_a * dZa) +
                         (s + ap_a * dsa).dot(z + ad_a * dza)) /
                        n_tot;
    const double sigma = std::clamp(std::pow(mu_a / mu, 3.0), 0.0, 1.0);

    // Corrector with the second-order term dXa dZa Z^-1.
    const MatrixXcd Rc = sigma * mu * Zinv - X - herm(dXa * dZa * Zinv);
    const VectorXd rc = (sigma * mu - dsa.cwiseProduct(dza).array()).matrix().cwiseQuotient(z) - s;
    MatrixXcd dX, dZ;
    VectorXd ds, dy, dz;
    direction(Rc, rc, dX, ds, dy, dZ, dz);

    const double tau = it < 5 ? 0.9 : 0.98;
    const double ap = std::min({1.0, tau * detail::max_psd_step(X, dX), tau * detail::max_lp_step(s, ds)});
    const double ad = std::min({1.0, tau * detail::max_psd_step(Z, dZ), tau * detail::max_lp_step(z, dz)});
    X = herm(X + ap * dX);
    s += ap * ds;
    y += ad * dy;
    Z = herm(Z + ad * dZ);
    z += ad * dz;
    if (ap < 1e-12 && ad < 1e-12) {
      sol.info.status = Status::max_iters;
      sol.info.message = "step length collapsed";
      break;
    }
  }
  sol.X = X;
  sol.y = y;
  sol.Z = Z;
  return sol;
}

}  // namespace pass::solvers
