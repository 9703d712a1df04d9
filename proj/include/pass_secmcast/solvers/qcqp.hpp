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
#include <stdexcept>
#include <vector>

namespace pass::solvers {

/// f(z) = 0.5 z^T P z + q^T z + r with P symmetric PSD. An empty P means linear.
struct Quadratic {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  double r = 0.0;

  bool linear() const { return P.size() == 0; }
  double value(const Eigen::VectorXd& z) const {
    return (linear() ? 0.0 : 0.5 * z.dot(P * z)) + q.dot(z) + r;
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& z) const {
    return linear() ? Eigen::VectorXd(q) : Eigen::VectorXd(P * z + q);
  }
};

/// min f_0(z) s.t. f_i(z) <= 0, A z = b, all f convex quadratic.
struct QcqpProblem {
  Quadratic objective;
  std::vector<Quadratic> constraints;
  Eigen::MatrixXd A;  // may be empty
  Eigen::VectorXd b;

  Eigen::Index dim() const { return objective.q.size(); }
};

struct QcqpResult {
  SolveInfo info;
  Eigen::VectorXd z;
  Eigen::VectorXd lambda;  // inequality multipliers
  Eigen::VectorXd nu;      // equality multipliers
};

namespace detail {

inline double max_constraint(const std::vector<Quadratic>& cons, const Eigen::VectorXd& z) {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& c : cons) v = std::max(v, c.value(z));
  return v;
}

// Checks P_i PSD for every quadratic piece.
inline bool quadratics_convex(const QcqpProblem& p) {
  auto psd = [](const Quadratic& f) {
    if (f.linear()) return true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (f.P + f.P.transpose()),
                                                     Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0) >= -1e-10 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  };
  if (!psd(p.objective)) return false;
  return std::all_of(p.constraints.begin(), p.constraints.end(), psd);
}

struct BarrierOutcome {
  Eigen::VectorXd z;
  Eigen::VectorXd nu;
  double t = 1.0;
  double stationarity = 0.0;
  int newton = 0;
  bool stopped_early = false;
  bool ok = true;
};

// Barrier path-following from a strictly feasible z. `early` is polled after
// every Newton step and may end the run.
template <class Early>
BarrierOutcome barrier_path(const QcqpProblem& p, Eigen::VectorXd z, double kkt_tol, int max_newton,
                            Early early) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const Eigen::Index n = z.size();
  const Eigen::Index meq = p.A.rows();
  const auto m = static_cast<double>(p.constraints.size());
  BarrierOutcome out;
  const double mu = 20.0;
  double t = 1.0;
  if (m > 0) {
    const double g0 = p.objective.gradient(z).norm();
    t = std::clamp(m / std::max(std::abs(p.objective.value(z)), 1e-3 * (1.0 + g0)), 1e-2, 1e3);
  }
  VectorXd nu = VectorXd::Zero(meq);

  for (;;) {
    for (int it = 0; it < max_newton; ++it) {
      VectorXd grad = t * p.objective.gradient(z);
      MatrixXd H = p.objective.linear() ? MatrixXd::Zero(n, n) : MatrixXd(t * p.objective.P);
      for (const auto& c : p.constraints) {
        const double f = c.value(z);
        const VectorXd gi = c.gradient(z);
        grad += gi / (-f);
        H += gi * gi.transpose() / (f * f);
        if (!c.linear()) H += c.P / (-f);
      }
      MatrixXd K = MatrixXd::Zero(n + meq, n + meq);
      K.topLeftCorner(n, n) = H;
      VectorXd rhs(n + meq);
      rhs.head(n) = -grad;
      if (meq > 0) {
        K.topRightCorner(n, meq) = p.A.transpose();
        K.bottomLeftCorner(meq, n) = p.A;
        rhs.tail(meq) = p.b - p.A * z;
      }
      K.topLeftCorner(n, n).diagonal().array() += 1e-13 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
      const VectorXd sol = K.fullPivLu().solve(rhs);
      const VectorXd dz = sol.head(n);
      nu = sol.tail(meq) / t;
      const double dec2 = dz.dot(H * dz);
      ++out.newton;
      if (dec2 / 2.0 <= 1e-12 && (meq == 0 || (p.A * z - p.b).norm() < 1e-12)) break;

      auto phi = [&](const VectorXd& x) {
        double v = t * p.objective.value(x);
        for (const auto& c : p.constraints) {
          const double f = c.value(x);
          if (!(f < 0.0)) return std::numeric_limits<double>::infinity();
          v -= std::log(-f);
        }
        return v;
      };
      const double phi0 = phi(z);
      const double slope = grad.dot(dz);
      double s = 1.0;
      VectorXd zn = z + dz;
      while (s > 1e-14) {
        zn = z + s * dz;
        const double pn = phi(zn);
        if (std::isfinite(pn) && pn <= phi0 + 0.25 * s * std::min(slope, 0.0)) break;
        s *= 0.5;
      }
      if (s <= 1e-14) break;
      z = zn;
      if (early(z)) {
        out.stopped_early = true;
        out.z = z;
        out.t = t;
        out.nu = nu;
        return out;
      }
    }
    // Stationarity of the Lagrangian with lambda_i = 1 / (-t f_i).
    VectorXd lag = p.objective.gradient(z);
    for (const auto& c : p.constraints) lag += c.gradient(z) / (-t * c.value(z));
    if (meq > 0) lag += p.A.transpose() * nu;
    out.stationarity = lag.norm() / (1.0 + p.objective.gradient(z).norm());
    if (m == 0 || m / t < kkt_tol) break;
    if (out.newton > 40 * max_newton) {
      out.ok = false;
      break;
    }
    t *= mu;
  }
  out.z = z;
  out.t = t;
  out.nu = nu;
  return out;
}

}  // namespace detail

/// Log-barrier interior point for convex QCQPs with a phase-I search for a
/// strictly feasible point. `start` seeds phase I (or is used directly when
/// strictly feasible).
inline QcqpResult solve_qcqp_convex(const QcqpProblem& prob,
                                    const std::optional<Eigen::VectorXd>& start = std::nullopt,
                                    const SolverSettings& set = {}) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  if (!detail::quadratics_convex(prob)) throw std::invalid_argument("solve_qcqp_convex: nonconvex quadratic");
  const Eigen::Index n = prob.dim();
  const Eigen::Index meq = prob.A.rows();
  QcqpResult res;

  VectorXd z = start ? *start : VectorXd::Zero(n);
  if (meq > 0) {
    const VectorXd r = prob.b - prob.A * z;
    z += prob.A.transpose() * (prob.A * prob.A.transpose()).ldlt().solve(r);
  }

  if (!prob.constraints.empty() && !(detail::max_constraint(prob.constraints, z) < 0.0)) {
    // Phase I: min s s.t. f_i(z) <= s, s >= -1, over (z, s).
    QcqpProblem ph;
    ph.objective.q = VectorXd::Zero(n + 1);
    ph.objective.q(n) = 1.0;
    for (const auto& c : prob.constraints) {
      Quadratic a;
      if (!c.linear()) {
        a.P = MatrixXd::Zero(n + 1, n + 1);
        a.P.topLeftCorner(n, n) = c.P;
      }
      a.q = VectorXd::Zero(n + 1);
      a.q.head(n) = c.q;
      a.q(n) = -1.0;
      a.r = c.r;
      ph.constraints.push_back(std::move(a));
    }
    Quadratic floor;
    floor.q = VectorXd::Zero(n + 1);
    floor.q(n) = -1.0;
    floor.r = -1.0;
    ph.constraints.push_back(floor);
    if (meq > 0) {
      ph.A = MatrixXd::Zero(meq, n + 1);
      ph.A.leftCols(n) = prob.A;
      ph.b = prob.b;
    }
    VectorXd zs(n + 1);
    zs.head(n) = z;
    zs(n) = std::max(detail::max_constraint(prob.constraints, z), 0.0) + 1.0;
    auto ph_out = detail::barrier_path(ph, zs, 1e-10, set.qcqp_max_newton,
                                       [&](const VectorXd& x) { return x(n) < 0.0 &&
                                           detail::max_constraint(prob.constraints, x.head(n)) < 0.0; });
    res.info.iterations += ph_out.newton;
    z = ph_out.z.head(n);
    if (!(detail::max_constraint(prob.constraints, z) < 0.0)) {
      res.info.status = Status::infeasible;
      res.info.message = "phase I found no strictly feasible point";
      res.info.objective = ph_out.z(n);
      res.z = z;
      return res;
    }
  }

  auto out = detail::barrier_path(prob, z, set.qcqp_kkt_tol, set.qcqp_max_newton,
                                  [](const VectorXd&) { return false; });
  res.z = out.z;
  res.nu = out.nu;
  const auto m = static_cast<Eigen::Index>(prob.constraints.size());
  res.lambda.resize(m);
  for (Eigen::Index i = 0; i < m; ++i)
    res.lambda(i) = 1.0 / (-out.t * prob.constraints[static_cast<std::size_t>(i)].value(out.z));
  const double eq_res = meq > 0 ? (prob.A * out.z - prob.b).norm() : 0.0;
  const double gap = m > 0 ? static_cast<double>(m) / out.t : 0.0;
  const double kkt = std::max({out.stationarity, gap, eq_res});
  res.info.iterations += out.newton;
  res.info.objective = prob.objective.value(out.z);
  res.info.primal_residual = std::max(eq_res, m > 0 ? std::max(0.0, detail::max_constraint(prob.constraints, out.z)) : 0.0);
  res.info.dual_residual = out.stationarity;
  res.info.gap = gap;
  res.info.status = kkt < set.qcqp_kkt_tol && out.ok ? Status::optimal : Status::max_iters;
  if (res.info.status != Status::optimal) res.info.message = "KKT residual " + std::to_string(kkt);
  return res;
}

}  // namespace pass::solvers
