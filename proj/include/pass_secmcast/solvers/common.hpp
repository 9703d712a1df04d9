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

#include <string>

namespace pass::solvers {

enum class Status { optimal, max_iters, infeasible };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::max_iters: return "max_iters";
    case Status::infeasible: return "infeasible";
  }
  return "unknown";
}

/// Outcome of one convex solve. Residual meaning depends on the solver:
/// primal/dual feasibility for the SDP, KKT stationarity for the barrier
/// method, and the best-vs-final objective spread for supergradient ascent.
struct SolveInfo {
  Status status = Status::max_iters;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  std::string message;
};

/// Tolerances and caps shared by the solvers; loaded from the harness config.
struct SolverSettings {
  double sdp_feas_tol = 1e-8;
  double sdp_gap_tol = 1e-7;
  int sdp_max_iters = 100;
  double qcqp_kkt_tol = 1e-7;
  int qcqp_max_newton = 200;
  int supergradient_iters = 2000;
  double supergradient_first_step = 0.1;  // fraction of ||start||
  int randomization_trials = 200;
};

// Hermitian part of a square complex matrix.
inline Eigen::MatrixXcd herm(const Eigen::MatrixXcd& A) { return 0.5 * (A + A.adjoint()); }

}  // namespace pass::solvers
