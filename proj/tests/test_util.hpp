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

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace testutil {

inline Eigen::VectorXcd random_cvec(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = {nd(rng), nd(rng)};
  return v;
}

inline Eigen::MatrixXcd random_psd(std::mt19937_64& rng, Eigen::Index n, Eigen::Index rank) {
  Eigen::MatrixXcd F(n, rank);
  for (Eigen::Index r = 0; r < rank; ++r) F.col(r) = random_cvec(rng, n);
  return F * F.adjoint();
}

/// Desk-scale geometry used across suites.
inline pass::SystemConfig small_config(int M = 4, int N = 2, int G = 1, int Q = 200,
                                       double D_x = 10.0, double P_dbm = -20.0) {
  return pass::make_config(28e9, 3.0, D_x, 4.0, M, N, Q, pass::dbm_to_watt(P_dbm), G);
}

inline pass::Scenario random_scenario(const pass::SystemConfig& cfg, int K, int L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, cfg.D_x), uy(0.0, cfg.D_y);
  pass::Scenario sc;
  sc.groups = cfg.G;
  for (int k = 0; k < K; ++k) sc.bobs.push_back({k % cfg.G, {ux(rng), uy(rng), 0.0}, pass::dbm_to_watt(-90)});
  for (int l = 0; l < L; ++l) sc.eves.push_back({{ux(rng), uy(rng), 0.0}, pass::dbm_to_watt(-90)});
  return sc;
}

}  // namespace testutil
