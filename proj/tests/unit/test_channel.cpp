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

#include "pass_secmcast/channel.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace pass;

using testutil::explicit_channel;

TEST(Channel, InwaveguideMagnitudesAndPhases) {
  const SystemConfig cfg = make_config(28e9, 3.0, 10.0, 4.0, 1, 4, 100, 1e-5, 1);
  Eigen::VectorXd row(4);
  row << 0.0, cfg.lambda_g, 2.0, 3.0;
  const Eigen::VectorXcd psi = inwaveguide_vector(row, cfg);
  for (int n = 0; n < 4; ++n) EXPECT_NEAR(std::abs(psi(n)), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(psi(0) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(psi(1) - 0.5), 0.0, 1e-12);
}

TEST(Channel, FreespaceEntry) {
  const SystemConfig cfg = make_config(28e9, 5.0, 20.0, 4.0, 1, 1, 100, 1e-5, 1);
  const cplx v = freespace_entry({10, 0, 5}, {10, 0, 0}, cfg);
  EXPECT_NEAR(std::abs(v), 1.705e-4, 0.001e-4);
  const cplx v2 = freespace_entry({10, 0, 10}, {10, 0, 0}, cfg);
  EXPECT_NEAR(std::abs(v2), std::abs(v) / 2.0, 1e-18);
  const cplx v3 = freespace_entry({cfg.lambda, 0, 0}, {0, 0, 0}, cfg);
  EXPECT_NEAR(std::arg(v3), 0.0, 1e-9);
  EXPECT_THROW(freespace_entry({1, 1, 0}, {1, 1, 0}, cfg), std::domain_error);
}

TEST(Channel, SingleElementChannel) {
  const SystemConfig cfg = make_config(28e9, 3.0, 10.0, 4.0, 1, 1, 100, 1e-5, 1);
  Eigen::MatrixXd x(1, 1);
  x << 4.2;
  const PinchingLayout L = make_layout(cfg, x);
  const Eigen::Vector3d rx(1.0, 0.5, 0.0);
  const cplx expect = freespace_entry(L.position(0, 0), rx, cfg) * std::polar(1.0, -cfg.k_g * 4.2);
  EXPECT_NEAR(std::abs(effective_channel(L, rx, cfg)(0) - expect), 0.0, 1e-18);
}

TEST(Channel, ExplicitPsiOracle) {
  std::mt19937_64 rng(11);
  for (int M = 1; M <= 3; ++M)
    for (int N = 1; N <= 3; ++N)
      for (int trial = 0; trial < 10; ++trial) {
        const SystemConfig cfg = make_config(28e9, 3.0, 10.0, 4.0, M, N, 400, 1e-5, 1);
        const PinchingLayout L = random_feasible_layout(cfg, rng());
        std::uniform_real_distribution<double> ux(0, cfg.D_x), uy(0, cfg.D_y);
        const Eigen::Vector3d rx(ux(rng), uy(rng), 0.0);
        const Eigen::VectorXcd a = effective_channel(L, rx, cfg);
        const Eigen::VectorXcd b = explicit_channel(L, rx, cfg);
        EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12 * b.cwiseAbs().maxCoeff());
      }
}

TEST(Channel, RowLocality) {
  const SystemConfig cfg = make_config(28e9, 3.0, 10.0, 4.0, 3, 2, 400, 1e-5, 1);
  PinchingLayout L = random_feasible_layout(cfg, 5);
  const Eigen::Vector3d rx(3.0, 1.0, 0.0);
  const Eigen::VectorXcd before = effective_channel(L, rx, cfg);
  L.x.row(2) = random_feasible_layout(cfg, 6).x.row(2);
  const Eigen::VectorXcd after = effective_channel(L, rx, cfg);
  EXPECT_EQ(before(0), after(0));
  EXPECT_EQ(before(1), after(1));
}

TEST(Channel, DestructivePairCancels) {
  const SystemConfig cfg = make_config(28e9, 3.0, 10.0, 4.0, 1, 2, 100, 1e-5, 1);
  // Equidistant PAs whose guided phases differ by 3*pi.
  const double half = 0.75 * cfg.lambda_g;
  Eigen::MatrixXd x(1, 2);
  x << 5.0 - half, 5.0 + half;
  const PinchingLayout L = make_layout(cfg, x);
  EXPECT_TRUE(is_feasible(L, cfg));
  const Eigen::Vector3d rx(5.0, 2.0, 0.0);
  EXPECT_LT(std::abs(effective_channel(L, rx, cfg)(0)), 1e-12 * std::abs(freespace_entry(L.position(0, 0), rx, cfg)));
}

TEST(Channel, TriangleBound) {
  std::mt19937_64 rng(3);
  const SystemConfig cfg = make_config(28e9, 3.0, 10.0, 4.0, 4, 3, 500, 1e-5, 1);
  for (int t = 0; t < 50; ++t) {
    const PinchingLayout L = random_feasible_layout(cfg, rng());
    const Eigen::Vector3d rx(std::uniform_real_distribution<double>(0, 10)(rng), 1.0, 0.0);
    const Eigen::VectorXcd h = effective_channel(L, rx, cfg);
    for (int m = 0; m < 4; ++m) {
      double bound = 0.0;
      for (int n = 0; n < 3; ++n)
        bound += std::sqrt(cfg.eta) / (std::sqrt(3.0) * (L.position(m, n) - rx).norm());
      EXPECT_LE(std::abs(h(m)), bound * (1 + 1e-12));
    }
  }
}

TEST(Channel, GainMatrixIsHermitianRankOne) {
  std::mt19937_64 rng(4);
  const Eigen::VectorXcd h = testutil::random_cvec(rng, 4);
  const Eigen::VectorXcd w = testutil::random_cvec(rng, 4);
  const Eigen::MatrixXcd H = gain_matrix(h);
  EXPECT_TRUE(is_hermitian(H));
  const double direct = std::norm(h.cwiseProduct(w).sum());
  EXPECT_NEAR((w.adjoint() * H * w)(0).real(), direct, 1e-12 * direct);
}

TEST(Channel, NormalizedChannelsScale) {
  const SystemConfig cfg = testutil::small_config();
  const Scenario sc = testutil::random_scenario(cfg, 2, 1, 9);
  const PinchingLayout L = random_feasible_layout(cfg, 9);
  const ChannelSet cs = pass_channels(L, sc, cfg);
  const ChannelSet n = normalized_channels(cs, sc, cfg.P_t);
  EXPECT_NEAR((n.bob[1] - cs.bob[1] * std::sqrt(cfg.P_t / sc.bobs[1].noise_w)).norm(), 0.0, 1e-9);
  EXPECT_EQ(cs.dim(), 4);
}
