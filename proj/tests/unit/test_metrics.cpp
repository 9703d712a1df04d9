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

#include "pass_secmcast/metrics.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace pass;

namespace {

// Brute-force min-min over all (k, l) pairs straight from the SINR definition.
double brute_min_rate(const ChannelSet& cs, const std::vector<Eigen::VectorXcd>& w, const Scenario& sc) {
  double best = std::numeric_limits<double>::infinity();
  for (int g = 0; g < sc.groups; ++g) {
    double group = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sc.bobs.size(); ++k) {
      if (sc.bobs[k].group != g) continue;
      for (std::size_t l = 0; l < std::max<std::size_t>(sc.eves.size(), 1); ++l) {
        auto power = [&](const Eigen::VectorXcd& h, std::size_t i) {
          std::complex<double> acc = 0.0;
          for (Eigen::Index m = 0; m < h.size(); ++m) acc += h(m) * w[i](m);
          return std::norm(acc);
        };
        double sb = 0, ib = 0, se = 0, ie = 0;
        for (std::size_t i = 0; i < w.size(); ++i) {
          (int(i) == g ? sb : ib) += power(cs.bob[k], i);
          if (!sc.eves.empty()) (int(i) == g ? se : ie) += power(cs.eve[l], i);
        }
        const double rb = std::log2(1 + sb / (ib + sc.bobs[k].noise_w));
        const double re = sc.eves.empty() ? 0.0 : std::log2(1 + se / (ie + sc.eves[l].noise_w));
        group = std::min(group, std::max(0.0, rb - re));
      }
    }
    best = std::min(best, group);
  }
  return best;
}

}  // namespace

TEST(Metrics, SingleGroupSinrIsSnr) {
  std::mt19937_64 rng(1);
  const Eigen::VectorXcd h = testutil::random_cvec(rng, 3), w = testutil::random_cvec(rng, 3);
  const std::vector<Eigen::VectorXcd> beams{w};
  EXPECT_NEAR(bob_sinr(h, beams, 0, 0.5), std::norm(h.cwiseProduct(w).sum()) / 0.5, 1e-12);
  const std::vector<Eigen::VectorXcd> zero{Eigen::VectorXcd::Zero(3)};
  EXPECT_EQ(bob_sinr(h, zero, 0, 0.5), 0.0);
  EXPECT_EQ(eve_sinr(h, zero, 0, 0.5), 0.0);
}

TEST(Metrics, OrthogonalGroupsAreInterferenceFree) {
  Eigen::VectorXcd h(2), w0(2), w1(2);
  h << 1.0, 0.0;
  w0 << 2.0, 0.0;
  w1 << 0.0, 5.0;
  const std::vector<Eigen::VectorXcd> beams{w0, w1};
  EXPECT_DOUBLE_EQ(bob_sinr(h, beams, 0, 1.0), 4.0);
}

TEST(Metrics, ArithmeticExampleAndClamp) {
  Scenario sc;
  sc.groups = 1;
  sc.bobs.push_back({0, {0, 0, 0}, 1.0});
  sc.eves.push_back({{0, 0, 0}, 1.0});
  Eigen::MatrixXd bg(1, 1), eg(1, 1);
  bg << 3.0;
  eg << 1.0;
  const std::vector<double> one{1.0};
  SecrecyReport r = report_from_gains(bg, eg, one, one, sc);
  EXPECT_DOUBLE_EQ(r.min_rate, 1.0);
  eg << 5.0;
  r = report_from_gains(bg, eg, one, one, sc);
  EXPECT_EQ(r.per_user_secrecy[0][0], 0.0);
  EXPECT_LT(r.min_rate_unclamped, 0.0);
}

TEST(Metrics, NoEvesMeansNoLeakage) {
  Scenario sc;
  sc.groups = 1;
  sc.bobs.push_back({0, {0, 0, 0}, 2.0});
  Eigen::MatrixXd bg(1, 1);
  bg << 6.0;
  const std::vector<double> n{2.0};
  const SecrecyReport r = report_from_gains(bg, Eigen::MatrixXd(0, 1), n, {}, sc);
  EXPECT_DOUBLE_EQ(r.min_rate, 2.0);
}

TEST(Metrics, ColocatedEveMatchesBob) {
  const SystemConfig cfg = testutil::small_config();
  Scenario sc = testutil::random_scenario(cfg, 1, 1, 2);
  sc.eves[0].pos = sc.bobs[0].pos;
  const ChannelSet cs = pass_channels(random_feasible_layout(cfg, 2), sc, cfg);
  std::mt19937_64 rng(2);
  const std::vector<Eigen::VectorXcd> w{testutil::random_cvec(rng, 4, 1e-3)};
  const SecrecyReport r = secrecy_report(cs, w, sc);
  EXPECT_DOUBLE_EQ(r.bob_sinr[0][0], r.eve_sinr[0][0]);
  EXPECT_EQ(r.min_rate, 0.0);
}

TEST(Metrics, BruteForceMinMaxAgreement) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const int G = 1 + t % 3;
    const SystemConfig cfg = testutil::small_config(4, 2, G);
    const Scenario sc = testutil::random_scenario(cfg, 2 * G + t % 2, t % 4, rng());
    const ChannelSet cs = pass_channels(random_feasible_layout(cfg, rng()), sc, cfg);
    std::vector<Eigen::VectorXcd> w;
    for (int g = 0; g < G; ++g) w.push_back(testutil::random_cvec(rng, 4, 1e-3));
    const SecrecyReport r = secrecy_report(cs, w, sc);
    EXPECT_NEAR(r.min_rate, brute_min_rate(cs, w, sc), 1e-12);
    EXPECT_DOUBLE_EQ(r.min_rate, std::max(0.0, r.min_rate_unclamped));
    for (int g = 0; g < G; ++g) {
      double mn = std::numeric_limits<double>::infinity();
      for (double v : r.per_user_secrecy[g]) {
        EXPECT_GE(v, 0.0);
        mn = std::min(mn, v);
      }
      EXPECT_EQ(r.group_rate[g], mn);
    }
  }
}

TEST(Metrics, PhaseInvariance) {
  std::mt19937_64 rng(6);
  const SystemConfig cfg = testutil::small_config(4, 2, 2);
  const Scenario sc = testutil::random_scenario(cfg, 4, 2, 6);
  const ChannelSet cs = pass_channels(random_feasible_layout(cfg, 6), sc, cfg);
  std::vector<Eigen::VectorXcd> w{testutil::random_cvec(rng, 4, 1e-3), testutil::random_cvec(rng, 4, 1e-3)};
  const SecrecyReport a = secrecy_report(cs, w, sc);
  for (auto& v : w) v *= std::polar(1.0, 1.234);
  const SecrecyReport b = secrecy_report(cs, w, sc);
  for (int g = 0; g < 2; ++g)
    for (std::size_t k = 0; k < a.bob_sinr[g].size(); ++k)
      EXPECT_NEAR(a.bob_sinr[g][k], b.bob_sinr[g][k], 1e-12 * a.bob_sinr[g][k]);
}

TEST(Metrics, MonotoneInSinrs) {
  Scenario sc;
  sc.groups = 1;
  sc.bobs.push_back({0, {0, 0, 0}, 1.0});
  sc.bobs.push_back({0, {0, 0, 0}, 1.0});
  sc.eves.push_back({{0, 0, 0}, 1.0});
  sc.eves.push_back({{0, 0, 0}, 1.0});
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  const std::vector<double> n{1.0, 1.0};
  for (int t = 0; t < 200; ++t) {
    Eigen::MatrixXd bg(2, 1), eg(2, 1);
    bg << u(rng), u(rng);
    eg << u(rng), u(rng);
    const SecrecyReport base = report_from_gains(bg, eg, n, n, sc);
    Eigen::MatrixXd eg2 = eg;
    eg2(t % 2, 0) += u(rng);
    const SecrecyReport more_eve = report_from_gains(bg, eg2, n, n, sc);
    Eigen::MatrixXd bg2 = bg;
    bg2(t % 2, 0) += u(rng);
    const SecrecyReport more_bob = report_from_gains(bg2, eg, n, n, sc);
    for (int k = 0; k < 2; ++k) EXPECT_LE(more_eve.per_user_secrecy[0][k], base.per_user_secrecy[0][k]);
    EXPECT_GE(more_bob.per_user_secrecy[0][t % 2], base.per_user_secrecy[0][t % 2]);
  }
}

TEST(Metrics, NormalizedReportMatchesPhysical) {
  std::mt19937_64 rng(12);
  const SystemConfig cfg = testutil::small_config(4, 2, 2);
  const Scenario sc = testutil::random_scenario(cfg, 4, 2, 12);
  const ChannelSet cs = pass_channels(random_feasible_layout(cfg, 12), sc, cfg);
  std::vector<Eigen::VectorXcd> w{testutil::random_cvec(rng, 4), testutil::random_cvec(rng, 4)};
  double n2 = 0;
  for (auto& v : w) n2 += v.squaredNorm();
  for (auto& v : w) v /= std::sqrt(n2);
  std::vector<Eigen::MatrixXcd> f(w.begin(), w.end());
  const SecrecyReport a = secrecy_report_normalized(normalized_channels(cs, sc, cfg.P_t), f, sc);
  for (auto& v : w) v *= std::sqrt(cfg.P_t);
  const SecrecyReport b = secrecy_report(cs, w, sc);
  EXPECT_NEAR(a.min_rate_unclamped, b.min_rate_unclamped, 1e-10);
}
