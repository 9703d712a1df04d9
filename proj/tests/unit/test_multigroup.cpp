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

#include "pass_secmcast/multigroup.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace pass;

namespace {

std::vector<Eigen::VectorXcd> random_beams(std::mt19937_64& rng, int G, Eigen::Index M, double P_t) {
  std::vector<Eigen::VectorXcd> b;
  double n2 = 0.0;
  for (int g = 0; g < G; ++g) {
    b.push_back(testutil::random_cvec(rng, M));
    n2 += b.back().squaredNorm();
  }
  for (auto& w : b) w *= std::sqrt(P_t / n2);
  return b;
}

std::vector<Eigen::MatrixXcd> outer(const std::vector<Eigen::VectorXcd>& b) {
  std::vector<Eigen::MatrixXcd> W;
  for (const auto& w : b) W.push_back(w * w.adjoint());
  return W;
}

struct Case {
  SystemConfig cfg;
  Scenario sc;
  PinchingLayout layout;
  ChannelSet cs;
};

Case make_case(std::uint64_t seed, int G, int M = 4, int N = 2, int K = 2, int L = 2, int Q = 200) {
  Case c{testutil::small_config(M, N, G, Q), {}, {}, {}};
  c.sc = testutil::random_scenario(c.cfg, K, L, seed);
  c.layout = random_feasible_layout(c.cfg, seed + 3);
  c.cs = pass_channels(c.layout, c.sc, c.cfg);
  return c;
}

}  // namespace

TEST(DocTerms, SingleGroupReducesToRate) {
  Case c = make_case(1, 1);
  std::mt19937_64 rng(1);
  const auto b = random_beams(rng, 1, 4, c.cfg.P_t);
  const DocTerms d = doc_rate_terms(outer(b), c.cs, c.sc);
  for (std::size_t k = 0; k < c.sc.bobs.size(); ++k) EXPECT_DOUBLE_EQ(d.J1[0][k], std::log2(c.sc.bobs[k].noise_w));
  for (std::size_t l = 0; l < c.sc.eves.size(); ++l) EXPECT_DOUBLE_EQ(d.F2[0][l], std::log2(c.sc.eves[l].noise_w));
  EXPECT_NEAR(d.value, secrecy_report(c.cs, b, c.sc).min_rate_unclamped, 1e-9);
}

TEST(DocTerms, ZeroCovarianceGivesZero) {
  Case c = make_case(2, 2);
  const std::vector<Eigen::MatrixXcd> W(2, Eigen::MatrixXcd::Zero(4, 4));
  const DocTerms d = doc_rate_terms(W, c.cs, c.sc);
  for (int g = 0; g < 2; ++g) {
    for (std::size_t k = 0; k < d.F1[g].size(); ++k) EXPECT_DOUBLE_EQ(d.F1[g][k], d.J1[g][k]);
    for (std::size_t l = 0; l < d.F2[g].size(); ++l) EXPECT_DOUBLE_EQ(d.F2[g][l], d.J2[g][l]);
  }
  EXPECT_DOUBLE_EQ(d.value, 0.0);
}

TEST(DocTerms, RankOneMatchesPairwiseRates) {
  for (int seed = 0; seed < 20; ++seed) {
    Case c = make_case(10 + seed, 2, 4, 2, 4, 3);
    std::mt19937_64 rng(seed);
    const auto b = random_beams(rng, 2, 4, c.cfg.P_t);
    const DocTerms d = doc_rate_terms(outer(b), c.cs, c.sc);
    // Worst (k, l) pair per group from SINRs directly.
    double oracle = std::numeric_limits<double>::infinity();
    for (int g = 0; g < 2; ++g)
      for (std::size_t k = 0; k < c.sc.bobs.size(); ++k) {
        if (c.sc.bobs[k].group != g) continue;
        const double rb = std::log2(1.0 + bob_sinr(c.cs.bob[k], b, g, c.sc.bobs[k].noise_w));
        for (std::size_t l = 0; l < c.sc.eves.size(); ++l)
          oracle = std::min(oracle, rb - std::log2(1.0 + eve_sinr(c.cs.eve[l], b, g, c.sc.eves[l].noise_w)));
      }
    EXPECT_NEAR(d.value, oracle, 1e-9);
  }
}

TEST(MmSurrogate, TightAtExpansionAndUpperBoundsJ) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Case c = make_case(100 + trial, 2, 3, 2, 3, 2);
    const ChannelSet ncs = normalized_channels(c.cs, c.sc, c.cfg.P_t);
    std::vector<Eigen::MatrixXcd> Wt, W;
    for (int g = 0; g < 2; ++g) {
      Wt.push_back(testutil::random_psd(rng, 3, 2) * 0.2);
      W.push_back(testutil::random_psd(rng, 3, 1 + trial % 3) * 0.2);
    }
    const MmSurrogate s = make_mm_surrogate(ncs, c.sc, Wt);
    std::vector<Eigen::MatrixXcd> Wphys;
    for (const auto& X : Wt) Wphys.push_back(X * c.cfg.P_t);
    EXPECT_NEAR(s.objective(Wt), doc_rate_terms(Wphys, c.cs, c.sc).value, 1e-9);
    for (std::size_t k = 0; k < ncs.bob.size(); ++k) {
      const int g = c.sc.bobs[k].group;
      double q = 0.0;
      for (int i = 0; i < 2; ++i)
        if (i != g) q += std::real((gain_matrix(ncs.bob[k]) * W[i]).trace());
      EXPECT_GE(s.J1_hat(static_cast<int>(k), W), std::log2(1.0 + q) - 1e-9);
      EXPECT_NEAR(s.J1_hat(static_cast<int>(k), Wt), s.J1_tilde[k], 1e-12);
    }
    for (int g = 0; g < 2; ++g)
      for (std::size_t l = 0; l < ncs.eve.size(); ++l) {
        double q = 0.0;
        for (int i = 0; i < 2; ++i) q += std::real((gain_matrix(ncs.eve[l]) * W[i]).trace());
        EXPECT_GE(s.J2_hat(g, static_cast<int>(l), W), std::log2(1.0 + q) - 1e-9);
      }
  }
}

TEST(MmSurrogate, GradientMatchesFiniteDifference) {
  std::mt19937_64 rng(8);
  Case c = make_case(7, 2, 3, 2, 2, 2);
  const ChannelSet ncs = normalized_channels(c.cs, c.sc, c.cfg.P_t);
  std::vector<Eigen::MatrixXcd> W = {testutil::random_psd(rng, 3, 2) * 0.1, testutil::random_psd(rng, 3, 2) * 0.1};
  const MmSurrogate s = make_mm_surrogate(ncs, c.sc, W);
  std::vector<Eigen::MatrixXcd> D = {testutil::random_psd(rng, 3, 3) * 0.05, testutil::random_psd(rng, 3, 3) * 0.05};
  for (int j = 0; j < s.count(); ++j) {
    std::vector<Eigen::MatrixXcd> G;
    s.gradient(j, W, G);
    double analytic = 0.0;
    for (int g = 0; g < 2; ++g) analytic += std::real((G[g] * D[g]).trace());
    const double h = 1e-6;
    std::vector<Eigen::MatrixXcd> Wp = W, Wm = W;
    for (int g = 0; g < 2; ++g) {
      Wp[g] += h * D[g];
      Wm[g] -= h * D[g];
    }
    Eigen::VectorXd fp, fm;
    s.values(Wp, fp);
    s.values(Wm, fm);
    EXPECT_NEAR(analytic, (fp(j) - fm(j)) / (2 * h), 1e-6 * std::max(1.0, std::abs(analytic)));
  }
}

TEST(MmSdr, FixedPointAtSingleConstraintOptimum) {
  Case c = make_case(3, 1, 4, 2, 1, 0);
  const Eigen::VectorXcd h = c.cs.bob[0];
  const Eigen::VectorXcd w = std::sqrt(c.cfg.P_t) * h.conjugate() / h.norm();
  const std::vector<Eigen::MatrixXcd> W = {w * w.adjoint()};
  const MmSdrResult r = mm_sdr_txbf_update(W, c.cs, c.sc, c.cfg.P_t);
  EXPECT_LE((r.W[0] - W[0]).norm(), 1e-9 * W[0].norm());
  EXPECT_NEAR(r.t, r.t_start, 1e-12);
}

TEST(MmSdr, SurrogateNeverDecreases) {
  for (int seed = 0; seed < 10; ++seed) {
    Case c = make_case(30 + seed, 2);
    std::mt19937_64 rng(seed);
    const auto W = outer(random_beams(rng, 2, 4, c.cfg.P_t));
    const MmSdrResult r = mm_sdr_txbf_update(W, c.cs, c.sc, c.cfg.P_t);
    EXPECT_GE(r.t, r.t_start);
    EXPECT_NEAR(r.t_start, doc_rate_terms(W, c.cs, c.sc).value, 1e-9);
    double tr = 0.0;
    for (const auto& X : r.W) tr += std::real(X.trace());
    EXPECT_LE(tr, c.cfg.P_t * (1 + 1e-9));
  }
}

TEST(MmSdr, SingleGroupTracksSdr) {
  double mm = 0.0, sdr = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    Case c = make_case(40 + seed, 1);
    AoOptions opt;
    opt.seed = seed;
    mm += optimize_multigroup(c.sc, c.cfg, TxbfMethod::mm_sdr, opt, c.cs).report.min_rate;
    sdr += sdr_single_group(c.cs, c.sc, c.cfg.P_t).rate;
  }
  EXPECT_NEAR(mm / sdr, 1.0, 0.05);
}

TEST(BBound, TightAndBelowRatio) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ur(0.01, 10.0);
  for (int i = 0; i < 2000; ++i) {
    const cplx x(nd(rng), nd(rng)), xt(nd(rng), nd(rng));
    const double r = ur(rng), rt = ur(rng);
    EXPECT_LE(b_bound(x, r, xt, rt), std::norm(x) / r + 1e-9);
    EXPECT_NEAR(b_bound(x, r, x, r), std::norm(x) / r, 1e-12 * std::max(1.0, std::norm(x) / r));
  }
}

TEST(Socp, StepRespectsBoundsAndBudget) {
  for (int seed = 0; seed < 10; ++seed) {
    Case c = make_case(50 + seed, 2);
    std::mt19937_64 rng(seed);
    const auto b = random_beams(rng, 2, 4, c.cfg.P_t);
    const SocpResult r = socp_txbf_update(b, c.cs, c.sc, c.cfg.P_t);
    ASSERT_NE(r.info.status, solvers::Status::infeasible);
    double p = 0.0;
    for (const auto& w : r.beams) p += w.squaredNorm();
    EXPECT_LE(p, c.cfg.P_t * (1 + 1e-9));
    const double tau = std::exp2(r.bounds.t);
    for (std::size_t k = 0; k < c.sc.bobs.size(); ++k)
      for (const double e : r.bounds.xi_e[c.sc.bobs[k].group])
        EXPECT_LE(tau * (1.0 + e), 1.0 + r.bounds.xi_b[k] + 1e-9);
    // The bound variables are conservative for the new beams.
    const ChannelSet ncs = normalized_channels(c.cs, c.sc, c.cfg.P_t);
    std::vector<Eigen::VectorXcd> v;
    for (const auto& w : r.beams) v.push_back(w / std::sqrt(c.cfg.P_t));
    const SocpBounds got = achieved_bounds(ncs, c.sc, v);
    for (std::size_t k = 0; k < got.xi_b.size(); ++k) EXPECT_GE(got.xi_b[k], r.bounds.xi_b[k] - 1e-6);
    for (int g = 0; g < 2; ++g)
      for (std::size_t l = 0; l < got.xi_e[g].size(); ++l) EXPECT_LE(got.xi_e[g][l], r.bounds.xi_e[g][l] + 1e-6);
    EXPECT_GE(secrecy_report(c.cs, r.beams, c.sc).min_rate_unclamped, r.bounds.t - 1e-6);
  }
}

TEST(MmPinch, MatchesExhaustiveSearch) {
  for (int trial = 0; trial < 30; ++trial) {
    const int G = 1 + trial % 2;
    Case c = make_case(200 + trial, G, 3, 2, 2 + trial % 2, trial % 3, 120);
    std::mt19937_64 rng(trial);
    std::vector<Eigen::MatrixXcd> F;
    for (int g = 0; g < G; ++g) F.push_back(testutil::random_cvec(rng, 3 * (1 + trial % 2)).reshaped(3, 1 + trial % 2));
    double n2 = 0.0;
    for (const auto& f : F) n2 += f.squaredNorm();
    for (auto& f : F) f *= std::sqrt(c.cfg.P_t / n2);
    const int m = static_cast<int>(rng() % 3), n = static_cast<int>(rng() % 2);
    GroupAmplitudes amps = group_amplitudes(c.cs, c.sc, F);
    const auto oracle = testutil::brute_force_mm_element(c.layout, c.sc, F, c.cfg, m, n);
    const ElementUpdate up = mm_update_element(c.layout, m, n, c.sc, F, amps, c.cfg);
    ASSERT_TRUE(oracle);
    EXPECT_EQ(up.candidate, oracle->first) << "trial " << trial;
    EXPECT_NEAR(up.surrogate, oracle->second, 1e-9);
  }
}

TEST(MmPinch, SurrogateTightAtCurrentPosition) {
  for (int trial = 0; trial < 10; ++trial) {
    Case c = make_case(300 + trial, 2);
    std::mt19937_64 rng(trial);
    const auto b = random_beams(rng, 2, 4, c.cfg.P_t);
    const std::vector<Eigen::MatrixXcd> F(b.begin(), b.end());
    GroupAmplitudes amps = group_amplitudes(c.cs, c.sc, F);
    const MmElement e = decompose_mm(c.layout, c.sc, F, amps, c.cfg, 1, 1);
    EXPECT_NEAR(e.surrogate(c.layout.x(1, 1)), doc_rate_terms(outer(b), c.cs, c.sc).value, 1e-9);
  }
}

TEST(MmPinch, SingleGroupWithoutEvesAgreesWithElementSearch) {
  int compared = 0;
  for (int trial = 0; trial < 10; ++trial) {
    Case c = make_case(400 + trial, 1, 2, 3, 1, 0);
    std::mt19937_64 rng(trial);
    const auto b = random_beams(rng, 1, 2, c.cfg.P_t);
    const std::vector<Eigen::MatrixXcd> F(b.begin(), b.end());
    for (int n = 0; n < 3; ++n) {
      PinchingLayout l1 = c.layout, l2 = c.layout;
      AmplitudeState a1 = amplitudes(c.cs, c.sc, b[0]);
      GroupAmplitudes a2 = group_amplitudes(c.cs, c.sc, F);
      const ElementUpdate u1 = update_element(l1, 0, n, c.sc, b[0], a1, c.cfg);
      const ElementUpdate u2 = mm_update_element(l2, 0, n, c.sc, F, a2, c.cfg);
      if (u1.surrogate <= 0.0) continue;  // clamped plateau: argmax is the first point
      EXPECT_EQ(u1.candidate, u2.candidate);
      ++compared;
    }
  }
  EXPECT_GE(compared, 10);
}

TEST(MmPinch, SweepKeepsAmplitudesInSync) {
  Case c = make_case(500, 2, 3, 3, 2, 2);
  std::mt19937_64 rng(1);
  const auto b = random_beams(rng, 2, 3, c.cfg.P_t);
  const std::vector<Eigen::MatrixXcd> F(b.begin(), b.end());
  GroupAmplitudes amps = group_amplitudes(c.cs, c.sc, F);
  const double before = multigroup_rate_unclamped(amps, c.sc);
  mm_pinch_update(c.layout, c.sc, F, amps, c.cfg);
  EXPECT_TRUE(is_feasible(c.layout, c.cfg));
  const GroupAmplitudes fresh = group_amplitudes(pass_channels(c.layout, c.sc, c.cfg), c.sc, F);
  for (std::size_t k = 0; k < fresh.bob.size(); ++k)
    for (int g = 0; g < 2; ++g) EXPECT_LE((fresh.bob[k][g] - amps.bob[k][g]).norm(), 1e-10 * std::max(1.0, fresh.bob[k][g].norm()));
  EXPECT_GE(multigroup_rate_unclamped(amps, c.sc), before);
}

TEST(AoMultigroup, TraceMonotoneAndReportConsistent) {
  for (TxbfMethod method : {TxbfMethod::mm_sdr, TxbfMethod::socp}) {
    for (int seed = 0; seed < 4; ++seed) {
      Case c = make_case(600 + seed, 2);
      AoOptions opt;
      opt.seed = seed;
      const AoResult r = ao_multigroup(c.sc, c.cfg, method, opt);
      for (std::size_t i = 1; i < r.trace.size(); ++i)
        EXPECT_GE(r.trace[i].rate_unclamped, r.trace[i - 1].rate_unclamped - 1e-9);
      ASSERT_TRUE(r.layout);
      EXPECT_TRUE(is_feasible(*r.layout, c.cfg));
      const ChannelSet cs = pass_channels(*r.layout, c.sc, c.cfg);
      double brute = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < c.sc.bobs.size(); ++k) {
        const int g = c.sc.bobs[k].group;
        double leak = 0.0;
        for (std::size_t l = 0; l < c.sc.eves.size(); ++l)
          leak = std::max(leak, std::log2(1.0 + eve_sinr(cs.eve[l], r.beams, g, c.sc.eves[l].noise_w)));
        brute = std::min(brute, std::max(0.0, std::log2(1.0 + bob_sinr(cs.bob[k], r.beams, g, c.sc.bobs[k].noise_w)) - leak));
      }
      EXPECT_NEAR(r.report.min_rate, brute, 1e-12);
    }
  }
}

TEST(AoMultigroup, SplittingUsersCostsRate) {
  double split = 0.0, merged = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    Case c2 = make_case(700 + seed, 2, 4, 2, 4, 2);
    SystemConfig c1 = c2.cfg;
    c1.G = 1;
    Scenario s1 = c2.sc;
    s1.groups = 1;
    for (auto& b : s1.bobs) b.group = 0;
    AoOptions opt;
    opt.seed = seed;
    split += ao_multigroup(c2.sc, c2.cfg, TxbfMethod::mm_sdr, opt).report.min_rate;
    merged += ao_multigroup(s1, c1, TxbfMethod::mm_sdr, opt).report.min_rate;
  }
  EXPECT_LT(split, merged);
}

TEST(AoMultigroup, RejectsSingleGroupMethods) {
  Case c = make_case(1, 2);
  EXPECT_THROW(ao_multigroup(c.sc, c.cfg, TxbfMethod::sdr), std::invalid_argument);
}
