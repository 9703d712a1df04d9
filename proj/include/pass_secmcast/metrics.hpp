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

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace pass {

/// Per-user SINRs and secrecy rates of one beamformer set. Rates in bits/s/Hz.
struct SecrecyReport {
  std::vector<std::vector<double>> bob_sinr;          // [g][k], k within group g
  std::vector<std::vector<double>> eve_sinr;          // [g][l]
  std::vector<std::vector<double>> per_user_secrecy;  // [g][k], clamped at 0
  std::vector<double> group_rate;                     // [g]
  double min_rate = 0.0;
  // Same min-min structure without the [.]^+ clamp. min_rate == max(0, this).
  double min_rate_unclamped = 0.0;
};

/// SINR of a receiver with effective channel h for the message of group g.
/// Interference is every other group's stream.
inline double bob_sinr(const Eigen::VectorXcd& h, std::span<const Eigen::VectorXcd> beams, int g,
                       double noise) {
  double signal = 0.0;
  double interference = 0.0;
  for (int i = 0; i < static_cast<int>(beams.size()); ++i) {
    const double p = std::norm(h.cwiseProduct(beams[static_cast<std::size_t>(i)]).sum());
    (i == g ? signal : interference) += p;
  }
  return signal / (interference + noise);
}

/// Eavesdropper SINR when decoding group g; identical form to bob_sinr.
inline double eve_sinr(const Eigen::VectorXcd& h, std::span<const Eigen::VectorXcd> beams, int g,
                       double noise) {
  return bob_sinr(h, beams, g, noise);
}

/// Secrecy report from received powers: bob_gain(i, g) is the power bob i
/// receives from group g's stream, eve_gain(l, g) likewise for eve l.
inline SecrecyReport report_from_gains(const Eigen::MatrixXd& bob_gain,
                                       const Eigen::MatrixXd& eve_gain,
                                       std::span<const double> bob_noise,
                                       std::span<const double> eve_noise, const Scenario& sc) {
  const int G = sc.groups;
  const auto members = sc.group_members();
  const int L = static_cast<int>(sc.eves.size());
  SecrecyReport rep;
  rep.bob_sinr.resize(static_cast<std::size_t>(G));
  rep.eve_sinr.resize(static_cast<std::size_t>(G));
  rep.per_user_secrecy.resize(static_cast<std::size_t>(G));
  rep.group_rate.assign(static_cast<std::size_t>(G), 0.0);

  auto sinr = [G](const Eigen::MatrixXd& gain, Eigen::Index row, int g, double noise) {
    double interference = 0.0;
    for (int i = 0; i < G; ++i)
      if (i != g) interference += gain(row, i);
    return gain(row, g) / (interference + noise);
  };

  double unclamped = std::numeric_limits<double>::infinity();
  for (int g = 0; g < G; ++g) {
    const auto gi = static_cast<std::size_t>(g);
    double leak = 0.0;  // empty eve set leaks nothing
    for (int l = 0; l < L; ++l) {
      const double s = sinr(eve_gain, l, g, eve_noise[static_cast<std::size_t>(l)]);
      rep.eve_sinr[gi].push_back(s);
      leak = std::max(leak, std::log2(1.0 + s));
    }
    double group = std::numeric_limits<double>::infinity();
    for (int i : members[gi]) {
      const double s = sinr(bob_gain, i, g, bob_noise[static_cast<std::size_t>(i)]);
      rep.bob_sinr[gi].push_back(s);
      const double r = std::log2(1.0 + s) - leak;
      unclamped = std::min(unclamped, r);
      rep.per_user_secrecy[gi].push_back(std::max(0.0, r));
      group = std::min(group, std::max(0.0, r));
    }
    rep.group_rate[gi] = members[gi].empty() ? 0.0 : group;
  }
  rep.min_rate = rep.group_rate.empty()
                     ? 0.0
                     : *std::min_element(rep.group_rate.begin(), rep.group_rate.end());
  rep.min_rate_unclamped = std::isfinite(unclamped) ? unclamped : 0.0;
  return rep;
}

/// Received power |h^T F_g|^2 summed over the columns of F_g, i.e. tr(H W_g)
/// for W_g = F_g F_g^H. Vector beamformers are single-column factors.
inline Eigen::MatrixXd received_powers(std::span<const Eigen::VectorXcd> channels,
                                       std::span<const Eigen::MatrixXcd> factors) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(channels.size()),
                      static_cast<Eigen::Index>(factors.size()));
  for (std::size_t r = 0; r < channels.size(); ++r)
    for (std::size_t g = 0; g < factors.size(); ++g)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(g)) =
          (factors[g].transpose() * channels[r]).squaredNorm();
  return out;
}

inline std::vector<Eigen::MatrixXcd> as_factors(std::span<const Eigen::VectorXcd> beams) {
  return {beams.begin(), beams.end()};
}

/// Exact report for covariance-form beamformers W_g = F_g F_g^H in physical units.
inline SecrecyReport secrecy_report_lifted(const ChannelSet& cs,
                                           std::span<const Eigen::MatrixXcd> factors,
                                           const Scenario& sc) {
  std::vector<double> bn, en;
  for (const Bob& b : sc.bobs) bn.push_back(b.noise_w);
  for (const Eve& e : sc.eves) en.push_back(e.noise_w);
  return report_from_gains(received_powers(cs.bob, factors), received_powers(cs.eve, factors), bn,
                           en, sc);
}

/// Exact report for vector beamformers {w_g} in physical units (watts).
inline SecrecyReport secrecy_report(const ChannelSet& cs, std::span<const Eigen::VectorXcd> beams,
                                    const Scenario& sc) {
  const auto factors = as_factors(beams);
  return secrecy_report_lifted(cs, factors, sc);
}

/// Report in normalized units: channels already scaled by sqrt(P_t)/sigma and
/// beamformers by 1/sqrt(P_t), so every noise power is one.
inline SecrecyReport secrecy_report_normalized(const ChannelSet& ncs,
                                               std::span<const Eigen::MatrixXcd> factors,
                                               const Scenario& sc) {
  const std::vector<double> bn(sc.bobs.size(), 1.0), en(sc.eves.size(), 1.0);
  return report_from_gains(received_powers(ncs.bob, factors), received_powers(ncs.eve, factors),
                           bn, en, sc);
}

}  // namespace pass
