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
#include "pass_secmcast/multigroup.hpp"
#include "pass_secmcast/pinch_single.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace pass {

enum class BaselineKind { conventional, massive };

inline const char* to_string(BaselineKind k) {
  return k == BaselineKind::conventional ? "conventional" : "massive";
}

/// Half-wavelength ULA along y, centered above the middle of the region.
struct UlaLayout {
  int count = 1;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double spacing = 0.0;

  Eigen::Vector3d position(int i) const {
    const double off = (static_cast<double>(i) - 0.5 * static_cast<double>(count - 1)) * spacing;
    return center + Eigen::Vector3d(0.0, off, 0.0);
  }
};

/// M elements (conventional) or M N elements (massive) at [D_x / 2, 0, h].
inline UlaLayout make_ula(const SystemConfig& cfg, BaselineKind kind) {
  UlaLayout u;
  u.count = kind == BaselineKind::conventional ? cfg.M : cfg.M * cfg.N;
  u.center = {cfg.D_x / 2.0, 0.0, cfg.h};
  u.spacing = cfg.lambda / 2.0;
  return u;
}

inline Eigen::VectorXcd ula_channel(const UlaLayout& ula, const Eigen::Vector3d& rx, const SystemConfig& cfg) {
  Eigen::VectorXcd h(ula.count);
  for (int i = 0; i < ula.count; ++i) h(i) = freespace_entry(ula.position(i), rx, cfg);
  return h;
}

/// Free-space channels from every array element to every receiver.
inline ChannelSet ula_channels(const UlaLayout& ula, const Scenario& sc, const SystemConfig& cfg) {
  ChannelSet cs;
  for (const Bob& b : sc.bobs) cs.bob.push_back(ula_channel(ula, b.pos, cfg));
  for (const Eve& e : sc.eves) cs.eve.push_back(ula_channel(ula, e.pos, cfg));
  return cs;
}

/// Transmit-only optimization on the fixed array with the PASS optimizers.
inline AoResult baseline_optimize(BaselineKind kind, const Scenario& sc, const SystemConfig& cfg,
                                  TxbfMethod method, const AoOptions& opt = {}) {
  const ChannelSet cs = ula_channels(make_ula(cfg, kind), sc, cfg);
  if (method == TxbfMethod::sdr || method == TxbfMethod::dinkelbach_admm)
    return optimize_single_group(sc, cfg, method, opt, cs);
  return optimize_multigroup(sc, cfg, method, opt, cs);
}

}  // namespace pass
