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

#include "pass_secmcast/config.hpp"

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace pass {

using cplx = std::complex<double>;

// Received amplitudes use the transpose convention h^T w (no conjugation).
// Quadratic forms therefore use conj(h): |h^T w|^2 = w^H conj(h) conj(h)^H w.

/// Hermitian matrix H with w^H H w = |h^T w|^2.
inline Eigen::MatrixXcd gain_matrix(const Eigen::VectorXcd& h) {
  const Eigen::VectorXcd a = h.conjugate();
  return a * a.adjoint();
}

inline bool is_hermitian(const Eigen::MatrixXcd& H, double tol = 1e-12) {
  if (H.rows() != H.cols()) return false;
  return (H - H.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, H.cwiseAbs().maxCoeff());
}

/// In-waveguide propagation for one waveguide: entry n = sqrt(1/N) exp(-j k_g x_n).
inline Eigen::VectorXcd inwaveguide_vector(const Eigen::VectorXd& row, const SystemConfig& cfg) {
  const double amp = std::sqrt(1.0 / static_cast<double>(row.size()));
  Eigen::VectorXcd psi(row.size());
  for (Eigen::Index n = 0; n < row.size(); ++n) psi(n) = std::polar(amp, -cfg.k_g * row(n));
  return psi;
}

/// Free-space LoS coefficient sqrt(eta) exp(-j k0 d) / d between a PA and a receiver.
inline cplx freespace_entry(const Eigen::Vector3d& pa, const Eigen::Vector3d& rx,
                            const SystemConfig& cfg) {
  const double d = (pa - rx).norm();
  if (!(d > 0.0)) throw std::domain_error("freespace_entry: PA and receiver coincide");
  return std::polar(std::sqrt(cfg.eta) / d, -cfg.k0 * d);
}

/// Contribution of one PA (waveguide at y, height h, coordinate x) to a
/// receiver's effective channel entry: free-space term times the in-waveguide
/// phase and the 1/sqrt(N) power split.
inline cplx pa_contribution(double x, double y, double h, const Eigen::Vector3d& rx,
                            const SystemConfig& cfg, int N) {
  const Eigen::Vector3d pa(x, y, h);
  return freespace_entry(pa, rx, cfg) * std::polar(std::sqrt(1.0 / N), -cfg.k_g * x);
}

/// Effective channel h_hat (length M); entry m sums the N PAs of waveguide m.
/// The block-diagonal pinching matrix is never formed.
inline Eigen::VectorXcd effective_channel(const PinchingLayout& layout, const Eigen::Vector3d& rx,
                                          const SystemConfig& cfg) {
  const int M = layout.M();
  const int N = layout.N();
  Eigen::VectorXcd h = Eigen::VectorXcd::Zero(M);
  for (int m = 0; m < M; ++m)
    for (int n = 0; n < N; ++n)
      h(m) += pa_contribution(layout.x(m, n), layout.y(m), layout.h, rx, cfg, N);
  return h;
}

struct ReceiverId {
  enum class Kind { bob, eve };
  Kind kind = Kind::bob;
  int index = 0;  // into Scenario::bobs or Scenario::eves
};

struct EffectiveChannel {
  ReceiverId id;
  Eigen::VectorXcd h;
};

/// Effective channels aligned with a scenario's bob and eve lists.
struct ChannelSet {
  std::vector<Eigen::VectorXcd> bob;
  std::vector<Eigen::VectorXcd> eve;

  Eigen::Index dim() const {
    if (!bob.empty()) return bob.front().size();
    if (!eve.empty()) return eve.front().size();
    return 0;
  }
};

inline EffectiveChannel effective_channel(const PinchingLayout& layout, const Scenario& sc,
                                          ReceiverId id, const SystemConfig& cfg) {
  const Eigen::Vector3d& rx = id.kind == ReceiverId::Kind::bob
                                  ? sc.bobs.at(static_cast<std::size_t>(id.index)).pos
                                  : sc.eves.at(static_cast<std::size_t>(id.index)).pos;
  return {id, effective_channel(layout, rx, cfg)};
}

inline ChannelSet pass_channels(const PinchingLayout& layout, const Scenario& sc,
                                const SystemConfig& cfg) {
  ChannelSet cs;
  cs.bob.reserve(sc.bobs.size());
  cs.eve.reserve(sc.eves.size());
  for (const Bob& b : sc.bobs) cs.bob.push_back(effective_channel(layout, b.pos, cfg));
  for (const Eve& e : sc.eves) cs.eve.push_back(effective_channel(layout, e.pos, cfg));
  return cs;
}

/// Channels scaled to unit noise and unit power: h_bar = sqrt(P_t) h / sigma.
/// With a beamformer v = w / sqrt(P_t) the SNR term is |h_bar^T v|^2.
inline ChannelSet normalized_channels(const ChannelSet& cs, const Scenario& sc, double P_t) {
  ChannelSet out;
  out.bob.reserve(cs.bob.size());
  out.eve.reserve(cs.eve.size());
  for (std::size_t i = 0; i < cs.bob.size(); ++i)
    out.bob.push_back(cs.bob[i] * std::sqrt(P_t / sc.bobs[i].noise_w));
  for (std::size_t l = 0; l < cs.eve.size(); ++l)
    out.eve.push_back(cs.eve[l] * std::sqrt(P_t / sc.eves[l].noise_w));
  return out;
}

}  // namespace pass
