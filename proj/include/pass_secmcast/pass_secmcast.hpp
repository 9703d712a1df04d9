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
#include "pass_secmcast/channel.hpp"
#include "pass_secmcast/metrics.hpp"
#include "pass_secmcast/solvers/common.hpp"
#include "pass_secmcast/solvers/projections.hpp"
#include "pass_secmcast/solvers/linear_sdp.hpp"
#include "pass_secmcast/solvers/supergradient.hpp"
#include "pass_secmcast/solvers/qcqp.hpp"
#include "pass_secmcast/txbf_single.hpp"
#include "pass_secmcast/pinch_single.hpp"
#include "pass_secmcast/multigroup.hpp"
#include "pass_secmcast/baselines.hpp"
#include "pass_secmcast/harness.hpp"
