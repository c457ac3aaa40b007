// Copyright 2026 The zigp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>

#include "zigp/dataset.hpp"
#include "zigp/kernels.hpp"

namespace zigp {

struct ZigpSynthHypers {
  KernelHyper f = KernelHyper(0.0, Eigen::VectorXd());  // empty lengthscales: 0.1 per dim
  KernelHyper g = KernelHyper(std::log(16.0), Eigen::VectorXd());  // empty: 0.2 per dim
  double noise_sd = 0.1;       // on gated-on points
  double zero_noise_sd = 0.0;  // on gated-off points; 0 keeps exact zeros
};

struct ZigpSynth {
  Dataset data;
  double beta = 0.0;            // tuned support offset
  Eigen::VectorXd f;            // latent signal
  Eigen::VectorXd support;      // 1 on, 0 off
};

/// Inputs uniform on [0, 1]^D. y = 1[Phi(g + beta) > u] f + noise with
/// u ~ U(0, 1); beta is bisected until the zero fraction is within 0.05
/// of the target (at most 50 iterations, NumericalError otherwise).
ZigpSynth synth_zigp(unsigned long long seed, Eigen::Index n, Eigen::Index D,
                     double zero_frac_target, const ZigpSynthHypers& hypers = {});

struct GprnSynthHypers {
  KernelHyper f = KernelHyper(0.0, Eigen::VectorXd());  // empty: 0.2 per dim
  KernelHyper w = KernelHyper(0.0, Eigen::VectorXd());  // empty: 0.4 per dim
  KernelHyper g = KernelHyper(0.0, Eigen::VectorXd());  // empty: 0.3 per dim
  double noise_sd = 0.1;
  std::optional<double> w_constant;  // pin every W_qp
  std::optional<double> g_constant;  // pin every g_qp (e.g. -inf: all off)
  bool require_coverage = true;      // sparse: each map >= 20% on and off
};

struct GprnSynth {
  Dataset data;
  Eigen::MatrixXd support;  // n x (Q P), 1 on, 0 off, column q * P + p
};

/// f_q and W_qp drawn from their GPs; when sparse, W_qp is masked where
/// Phi(g_qp) <= 0.5. Draws are repeated with derived seeds until every
/// support column covers at least 20% on and off (when required).
GprnSynth synth_gprn(unsigned long long seed, Eigen::Index n, Eigen::Index D, int Q,
                     int P, bool sparse, const GprnSynthHypers& hypers = {});

}  // namespace zigp
