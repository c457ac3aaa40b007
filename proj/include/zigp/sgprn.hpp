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
#include <vector>

#include "zigp/gprn.hpp"

namespace zigp {

/// GPRN whose mixing weights are gated by probit support processes,
/// W_qp(x) Phi(g_qp(x)). Each g_qp shares its inducing locations with
/// w_qp; g[k].block.Z mirrors w[k].block.Z.
struct SgprnState {
  int Q = 1;
  int P = 1;
  std::vector<Process> f;  // Q
  std::vector<Process> w;  // Q * P
  std::vector<Process> g;  // Q * P
  double log_noise_var = 0.0;

  double noise_var() const;
  /// Copies each w block's locations (and grid) into its g block.
  void tie_locations();
};

ElboTerms sgprn_elbo_terms(const SgprnState& state, const Eigen::MatrixXd& X,
                           const Eigen::MatrixXd& Y);

double elbo_sgprn(const SgprnState& state, const Eigen::MatrixXd& X,
                  const Eigen::MatrixXd& Y, double scale);

/// The location gradient of each g block is added to its w block; the g
/// Z entries of `grad` are left at zero.
double elbo_sgprn_grad(const SgprnState& state, const Eigen::MatrixXd& X,
                       const Eigen::MatrixXd& Y, double scale, SgprnState& grad);

NetworkPrediction predict_sgprn(const SgprnState& state, const Eigen::MatrixXd& Xstar);

/// <Phi(g_qp)> at every grid point, column q * P + p.
Eigen::MatrixXd support_map(const SgprnState& state, const Eigen::MatrixXd& Xgrid);

}  // namespace zigp
