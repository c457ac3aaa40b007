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

// Shared forward/adjoint passes of the dense and gated regression networks.

#include <Eigen/Dense>
#include <vector>

#include "zigp/model_common.hpp"

namespace zigp::detail {

struct NetworkView {
  const char* module;
  int Q;
  int P;
  const std::vector<Process>* f;
  const std::vector<Process>* w;
  const std::vector<Process>* g;  // null for the dense network
  double noise_var;
};

struct NetworkForward {
  std::vector<BlockEval> f, w, g;
  // Gate moments per (q * P + p): mean, variance, and derivatives.
  std::vector<Eigen::VectorXd> ga, gv, da_mu, da_var, db_mu, db_var;
  Eigen::MatrixXd mean;   // n x P
  Eigen::MatrixXd extra;  // n x P
  Eigen::VectorXd terms;  // per point, summed over outputs
};

void check_network(const NetworkView& v);

NetworkForward network_forward(const NetworkView& v, const Eigen::MatrixXd& X,
                               const Eigen::MatrixXd* Y);

double network_kl(const NetworkView& v, const NetworkForward& fw);

/// Fills the process-shaped gradients (f, w and, when gated, g) and the
/// noise gradient; returns the ELBO.
double network_grad(const NetworkView& v, const Eigen::MatrixXd& X,
                    const Eigen::MatrixXd& Y, double scale, std::vector<Process>& gf,
                    std::vector<Process>& gw, std::vector<Process>* gg,
                    double& gnoise);

/// Marginals only (no data), for prediction.
NetworkForward network_predict(const NetworkView& v, const Eigen::MatrixXd& Xstar);

}  // namespace zigp::detail
