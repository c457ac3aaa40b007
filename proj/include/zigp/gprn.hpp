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

#include "zigp/model_common.hpp"

namespace zigp {

/// Gaussian process regression network y_p(x) = sum_q W_qp(x) f_q(x) + noise.
/// Mixing processes are stored at index q * P + p.
struct GprnState {
  int Q = 1;
  int P = 1;
  std::vector<Process> f;  // Q
  std::vector<Process> w;  // Q * P
  double log_noise_var = 0.0;

  double noise_var() const;
  const Process& weight(int q, int p) const { return w[static_cast<std::size_t>(q * P + p)]; }
};

struct NetworkPrediction {
  Eigen::MatrixXd mean;  // n x P
  Eigen::MatrixXd var;   // n x P, includes the noise variance
};

ElboTerms gprn_elbo_terms(const GprnState& state, const Eigen::MatrixXd& X,
                          const Eigen::MatrixXd& Y);

double elbo_gprn(const GprnState& state, const Eigen::MatrixXd& X,
                 const Eigen::MatrixXd& Y, double scale);

double elbo_gprn_grad(const GprnState& state, const Eigen::MatrixXd& X,
                      const Eigen::MatrixXd& Y, double scale, GprnState& grad);

NetworkPrediction predict_gprn(const GprnState& state, const Eigen::MatrixXd& Xstar);

}  // namespace zigp
