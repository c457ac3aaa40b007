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

#include "zigp/model_common.hpp"

namespace zigp {

/// Standard sparse variational GP regression.
struct SvgpState {
  Process f;
  double log_noise_var = 0.0;

  double noise_var() const;
};

struct SvgpPrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;  // includes the noise variance
};

/// data = sum_i log N(y_i | mu_i, s2) - var_i / (2 s2); kl = KL_f.
ElboTerms svgp_elbo_terms(const SvgpState& state, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& y);

double elbo_svgp(const SvgpState& state, const Eigen::MatrixXd& X,
                 const Eigen::VectorXd& y, double scale);

/// ELBO value; writes its gradient (state-shaped, L diagonal w.r.t. log
/// L_jj) into `grad`.
double elbo_svgp_grad(const SvgpState& state, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, double scale, SvgpState& grad);

SvgpPrediction predict_svgp(const SvgpState& state, const Eigen::MatrixXd& Xstar);

}  // namespace zigp
