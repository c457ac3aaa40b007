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

/// Zero-inflated GP: y = Phi(g) f + noise with g ~ GP(beta, K_g). The g
/// block models the zero-mean residual; beta is added to every g marginal.
struct ZigpState {
  Process f;
  Process g;
  double log_noise_var = 0.0;
  double beta = 0.0;

  double noise_var() const;
};

struct ZigpPrediction {
  Eigen::VectorXd mean;          // <Phi(g)> mu_f
  Eigen::VectorXd var;           // second moment of Phi(g) f minus mean^2, plus noise
  Eigen::VectorXd support_prob;  // <Phi(g)>
};

ElboTerms zigp_elbo_terms(const ZigpState& state, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& y);

double elbo_zigp(const ZigpState& state, const Eigen::MatrixXd& X,
                 const Eigen::VectorXd& y, double scale);

double elbo_zigp_grad(const ZigpState& state, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, double scale, ZigpState& grad);

ZigpPrediction predict_zigp(const ZigpState& state, const Eigen::MatrixXd& Xstar);

enum class ZeroMode { Support, Mean };

/// Per-point zero decision. Support: zero iff support_prob < threshold,
/// threshold in (0, 1). Mean: zero iff |mean| < threshold, threshold > 0.
std::vector<bool> classify_zero(const Eigen::VectorXd& mean,
                                const Eigen::VectorXd& support_prob, ZeroMode mode,
                                double threshold);

}  // namespace zigp
