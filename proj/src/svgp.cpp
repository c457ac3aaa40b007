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

#include "zigp/svgp.hpp"

#include <cmath>

namespace zigp {

namespace {

constexpr const char* kModule = "baselines";

Eigen::VectorXd point_terms(const MarginalMoments& mm, const Eigen::VectorXd& y,
                            double s2) {
  const double c = gaussian_log_norm(s2);
  Eigen::VectorXd t(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double r = y(i) - mm.mu(i);
    t(i) = c - (r * r + mm.var(i)) / (2.0 * s2);
  }
  return t;
}

}  // namespace

double SvgpState::noise_var() const { return std::exp(log_noise_var); }

ElboTerms svgp_elbo_terms(const SvgpState& state, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& y) {
  check_batch(kModule, X, y.size(), state.f.hyper.dims());
  const BlockEval e = evaluate_block(state.f.hyper, X, state.f.block);
  ElboTerms t;
  t.data = ordered_sum(point_terms(e.moments, y, state.noise_var()));
  t.kl = block_kl(e, state.f.block);
  return t;
}

double elbo_svgp(const SvgpState& state, const Eigen::MatrixXd& X,
                 const Eigen::VectorXd& y, double scale) {
  return svgp_elbo_terms(state, X, y).total(scale);
}

double elbo_svgp_grad(const SvgpState& state, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, double scale, SvgpState& grad) {
  check_batch(kModule, X, y.size(), state.f.hyper.dims());
  const double s2 = state.noise_var();
  const BlockEval e = evaluate_block(state.f.hyper, X, state.f.block);
  const auto n = X.rows();

  Eigen::VectorXd dmu(n), dvar(n), dnoise(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = y(i) - e.moments.mu(i);
    dmu(i) = scale * r / s2;
    dvar(i) = -scale * 0.5 / s2;
    dnoise(i) = -0.5 + (r * r + e.moments.var(i)) / (2.0 * s2);
  }

  grad.f = zeros_like(state.f);
  BlockGrad bg = BlockGrad::zeros(state.f.block.size(), state.f.hyper.dims());
  accumulate_block_grad(e, state.f.hyper, X, state.f.block, dmu, dvar, -1.0, bg);
  add_block_grad(bg, grad.f);
  fold_grid_grad(grad.f);
  grad.log_noise_var = scale * ordered_sum(dnoise);

  const double data = ordered_sum(point_terms(e.moments, y, s2));
  return scale * data - block_kl(e, state.f.block);
}

SvgpPrediction predict_svgp(const SvgpState& state, const Eigen::MatrixXd& Xstar) {
  check_batch(kModule, Xstar, Xstar.rows(), state.f.hyper.dims());
  const MarginalMoments mm =
      marginal_moments(projection(state.f.hyper, Xstar, state.f.block),
                       state.f.block);
  SvgpPrediction p;
  p.mean = mm.mu;
  p.var = mm.var.array() + state.noise_var();
  return p;
}

}  // namespace zigp
