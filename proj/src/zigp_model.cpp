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

#include "zigp/zigp_model.hpp"

#include <cmath>
#include <string>

#include "zigp/error.hpp"
#include "zigp/probit_moments.hpp"

namespace zigp {

namespace {

constexpr const char* kModule = "model_zigp";

struct Forward {
  BlockEval f;
  BlockEval g;
  std::vector<ProbitMoments> gate;
  Eigen::VectorXd terms;
};

Forward forward(const ZigpState& s, const Eigen::MatrixXd& X,
                const Eigen::VectorXd& y) {
  check_batch(kModule, X, y.size(), s.f.hyper.dims());
  if (s.g.hyper.dims() != s.f.hyper.dims()) {
    throw DimensionError(kModule, "f and g kernels differ in input dimension");
  }
  auto evals = evaluate_processes({&s.f, &s.g}, X);
  Forward fw{std::move(evals[0]), std::move(evals[1]), {}, {}};
  const auto n = X.rows();
  const double s2 = s.noise_var();
  const double c = gaussian_log_norm(s2);
  fw.gate.resize(static_cast<std::size_t>(n));
  fw.terms.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pm = fw.gate[static_cast<std::size_t>(i)] = probit_moments(
        {fw.g.moments.mu(i) + s.beta, fw.g.moments.var(i)});
    const double mf = fw.f.moments.mu(i);
    const double vf = fw.f.moments.var(i);
    const double a = pm.mean;
    const double b = pm.square_mean;
    const double r = y(i) - a * mf;
    fw.terms(i) = c - (r * r + (b - a * a) * mf * mf + b * vf) / (2.0 * s2);
  }
  return fw;
}

}  // namespace

double ZigpState::noise_var() const { return std::exp(log_noise_var); }

ElboTerms zigp_elbo_terms(const ZigpState& state, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& y) {
  const Forward fw = forward(state, X, y);
  ElboTerms t;
  t.data = ordered_sum(fw.terms);
  t.kl = block_kl(fw.f, state.f.block) + block_kl(fw.g, state.g.block);
  return t;
}

double elbo_zigp(const ZigpState& state, const Eigen::MatrixXd& X,
                 const Eigen::VectorXd& y, double scale) {
  return zigp_elbo_terms(state, X, y).total(scale);
}

double elbo_zigp_grad(const ZigpState& state, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, double scale, ZigpState& grad) {
  const Forward fw = forward(state, X, y);
  const auto n = X.rows();
  const double s2 = state.noise_var();

  Eigen::VectorXd dmu_f(n), dvar_f(n), dmu_g(n), dvar_g(n), dnoise(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pm = fw.gate[static_cast<std::size_t>(i)];
    const double mf = fw.f.moments.mu(i);
    const double vf = fw.f.moments.var(i);
    const double a = pm.mean;
    const double b = pm.square_mean;
    const double r = y(i) - a * mf;
    dmu_f(i) = scale * (r * a - (b - a * a) * mf) / s2;
    dvar_f(i) = -scale * b / (2.0 * s2);
    const double da = (r * mf + a * mf * mf) / s2;
    const double db = -(mf * mf + vf) / (2.0 * s2);
    dmu_g(i) = scale * (da * pm.dmean_dmu + db * pm.dsquare_dmu);
    dvar_g(i) = scale * (da * pm.dmean_dvar + db * pm.dsquare_dvar);
    dnoise(i) = -0.5 + (r * r + (b - a * a) * mf * mf + b * vf) / (2.0 * s2);
  }

  grad.f = zeros_like(state.f);
  grad.g = zeros_like(state.g);
  BlockGrad bf = BlockGrad::zeros(state.f.block.size(), state.f.hyper.dims());
  BlockGrad bg = BlockGrad::zeros(state.g.block.size(), state.g.hyper.dims());
  accumulate_block_grad(fw.f, state.f.hyper, X, state.f.block, dmu_f, dvar_f,
                        -1.0, bf);
  accumulate_block_grad(fw.g, state.g.hyper, X, state.g.block, dmu_g, dvar_g,
                        -1.0, bg);
  add_block_grad(bf, grad.f);
  add_block_grad(bg, grad.g);
  fold_grid_grad(grad.f);
  fold_grid_grad(grad.g);
  grad.log_noise_var = scale * ordered_sum(dnoise);
  grad.beta = ordered_sum(dmu_g);

  return scale * ordered_sum(fw.terms) - block_kl(fw.f, state.f.block) -
         block_kl(fw.g, state.g.block);
}

ZigpPrediction predict_zigp(const ZigpState& state, const Eigen::MatrixXd& Xstar) {
  check_batch(kModule, Xstar, Xstar.rows(), state.f.hyper.dims());
  const MarginalMoments f = marginal_moments(
      projection(state.f.hyper, Xstar, state.f.block), state.f.block);
  const MarginalMoments g = marginal_moments(
      projection(state.g.hyper, Xstar, state.g.block), state.g.block);
  const auto n = Xstar.rows();
  const double s2 = state.noise_var();
  ZigpPrediction p;
  p.mean.resize(n);
  p.var.resize(n);
  p.support_prob.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const GaussianScalar gs{g.mu(i) + state.beta, g.var(i)};
    const double a = probit_mean(gs);
    const double b = probit_square_mean(gs);
    const double mf = f.mu(i);
    p.support_prob(i) = a;
    p.mean(i) = a * mf;
    p.var(i) = std::max(0.0, b * (mf * mf + f.var(i)) - a * a * mf * mf) + s2;
  }
  return p;
}

std::vector<bool> classify_zero(const Eigen::VectorXd& mean,
                                const Eigen::VectorXd& support_prob, ZeroMode mode,
                                double threshold) {
  std::vector<bool> zero;
  if (mode == ZeroMode::Support) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
      throw DomainError(kModule, "support threshold must lie in (0, 1), got " +
                                     std::to_string(threshold));
    }
    zero.reserve(static_cast<std::size_t>(support_prob.size()));
    for (Eigen::Index i = 0; i < support_prob.size(); ++i) {
      zero.push_back(support_prob(i) < threshold);
    }
  } else {
    if (!(threshold > 0.0) || !std::isfinite(threshold)) {
      throw DomainError(kModule, "mean threshold must be positive, got " +
                                     std::to_string(threshold));
    }
    zero.reserve(static_cast<std::size_t>(mean.size()));
    for (Eigen::Index i = 0; i < mean.size(); ++i) {
      zero.push_back(std::abs(mean(i)) < threshold);
    }
  }
  return zero;
}

}  // namespace zigp
