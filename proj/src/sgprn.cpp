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

#include "zigp/sgprn.hpp"

#include <cmath>

#include "network.hpp"
#include "zigp/probit_moments.hpp"

namespace zigp {

namespace {

detail::NetworkView view(const SgprnState& s) {
  return {"model_sgprn", s.Q, s.P, &s.f, &s.w, &s.g, s.noise_var()};
}

}  // namespace

double SgprnState::noise_var() const { return std::exp(log_noise_var); }

void SgprnState::tie_locations() {
  for (std::size_t k = 0; k < w.size() && k < g.size(); ++k) {
    g[k].block.grid = w[k].block.grid;
    g[k].block.Z = w[k].block.Z;
  }
}

ElboTerms sgprn_elbo_terms(const SgprnState& state, const Eigen::MatrixXd& X,
                           const Eigen::MatrixXd& Y) {
  const auto v = view(state);
  const auto fw = detail::network_forward(v, X, &Y);
  return {ordered_sum(fw.terms), detail::network_kl(v, fw)};
}

double elbo_sgprn(const SgprnState& state, const Eigen::MatrixXd& X,
                  const Eigen::MatrixXd& Y, double scale) {
  return sgprn_elbo_terms(state, X, Y).total(scale);
}

double elbo_sgprn_grad(const SgprnState& state, const Eigen::MatrixXd& X,
                       const Eigen::MatrixXd& Y, double scale, SgprnState& grad) {
  grad.Q = state.Q;
  grad.P = state.P;
  return detail::network_grad(view(state), X, Y, scale, grad.f, grad.w, &grad.g,
                              grad.log_noise_var);
}

NetworkPrediction predict_sgprn(const SgprnState& state, const Eigen::MatrixXd& Xstar) {
  const auto fw = detail::network_predict(view(state), Xstar);
  return {fw.mean, fw.extra.array() + state.noise_var()};
}

Eigen::MatrixXd support_map(const SgprnState& state, const Eigen::MatrixXd& Xgrid) {
  detail::check_network(view(state));
  check_batch("model_sgprn", Xgrid, Xgrid.rows(), state.g[0].hyper.dims());
  Eigen::MatrixXd out(Xgrid.rows(), static_cast<Eigen::Index>(state.g.size()));
  for (std::size_t k = 0; k < state.g.size(); ++k) {
    const auto& g = state.g[k];
    const MarginalMoments mm = marginal_moments(projection(g.hyper, Xgrid, g.block), g.block);
    for (Eigen::Index i = 0; i < Xgrid.rows(); ++i) {
      out(i, static_cast<Eigen::Index>(k)) = probit_mean({mm.mu(i), mm.var(i)});
    }
  }
  return out;
}

}  // namespace zigp
