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

#include "zigp/gprn.hpp"

#include <cmath>

#include "network.hpp"

namespace zigp {

namespace {

detail::NetworkView view(const GprnState& s) {
  return {"model_gprn", s.Q, s.P, &s.f, &s.w, nullptr, s.noise_var()};
}

}  // namespace

double GprnState::noise_var() const { return std::exp(log_noise_var); }

ElboTerms gprn_elbo_terms(const GprnState& state, const Eigen::MatrixXd& X,
                          const Eigen::MatrixXd& Y) {
  const auto v = view(state);
  const auto fw = detail::network_forward(v, X, &Y);
  return {ordered_sum(fw.terms), detail::network_kl(v, fw)};
}

double elbo_gprn(const GprnState& state, const Eigen::MatrixXd& X,
                 const Eigen::MatrixXd& Y, double scale) {
  return gprn_elbo_terms(state, X, Y).total(scale);
}

double elbo_gprn_grad(const GprnState& state, const Eigen::MatrixXd& X,
                      const Eigen::MatrixXd& Y, double scale, GprnState& grad) {
  grad.Q = state.Q;
  grad.P = state.P;
  return detail::network_grad(view(state), X, Y, scale, grad.f, grad.w, nullptr,
                              grad.log_noise_var);
}

NetworkPrediction predict_gprn(const GprnState& state, const Eigen::MatrixXd& Xstar) {
  const auto fw = detail::network_predict(view(state), Xstar);
  return {fw.mean, fw.extra.array() + state.noise_var()};
}

}  // namespace zigp
