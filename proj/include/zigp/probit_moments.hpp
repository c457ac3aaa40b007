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

namespace zigp {

/// A scalar Gaussian N(mu, var).
struct GaussianScalar {
  double mu = 0.0;
  double var = 0.0;
};

double std_normal_pdf(double x);

/// Phi(x), saturating at 0 and 1.
double std_normal_cdf(double x);

/// Owen's T function T(h, a) = phi(h) * int_0^a phi(h t) / (1 + t^2) dt.
double owen_t(double h, double a);

/// Partial derivatives of T(h, a); both have closed forms.
double owen_t_dh(double h, double a);
double owen_t_da(double h, double a);

/// E[Phi(g)] for g ~ N(mu, var).
double probit_mean(GaussianScalar g);

/// E[Phi(g)^2] = Phi(lambda) - 2 T(lambda, 1/sqrt(1 + 2 var)),
/// lambda = mu / sqrt(1 + var).
double probit_square_mean(GaussianScalar g);

/// Var[Phi(g)]; tiny negative rounding (>= -1e-12) is clamped to zero.
double probit_variance(GaussianScalar g);

/// All three probit moments with their derivatives in (mu, var).
struct ProbitMoments {
  double mean = 0.0;
  double square_mean = 0.0;
  double variance = 0.0;
  double dmean_dmu = 0.0;
  double dmean_dvar = 0.0;
  double dsquare_dmu = 0.0;
  double dsquare_dvar = 0.0;
};

ProbitMoments probit_moments(GaussianScalar g);

/// Inputs to KL[N(m, L L^T) || N(0, Kmm)].
struct KlInputs {
  Eigen::VectorXd m;
  Eigen::MatrixXd L;  // lower triangular, positive diagonal
  Eigen::MatrixXd Kmm;
};

/// KL[N(m, S) || N(0, Kmm)] with S = L L^T:
///   0.5 log|Kmm| - 0.5 log|S| + 0.5 tr((m m^T + S) Kmm^-1) - m/2.
/// Kmm is factorized with the shared jitter policy (chol_solve_jitter).
double gaussian_kl(const KlInputs& k);

}  // namespace zigp
