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
// Test-only reference routines. None of these call the library's numerical
// code paths; kernels, inverses, quadrature and sampling are re-derived.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Owen's T by adaptive Gauss-Kronrod on t in [0, 1] after t -> a t.
inline double owen_t(double h, double a) {
  if (a == 0.0) return 0.0;
  auto g = [&](double s) {
    const double t = a * s;
    return std::exp(-0.5 * h * h * (1.0 + t * t)) / (1.0 + t * t);
  };
  double err = 0.0;
  const double I =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 20, 1e-15, &err);
  return a * I / (2.0 * std::numbers::pi);
}

// E[Phi(mu + sigma z)^k], z ~ N(0, 1), by adaptive Gauss-Kronrod split at
// the probit transition.
inline double probit_power_mean(double mu, double var, int k) {
  if (var == 0.0) return std::pow(Phi(mu), k);
  const double sd = std::sqrt(var);
  auto g = [&](double z) { return std::pow(Phi(mu + sd * z), k) * phi(z); };
  const double z0 = std::clamp(-mu / sd, -30.0, 30.0);
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double cuts[] = {-40.0, z0 - 1.0, z0, z0 + 1.0, 40.0};
  double err = 0.0;
  double total = 0.0;
  for (int s = 0; s < 4; ++s) total += GK::integrate(g, cuts[s], cuts[s + 1], 20, 1e-15, &err);
  return total;
}

// Physicists' Gauss-Hermite rule by Golub-Welsch.
struct GaussHermite {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  explicit GaussHermite(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    nodes = es.eigenvalues();
    weights = std::sqrt(std::numbers::pi) * es.eigenvectors().row(0).transpose().array().square();
  }
  // E[f(g)] for g ~ N(mu, var).
  template <class F>
  double expect(double mu, double var, F f) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < nodes.size(); ++i) {
      s += weights(i) * f(mu + std::sqrt(2.0 * var) * nodes(i));
    }
    return s / std::sqrt(std::numbers::pi);
  }
};

// ARD squared-exponential kernel by direct loops.
inline Eigen::MatrixXd ard(double log_sv, const Eigen::VectorXd& log_ls, const Eigen::MatrixXd& A,
                           const Eigen::MatrixXd& B) {
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
      double r = 0.0;
      for (Eigen::Index d = 0; d < A.cols(); ++d) {
        const double t = (A(i, d) - B(j, d)) / std::exp(log_ls(d));
        r += t * t;
      }
      K(i, j) = std::exp(log_sv) * std::exp(-0.5 * r);
    }
  }
  return K;
}

// KL[N(m, S) || N(0, K)] in long double with a hand-written Cholesky.
inline double gaussian_kl(const Eigen::VectorXd& m, const Eigen::MatrixXd& S,
                          const Eigen::MatrixXd& K) {
  using LD = long double;
  using M = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;
  const M Kl = K.cast<LD>();
  const M Sl = S.cast<LD>();
  const Eigen::Matrix<LD, Eigen::Dynamic, 1> ml = m.cast<LD>();
  auto chol = [](const M& A) {
    const Eigen::Index n = A.rows();
    M L = M::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      LD d = A(j, j);
      for (Eigen::Index k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
      L(j, j) = std::sqrt(d);
      for (Eigen::Index i = j + 1; i < n; ++i) {
        LD s = A(i, j);
        for (Eigen::Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
        L(i, j) = s / L(j, j);
      }
    }
    return L;
  };
  const M LK = chol(Kl), LS = chol(Sl);
  LD logdetK = 0, logdetS = 0;
  for (Eigen::Index j = 0; j < K.rows(); ++j) {
    logdetK += 2 * std::log(LK(j, j));
    logdetS += 2 * std::log(LS(j, j));
  }
  const M Kinv = LK.template triangularView<Eigen::Lower>().solve(M::Identity(K.rows(), K.rows()));
  const M KinvFull = Kinv.transpose() * Kinv;
  const LD tr = (KinvFull * (Sl + ml * ml.transpose())).trace();
  return static_cast<double>(0.5L * (logdetK - logdetS + tr - static_cast<LD>(K.rows())));
}

// Diagonal of q(f) marginals built from the full covariance with an
// explicit inverse: mu = K_nm K_mm^-1 m, Sigma = K_nn - K_nm K_mm^-1 K_mn +
// K_nm K_mm^-1 S K_mm^-1 K_mn.
struct DenseMarginals {
  Eigen::VectorXd mu;
  Eigen::VectorXd var;
};
inline DenseMarginals dense_marginals(double log_sv, const Eigen::VectorXd& log_ls,
                                      const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z,
                                      const Eigen::VectorXd& m, const Eigen::MatrixXd& L) {
  const Eigen::MatrixXd Kmm = ard(log_sv, log_ls, Z, Z);
  const Eigen::MatrixXd Knm = ard(log_sv, log_ls, X, Z);
  const Eigen::MatrixXd Knn = ard(log_sv, log_ls, X, X);
  const Eigen::MatrixXd Kinv = Kmm.fullPivLu().inverse();
  const Eigen::MatrixXd A = Knm * Kinv;
  const Eigen::MatrixXd S = L * L.transpose();
  const Eigen::MatrixXd Sigma = Knn - A * Knm.transpose() + A * S * A.transpose();
  return {A * m, Sigma.diagonal()};
}

// log N(y | 0, K + s2 I)
inline double exact_log_evidence(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double s2) {
  Eigen::MatrixXd C = K;
  C.diagonal().array() += s2;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(C);
  const double logdet = ldlt.vectorD().array().log().sum();
  return -0.5 * (y.dot(ldlt.solve(y)) + logdet + y.size() * std::log(2.0 * std::numbers::pi));
}

// Exact GP posterior mean K_*n (K + s2 I)^-1 y.
inline Eigen::VectorXd exact_posterior_mean(const Eigen::MatrixXd& Ksn, const Eigen::MatrixXd& K,
                                            const Eigen::VectorXd& y, double s2) {
  Eigen::MatrixXd C = K;
  C.diagonal().array() += s2;
  return Ksn * C.fullPivLu().solve(y);
}

// Running mean and standard error of i.i.d. samples.
struct MeanSe {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double se() const { return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)); }
};

// MC estimates of E[Phi(g)], E[Phi(g)^2] and Var[Phi(g)] with standard
// errors (the variance SE by the delta method on centred squares).
struct ProbitMc {
  double mean, mean_se, square, square_se, variance, variance_se;
};
inline ProbitMc probit_mc(double mu, double var, long samples, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  const double sd = std::sqrt(var);
  std::vector<double> v(static_cast<std::size_t>(samples));
  MeanSe a, b;
  for (auto& x : v) {
    x = Phi(mu + sd * N(rng));
    a.add(x);
    b.add(x * x);
  }
  MeanSe c;
  for (double x : v) c.add((x - a.mean) * (x - a.mean));
  const double nn = static_cast<double>(samples);
  return {a.mean, a.se(), b.mean, b.se(), c.mean * nn / (nn - 1.0), c.se()};
}

}  // namespace oracle
