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
// Shared test helpers: model-level Monte Carlo oracles built on the dense
// marginals of oracles.hpp, and small generators for property tests.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "zigp/model.hpp"

namespace fixture {

inline oracle::DenseMarginals marginals(const zigp::Process& p, const Eigen::MatrixXd& X) {
  return oracle::dense_marginals(p.hyper.log_signal_var, p.hyper.log_lengthscales, X, p.block.Z,
                                 p.block.m, p.block.L);
}

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
};

// E_q log p(Y | latents), sampling every latent independently per point
// from its dense marginal.
inline McEstimate mc_expected_loglik(const zigp::ModelState& state, const Eigen::MatrixXd& X,
                                     const Eigen::MatrixXd& Y, long samples,
                                     unsigned long long seed) {
  using namespace zigp;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  const Eigen::Index n = X.rows();
  auto draw = [&](const oracle::DenseMarginals& m, Eigen::Index i) {
    return m.mu(i) + std::sqrt(std::max(m.var(i), 0.0)) * N(rng);
  };
  auto lognorm = [](double r, double s2) {
    return -0.5 * std::log(2.0 * std::numbers::pi * s2) - 0.5 * r * r / s2;
  };
  oracle::MeanSe acc;
  if (const auto* s = std::get_if<SvgpState>(&state)) {
    const auto mf = marginals(s->f, X);
    const double s2 = s->noise_var();
    for (long k = 0; k < samples; ++k) {
      double t = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) t += lognorm(Y(i, 0) - draw(mf, i), s2);
      acc.add(t);
    }
  } else if (const auto* s = std::get_if<ZigpState>(&state)) {
    const auto mf = marginals(s->f, X);
    const auto mg = marginals(s->g, X);
    const double s2 = s->noise_var();
    for (long k = 0; k < samples; ++k) {
      double t = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double g = draw(mg, i) + s->beta;
        const double f = draw(mf, i);
        t += lognorm(Y(i, 0) - oracle::Phi(g) * f, s2);
      }
      acc.add(t);
    }
  } else {
    const bool sparse = std::holds_alternative<SgprnState>(state);
    const auto* gp = std::get_if<GprnState>(&state);
    const auto* sp = std::get_if<SgprnState>(&state);
    const int Q = gp ? gp->Q : sp->Q;
    const int P = gp ? gp->P : sp->P;
    const double s2 = gp ? gp->noise_var() : sp->noise_var();
    const auto& fs = gp ? gp->f : sp->f;
    const auto& ws = gp ? gp->w : sp->w;
    std::vector<oracle::DenseMarginals> mf, mw, mg;
    for (const auto& p : fs) mf.push_back(marginals(p, X));
    for (const auto& p : ws) mw.push_back(marginals(p, X));
    if (sparse) {
      for (const auto& p : sp->g) mg.push_back(marginals(p, X));
    }
    std::vector<double> f(static_cast<std::size_t>(Q));
    for (long k = 0; k < samples; ++k) {
      double t = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (int q = 0; q < Q; ++q) f[static_cast<std::size_t>(q)] = draw(mf[static_cast<std::size_t>(q)], i);
        for (int p = 0; p < P; ++p) {
          double out = 0.0;
          for (int q = 0; q < Q; ++q) {
            const auto idx = static_cast<std::size_t>(q * P + p);
            double w = draw(mw[idx], i);
            if (sparse) w *= oracle::Phi(draw(mg[idx], i));
            out += w * f[static_cast<std::size_t>(q)];
          }
          t += lognorm(Y(i, p) - out, s2);
        }
      }
      acc.add(t);
    }
  }
  return {acc.mean, acc.se()};
}

// Random SPD matrix A A^T + eps I.
inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index n, double eps = 0.1) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index k = 0; k < A.size(); ++k) A.data()[k] = N(rng);
  Eigen::MatrixXd S = A * A.transpose();
  S.diagonal().array() += eps;
  return S;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c,
                                     double sd = 1.0) {
  std::normal_distribution<double> N(0.0, sd);
  Eigen::MatrixXd M(r, c);
  for (Eigen::Index k = 0; k < M.size(); ++k) M.data()[k] = N(rng);
  return M;
}

}  // namespace fixture

namespace fixture {

// g blocks that sit at +8 on every training point: Z = X, m = 8, L tiny,
// small signal variance. The pinned blocks still carry a KL, which callers
// add back when comparing to the reduced model.
inline zigp::Process pinned_process(const Eigen::MatrixXd& X, double level) {
  zigp::Process p;
  p.hyper = zigp::KernelHyper(std::log(1e-2), Eigen::VectorXd::Constant(X.cols(), std::log(0.3)));
  p.block.Z = X;
  p.block.m = Eigen::VectorXd::Constant(X.rows(), level);
  p.block.L = 1e-7 * Eigen::MatrixXd::Identity(X.rows(), X.rows());
  return p;
}

inline double process_kl(const zigp::Process& p, const Eigen::MatrixXd& X) {
  const zigp::BlockEval e = zigp::evaluate_block(p.hyper, X, p.block);
  return zigp::block_kl(e, p.block);
}

// ZiGP whose support is on everywhere: beta = 8 with g at its prior.
inline zigp::ZigpState zigp_pinned(const zigp::SvgpState& s, double beta) {
  zigp::ZigpState z;
  z.f = s.f;
  z.g.hyper = zigp::KernelHyper(std::log(1e-4), s.f.hyper.log_lengthscales);
  z.g.block = zigp::InducingBlock::prior(z.g.hyper, s.f.block.Z);
  z.log_noise_var = s.log_noise_var;
  z.beta = beta;
  return z;
}

// Moves every w block onto Z = X with random q(u), so sGPRN g blocks can
// share those locations.
inline zigp::GprnState gprn_weights_at(const zigp::GprnState& s, const Eigen::MatrixXd& X,
                                       std::mt19937_64& rng) {
  zigp::GprnState out = s;
  for (auto& w : out.w) {
    w.block.Z = X;
    w.block.m = random_matrix(rng, X.rows(), 1, 0.7);
    Eigen::MatrixXd L = random_matrix(rng, X.rows(), X.rows(), 0.1).triangularView<Eigen::Lower>();
    L.diagonal() = Eigen::VectorXd::Constant(X.rows(), 0.4);
    w.block.L = L;
  }
  return out;
}

// Requires every w block at Z = X (see gprn_weights_at).
inline zigp::SgprnState sgprn_pinned(const zigp::GprnState& s, const Eigen::MatrixXd& X,
                                     double level) {
  zigp::SgprnState out;
  out.Q = s.Q;
  out.P = s.P;
  out.f = s.f;
  out.w = s.w;
  out.log_noise_var = s.log_noise_var;
  for (std::size_t k = 0; k < s.w.size(); ++k) out.g.push_back(pinned_process(X, level));
  return out;
}

// GPRN with Q = P = 1 whose weight is pinned to 1 at every training point.
inline zigp::GprnState gprn_unit_weight(const zigp::SvgpState& s, const Eigen::MatrixXd& X) {
  zigp::GprnState g;
  g.Q = g.P = 1;
  g.f = {s.f};
  zigp::Process w = pinned_process(X, 1.0);
  w.hyper.log_signal_var = 0.0;
  g.w = {w};
  g.log_noise_var = s.log_noise_var;
  return g;
}

}  // namespace fixture
