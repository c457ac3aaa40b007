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

#include "zigp/synth.hpp"

#include <cmath>
#include <random>
#include <string>

#include "zigp/error.hpp"
#include "zigp/probit_moments.hpp"

namespace zigp {

namespace {

constexpr const char* kModule = "data_io";

KernelHyper with_default_ls(const KernelHyper& h, Eigen::Index D, double ls) {
  if (h.dims() == D) return h;
  if (h.dims() != 0) {
    throw DimensionError(kModule, "synth: hyper has " + std::to_string(h.dims()) +
                                      " lengthscales, data has " + std::to_string(D) +
                                      " inputs");
  }
  return KernelHyper(h.log_signal_var, Eigen::VectorXd::Constant(D, std::log(ls)));
}

Eigen::MatrixXd uniform_inputs(std::mt19937_64& rng, Eigen::Index n, Eigen::Index D) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Eigen::MatrixXd X(n, D);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index d = 0; d < D; ++d) X(i, d) = U(rng);
  }
  return X;
}

// Draws from N(0, K(X, X)); a 1e-6 sigma_f^2 nugget keeps dense designs
// factorizable.
Eigen::VectorXd gp_draw(std::mt19937_64& rng, const KernelHyper& h,
                        const Eigen::MatrixXd& X) {
  Eigen::MatrixXd K = kernel_matrix(h, X, X);
  K.diagonal().array() += 1e-6 * h.signal_var();
  const JitteredCholesky chol(K);
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::VectorXd z(X.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = N(rng);
  return chol.factor() * z;
}

std::vector<std::string> names(const char* prefix, Eigen::Index k) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < k; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

ZigpSynth synth_zigp(unsigned long long seed, Eigen::Index n, Eigen::Index D,
                     double zero_frac_target, const ZigpSynthHypers& hypers) {
  if (n < 10) throw DomainError(kModule, "synth_zigp: n must be >= 10");
  if (D < 1) throw DomainError(kModule, "synth_zigp: D must be >= 1");
  if (!(zero_frac_target > 0.0 && zero_frac_target < 1.0)) {
    throw DomainError(kModule, "synth_zigp: zero fraction target must lie in (0, 1)");
  }
  const KernelHyper hf = with_default_ls(hypers.f, D, 0.1);
  const KernelHyper hg = with_default_ls(hypers.g, D, 0.2);
  std::mt19937_64 rng(seed);
  ZigpSynth out;
  out.data.X = uniform_inputs(rng, n, D);
  const Eigen::VectorXd g0 = gp_draw(rng, hg, out.data.X);
  out.f = gp_draw(rng, hf, out.data.X);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::VectorXd u(n), eps(n);
  for (Eigen::Index i = 0; i < n; ++i) u(i) = U(rng);
  for (Eigen::Index i = 0; i < n; ++i) eps(i) = N(rng);

  auto zero_frac = [&](double beta) {
    long zeros = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(std_normal_cdf(g0(i) + beta) > u(i))) ++zeros;
    }
    return static_cast<double>(zeros) / static_cast<double>(n);
  };
  double lo = -20.0, hi = 20.0, beta = 0.0, frac = zero_frac(beta);
  bool ok = false;
  for (int it = 0; it < 50; ++it) {
    beta = 0.5 * (lo + hi);
    frac = zero_frac(beta);
    if (std::abs(frac - zero_frac_target) <= 0.005) {
      ok = true;
      break;
    }
    (frac > zero_frac_target ? lo : hi) = beta;
  }
  if (!ok && std::abs(frac - zero_frac_target) > 0.05) {
    throw NumericalError(kModule, "synth_zigp: beta bisection did not reach the zero "
                                  "fraction target within 50 iterations");
  }
  out.beta = beta;
  out.support.resize(n);
  out.data.Y.resize(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool on = std_normal_cdf(g0(i) + beta) > u(i);
    out.support(i) = on ? 1.0 : 0.0;
    out.data.Y(i, 0) = on ? out.f(i) + hypers.noise_sd * eps(i)
                          : hypers.zero_noise_sd * eps(i);
  }
  out.data.input_names = names("x", D);
  out.data.output_names = {"y0"};
  return out;
}

GprnSynth synth_gprn(unsigned long long seed, Eigen::Index n, Eigen::Index D, int Q,
                     int P, bool sparse, const GprnSynthHypers& hypers) {
  if (n < 1 || D < 1 || Q < 1 || P < 1) {
    throw DomainError(kModule, "synth_gprn: n, D, Q and P must be positive");
  }
  const KernelHyper hf = with_default_ls(hypers.f, D, 0.2);
  const KernelHyper hw = with_default_ls(hypers.w, D, 0.4);
  const KernelHyper hg = with_default_ls(hypers.g, D, 0.3);
  const bool check = sparse && hypers.require_coverage && !hypers.g_constant;
  constexpr int kMaxAttempts = 200;

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::mt19937_64 rng(seed + 0x2545F4914F6CDD1DULL * static_cast<unsigned long long>(attempt));
    GprnSynth out;
    out.data.X = uniform_inputs(rng, n, D);
    const Eigen::MatrixXd& X = out.data.X;
    std::vector<Eigen::VectorXd> f, w;
    for (int q = 0; q < Q; ++q) f.push_back(gp_draw(rng, hf, X));
    for (int k = 0; k < Q * P; ++k) {
      w.push_back(hypers.w_constant ? Eigen::VectorXd::Constant(n, *hypers.w_constant)
                                    : gp_draw(rng, hw, X));
    }
    out.support = Eigen::MatrixXd::Ones(n, Q * P);
    if (sparse) {
      for (int k = 0; k < Q * P; ++k) {
        const Eigen::VectorXd g = hypers.g_constant
                                      ? Eigen::VectorXd::Constant(n, *hypers.g_constant)
                                      : gp_draw(rng, hg, X);
        for (Eigen::Index i = 0; i < n; ++i) {
          out.support(i, k) = std_normal_cdf(g(i)) > 0.5 ? 1.0 : 0.0;
        }
      }
    }
    if (check) {
      bool covered = true;
      for (int k = 0; k < Q * P; ++k) {
        const double on = out.support.col(k).mean();
        if (on < 0.2 || on > 0.8) covered = false;
      }
      if (!covered) continue;
    }
    std::normal_distribution<double> N(0.0, 1.0);
    out.data.Y = Eigen::MatrixXd::Zero(n, P);
    for (int p = 0; p < P; ++p) {
      for (int q = 0; q < Q; ++q) {
        const auto k = static_cast<std::size_t>(q * P + p);
        out.data.Y.col(p).array() += w[k].array() * out.support.col(q * P + p).array() *
                                     f[static_cast<std::size_t>(q)].array();
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int p = 0; p < P; ++p) out.data.Y(i, p) += hypers.noise_sd * N(rng);
    }
    out.data.input_names = names("x", D);
    out.data.output_names = names("y", P);
    return out;
  }
  throw NumericalError(kModule, "synth_gprn: no draw met the 20% on/off coverage in " +
                                    std::to_string(kMaxAttempts) + " attempts");
}

}  // namespace zigp
