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

#include "zigp/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "zigp/error.hpp"
#include "zigp/simd.hpp"

namespace zigp {

namespace {

constexpr double kNegativeVarianceTol = 1e-10;

Eigen::VectorXd row_dots(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::VectorXd out(a.rows());
  if (a.rows() == 0) return out;
  simd::row_dots(a.data(), static_cast<std::size_t>(a.outerStride()), b.data(),
                 static_cast<std::size_t>(b.outerStride()),
                 static_cast<std::size_t>(a.rows()),
                 static_cast<std::size_t>(a.cols()), out.data());
  return out;
}

void clamp_nonnegative(Eigen::VectorXd& v, double scale, const char* what) {
  const double tol = kNegativeVarianceTol * std::max(1.0, scale);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) < 0.0) {
      if (v(i) < -tol || !std::isfinite(v(i))) {
        throw NumericalError("variational_core",
                             std::string(what) + " is negative (" +
                                 std::to_string(v(i)) + ") at point " +
                                 std::to_string(i));
      }
      v(i) = 0.0;
    } else if (!std::isfinite(v(i))) {
      throw NumericalError("variational_core",
                           std::string(what) + " is not finite at point " +
                               std::to_string(i));
    }
  }
}

void check_block(const KernelHyper& hyper, const Eigen::MatrixXd& X,
                 const InducingBlock& block) {
  const auto m = block.size();
  if (block.Z.cols() != hyper.dims() || X.cols() != hyper.dims()) {
    throw DimensionError("variational_core",
                         "input/inducing dimensions do not match the kernel");
  }
  if (block.m.size() != m || block.L.rows() != m || block.L.cols() != m) {
    throw DimensionError("variational_core",
                         "inducing mean/covariance shapes do not match Z");
  }
}

}  // namespace

Eigen::MatrixXd InducingGrid::expand() const {
  const auto ms = space.rows();
  const auto mt = time.size();
  const auto dims = static_cast<Eigen::Index>(space_dims.size()) + 1;
  Eigen::MatrixXd Z(ms * mt, dims);
  for (Eigen::Index a = 0; a < ms; ++a) {
    for (Eigen::Index b = 0; b < mt; ++b) {
      const auto r = a * mt + b;
      for (std::size_t c = 0; c < space_dims.size(); ++c) {
        Z(r, space_dims[c]) = space(a, static_cast<Eigen::Index>(c));
      }
      Z(r, time_dim) = time(b);
    }
  }
  return Z;
}

void InducingGrid::fold_gradient(const Eigen::MatrixXd& dZ,
                                 Eigen::MatrixXd& d_space,
                                 Eigen::VectorXd& d_time) const {
  const auto ms = space.rows();
  const auto mt = time.size();
  d_space = Eigen::MatrixXd::Zero(ms, space.cols());
  d_time = Eigen::VectorXd::Zero(mt);
  for (Eigen::Index a = 0; a < ms; ++a) {
    for (Eigen::Index b = 0; b < mt; ++b) {
      const auto r = a * mt + b;
      for (std::size_t c = 0; c < space_dims.size(); ++c) {
        d_space(a, static_cast<Eigen::Index>(c)) += dZ(r, space_dims[c]);
      }
      d_time(b) += dZ(r, time_dim);
    }
  }
}

Eigen::MatrixXd InducingBlock::S() const {
  const Eigen::MatrixXd lower = L.triangularView<Eigen::Lower>();
  return lower * lower.transpose();
}

void InducingBlock::sync_grid() {
  if (grid) Z = grid->expand();
}

InducingBlock InducingBlock::prior(const KernelHyper& hyper, Eigen::MatrixXd Z) {
  InducingBlock block;
  const Eigen::MatrixXd K = kernel_matrix(hyper, Z, Z);
  const JitteredCholesky chol(K);
  block.Z = std::move(Z);
  block.m = Eigen::VectorXd::Zero(block.Z.rows());
  block.L = chol.factor();
  return block;
}

Projection projection(const KernelHyper& hyper, const Eigen::MatrixXd& X,
                      const InducingBlock& block) {
  check_block(hyper, X, block);
  const Eigen::MatrixXd Kmm = kernel_matrix(hyper, block.Z, block.Z);
  const Eigen::MatrixXd Knm = kernel_matrix(hyper, X, block.Z);
  const JitteredCholesky chol(Kmm);
  Projection p;
  p.Q = chol.solve(Eigen::MatrixXd(Knm.transpose())).transpose();
  p.ktilde_diag = Eigen::VectorXd::Constant(X.rows(), hyper.signal_var()) -
                  row_dots(p.Q, Knm);
  clamp_nonnegative(p.ktilde_diag, hyper.signal_var(), "conditional variance");
  return p;
}

MarginalMoments marginal_moments(const Projection& proj,
                                 const InducingBlock& block) {
  if (proj.Q.cols() != block.size() ||
      proj.Q.rows() != proj.ktilde_diag.size()) {
    throw DimensionError("variational_core",
                         "marginal_moments: projection shape mismatch");
  }
  MarginalMoments mm;
  mm.mu = proj.Q * block.m;
  const Eigen::MatrixXd QL = proj.Q * block.L.triangularView<Eigen::Lower>();
  mm.var = proj.ktilde_diag + row_dots(QL, QL);
  clamp_nonnegative(mm.var, 1.0, "marginal variance");
  return mm;
}

BlockEval evaluate_block(const KernelHyper& hyper, const Eigen::MatrixXd& X,
                         const InducingBlock& block) {
  check_block(hyper, X, block);
  BlockEval e;
  e.Kmm = kernel_matrix(hyper, block.Z, block.Z);
  e.Knm = kernel_matrix(hyper, X, block.Z);
  const JitteredCholesky chol(e.Kmm);
  e.Kmm_inv = chol.inverse();
  e.log_det_kmm = chol.log_det();
  e.jitter = chol.jitter();
  e.proj.Q = chol.solve(Eigen::MatrixXd(e.Knm.transpose())).transpose();
  const double sv = hyper.signal_var();
  e.proj.ktilde_diag =
      Eigen::VectorXd::Constant(X.rows(), sv) - row_dots(e.proj.Q, e.Knm);
  e.moments.mu = e.proj.Q * block.m;
  const Eigen::MatrixXd QL = e.proj.Q * block.L.triangularView<Eigen::Lower>();
  e.moments.var = e.proj.ktilde_diag + row_dots(QL, QL);
  clamp_nonnegative(e.moments.var, sv, "marginal variance");
  return e;
}

double block_kl(const BlockEval& eval, const InducingBlock& block) {
  const auto m = block.size();
  double log_det_s = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) log_det_s += 2.0 * std::log(block.L(j, j));
  const Eigen::MatrixXd lower = block.L.triangularView<Eigen::Lower>();
  const double trace = (lower.array() * (eval.Kmm_inv * lower).array()).sum() +
                       block.m.dot(eval.Kmm_inv * block.m);
  return 0.5 * (eval.log_det_kmm - log_det_s + trace - static_cast<double>(m));
}

BlockGrad BlockGrad::zeros(Eigen::Index m, Eigen::Index dims) {
  BlockGrad g;
  g.log_lengthscales = Eigen::VectorXd::Zero(dims);
  g.Z = Eigen::MatrixXd::Zero(m, dims);
  g.m = Eigen::VectorXd::Zero(m);
  g.L = Eigen::MatrixXd::Zero(m, m);
  return g;
}

void BlockGrad::add(const BlockGrad& other) {
  log_signal_var += other.log_signal_var;
  log_lengthscales += other.log_lengthscales;
  Z += other.Z;
  m += other.m;
  L += other.L;
}

void accumulate_block_grad(const BlockEval& eval, const KernelHyper& hyper,
                           const Eigen::MatrixXd& X, const InducingBlock& block,
                           const Eigen::VectorXd& dmu, const Eigen::VectorXd& dvar,
                           double kl_weight, BlockGrad& out) {
  const auto m = block.size();
  const auto n = X.rows();
  const auto dims = hyper.dims();
  const Eigen::MatrixXd& Q = eval.proj.Q;
  const Eigen::MatrixXd& Ainv = eval.Kmm_inv;
  const Eigen::MatrixXd lower = block.L.triangularView<Eigen::Lower>();
  const Eigen::MatrixXd S = lower * lower.transpose();
  Eigen::MatrixXd A = eval.Kmm;
  A.diagonal().array() += eval.jitter;

  // Adjoints of the marginals w.r.t. m, S and the projection Q.
  const Eigen::MatrixXd DQ = dvar.asDiagonal() * Q;        // n x m
  const Eigen::MatrixXd M_S = Q.transpose() * DQ;           // m x m
  const Eigen::MatrixXd G_Q = dmu * block.m.transpose() + 2.0 * DQ * (S - A);

  Eigen::VectorXd d_m = Q.transpose() * dmu;
  Eigen::MatrixXd d_L = 2.0 * M_S * lower;
  const Eigen::MatrixXd GA = G_Q * Ainv;                    // dJ/dK_nm
  Eigen::MatrixXd d_A = -M_S - Q.transpose() * GA;

  if (kl_weight != 0.0) {
    const Eigen::VectorXd Ainv_m = Ainv * block.m;
    d_m += kl_weight * Ainv_m;
    Eigen::MatrixXd dkl_L = Ainv * lower;
    for (Eigen::Index j = 0; j < m; ++j) dkl_L(j, j) -= 1.0 / lower(j, j);
    d_L += kl_weight * dkl_L;
    const Eigen::MatrixXd outer = block.m * block.m.transpose() + S;
    d_A += kl_weight * 0.5 * (Ainv - Ainv * outer * Ainv);
  }

  out.m += d_m;
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index r = c; r < m; ++r) {
      out.L(r, c) += r == c ? d_L(r, c) * lower(r, c) : d_L(r, c);
    }
  }

  // Chain K_mm = k(Z, Z), K_nm = k(X, Z) and diag K_nn = sigma_f^2 back to
  // the log hypers and inducing locations.
  const Eigen::MatrixXd E = d_A.array() * eval.Kmm.array();
  const Eigen::MatrixXd F = GA.array() * eval.Knm.array();
  const double sv = hyper.signal_var();
  out.log_signal_var += E.sum() + F.sum() + dvar.sum() * sv;

  const Eigen::VectorXd inv_ls2 = (-2.0 * hyper.log_lengthscales.array()).exp();
  const Eigen::MatrixXd Esym = E + E.transpose();
  for (Eigen::Index d = 0; d < dims; ++d) {
    const double w = inv_ls2(d);
    double dls = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      const double zk = block.Z(k, d);
      double dz = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double diff = X(i, d) - zk;
        dls += F(i, k) * diff * diff * w;
        dz += F(i, k) * diff * w;
      }
      for (Eigen::Index j = 0; j < m; ++j) {
        const double diff = zk - block.Z(j, d);
        dls += E(k, j) * diff * diff * w;
        dz -= Esym(k, j) * diff * w;
      }
      out.Z(k, d) += dz;
    }
    out.log_lengthscales(d) += dls;
  }
}

Eigen::MatrixXd subsample_rows(const Eigen::MatrixXd& X, Eigen::Index m,
                               unsigned long long seed) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(X.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::set<std::vector<double>> seen;
  std::vector<Eigen::Index> picked;
  for (const auto i : order) {
    if (static_cast<Eigen::Index>(picked.size()) >= m) break;
    std::vector<double> row(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index c = 0; c < X.cols(); ++c) row[static_cast<std::size_t>(c)] = X(i, c);
    if (seen.insert(row).second) picked.push_back(i);
  }
  Eigen::MatrixXd Z(static_cast<Eigen::Index>(picked.size()), X.cols());
  for (std::size_t r = 0; r < picked.size(); ++r) {
    Z.row(static_cast<Eigen::Index>(r)) = X.row(picked[r]);
  }
  return Z;
}

}  // namespace zigp

namespace zigp {

Eigen::MatrixXd kmeans_centres(const Eigen::MatrixXd& X, Eigen::Index m,
                               unsigned long long seed, int iterations) {
  const Eigen::MatrixXd distinct = subsample_rows(X, X.rows(), seed);
  const Eigen::Index k = std::min(m, distinct.rows());
  if (k == distinct.rows()) return distinct;
  const auto n = X.rows();
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd C(k, X.cols());
  C.row(0) = distinct.row(0);
  Eigen::VectorXd d2 = (X.rowwise() - C.row(0)).rowwise().squaredNorm();
  for (Eigen::Index c = 1; c < k; ++c) {
    std::discrete_distribution<Eigen::Index> pick(d2.data(), d2.data() + n);
    C.row(c) = X.row(pick(rng));
    d2 = d2.cwiseMin((X.rowwise() - C.row(c)).rowwise().squaredNorm());
  }
  std::vector<Eigen::Index> label(static_cast<std::size_t>(n), 0);
  for (int it = 0; it < iterations; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      (C.rowwise() - X.row(i)).rowwise().squaredNorm().minCoeff(&label[static_cast<std::size_t>(i)]);
    }
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, X.cols());
    Eigen::VectorXd count = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sum.row(label[static_cast<std::size_t>(i)]) += X.row(i);
      count(label[static_cast<std::size_t>(i)]) += 1.0;
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (count(c) > 0.0) C.row(c) = sum.row(c) / count(c);
    }
  }
  return C;
}

}  // namespace zigp
