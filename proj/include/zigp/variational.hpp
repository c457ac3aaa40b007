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
#include <optional>
#include <vector>

#include "zigp/kernels.hpp"

namespace zigp {

/// Inducing locations laid out as the product of a spatial and a temporal
/// grid. Row a * m_t + b of the expanded locations pairs space row a with
/// time b, matching the KronSpec flattening order.
struct InducingGrid {
  std::vector<int> space_dims;
  int time_dim = 0;
  Eigen::MatrixXd space;  // m_s x |space_dims|
  Eigen::VectorXd time;   // m_t

  Eigen::Index size() const { return space.rows() * time.size(); }
  Eigen::MatrixXd expand() const;
  /// Folds a gradient w.r.t. the expanded locations back onto the grids.
  void fold_gradient(const Eigen::MatrixXd& dZ, Eigen::MatrixXd& d_space,
                     Eigen::VectorXd& d_time) const;
};

/// Inducing points of one latent process and q(u) = N(m, L L^T).
struct InducingBlock {
  Eigen::MatrixXd Z;  // m x D
  Eigen::VectorXd m;  // variational mean
  Eigen::MatrixXd L;  // lower triangular, positive diagonal
  std::optional<InducingGrid> grid;  // set for Kronecker-gridded locations

  Eigen::Index size() const { return Z.rows(); }
  Eigen::MatrixXd S() const;
  /// Recomputes Z from the grid (no-op without one).
  void sync_grid();

  /// q(u) equal to the prior: m = 0, L = chol(K_mm).
  static InducingBlock prior(const KernelHyper& hyper, Eigen::MatrixXd Z);
};

/// Per-point variational marginal mean and variance of one process.
struct MarginalMoments {
  Eigen::VectorXd mu;
  Eigen::VectorXd var;
};

/// Q = K_nm K_mm^-1 and diag(K_nn - K_nm K_mm^-1 K_mn).
struct Projection {
  Eigen::MatrixXd Q;
  Eigen::VectorXd ktilde_diag;
};

Projection projection(const KernelHyper& hyper, const Eigen::MatrixXd& X,
                      const InducingBlock& block);

/// mu = Q m, var_i = ktilde_i + |row_i(Q) L|^2 (the diagonal of
/// K_nn + Q (S - K_mm) Q^T). Negative variances above -1e-10 clamp to 0.
MarginalMoments marginal_moments(const Projection& proj,
                                 const InducingBlock& block);

/// Forward pass of one process over a set of inputs, cached for the
/// adjoint pass.
struct BlockEval {
  Eigen::MatrixXd Kmm;   // without jitter
  Eigen::MatrixXd Knm;
  Eigen::MatrixXd Kmm_inv;  // (K_mm + jitter I)^-1
  double log_det_kmm = 0.0;
  double jitter = 0.0;
  Projection proj;
  MarginalMoments moments;
};

BlockEval evaluate_block(const KernelHyper& hyper, const Eigen::MatrixXd& X,
                         const InducingBlock& block);

/// KL[q(u) || p(u)] using the factorization cached in `eval`.
double block_kl(const BlockEval& eval, const InducingBlock& block);

/// Gradient of one process. L holds derivatives w.r.t. the parameter
/// layout: strictly-lower entries as-is, diagonal w.r.t. log L_jj.
struct BlockGrad {
  double log_signal_var = 0.0;
  Eigen::VectorXd log_lengthscales;
  Eigen::MatrixXd Z;
  Eigen::VectorXd m;
  Eigen::MatrixXd L;

  static BlockGrad zeros(Eigen::Index m, Eigen::Index dims);
  void add(const BlockGrad& other);
};

/// Adds to `out` the gradient of
///   sum_i dmu_i * mu_i + dvar_i * var_i + kl_weight * KL
/// linearized at `eval`.
void accumulate_block_grad(const BlockEval& eval, const KernelHyper& hyper,
                           const Eigen::MatrixXd& X, const InducingBlock& block,
                           const Eigen::VectorXd& dmu, const Eigen::VectorXd& dvar,
                           double kl_weight, BlockGrad& out);

/// k-means++ seeding followed by `iterations` Lloyd updates (seeded).
/// Returns min(m, distinct rows) well-spread centres.
Eigen::MatrixXd kmeans_centres(const Eigen::MatrixXd& X, Eigen::Index m,
                               unsigned long long seed, int iterations = 10);

/// Uniform random subsample of distinct rows of X (all rows when m >= n).
Eigen::MatrixXd subsample_rows(const Eigen::MatrixXd& X, Eigen::Index m,
                               unsigned long long seed);

}  // namespace zigp
