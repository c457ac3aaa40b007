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
#include <vector>

#include "zigp/kernels.hpp"
#include "zigp/variational.hpp"

namespace zigp {

/// One latent GP: its kernel hypers and inducing block.
struct Process {
  KernelHyper hyper;
  InducingBlock block;
};

/// Unscaled expected log-likelihood over a batch and the summed KL terms.
/// The ELBO is scale * data - kl.
struct ElboTerms {
  double data = 0.0;
  double kl = 0.0;
  double total(double scale) const { return scale * data - kl; }
};

/// A process-shaped container of zeros, used to hold gradients. Grid
/// metadata is copied so gridded locations fold correctly.
Process zeros_like(const Process& p);

/// Adds a block gradient into a process-shaped gradient.
void add_block_grad(const BlockGrad& g, Process& out);

/// For gridded blocks, folds the gradient w.r.t. the expanded Z onto
/// the grid factors stored in out.block.grid.
void fold_grid_grad(Process& out);

/// Sum of per-point values in index order.
double ordered_sum(const Eigen::VectorXd& v);

/// Checks X has the process input dimension and y/Y has X.rows() rows.
void check_batch(const char* module, const Eigen::MatrixXd& X, Eigen::Index rows,
                 Eigen::Index dims);

/// -0.5 log(2 pi s2)
double gaussian_log_norm(double s2);

/// Evaluates each process on X (in parallel across processes).
std::vector<BlockEval> evaluate_processes(const std::vector<const Process*>& ps,
                                          const Eigen::MatrixXd& X);

}  // namespace zigp
