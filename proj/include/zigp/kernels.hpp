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
#include <utility>
#include <vector>

namespace zigp {

/// Log-parameterized ARD squared-exponential hyperparameters of one latent
/// process: log sigma_f^2 and one log lengthscale per input dimension.
struct KernelHyper {
  double log_signal_var = 0.0;
  Eigen::VectorXd log_lengthscales;

  KernelHyper() = default;
  KernelHyper(double log_sv, Eigen::VectorXd log_ls)
      : log_signal_var(log_sv), log_lengthscales(std::move(log_ls)) {}

  /// sigma_f^2 = 1, all lengthscales 1.
  static KernelHyper unit(Eigen::Index dims) {
    return KernelHyper(0.0, Eigen::VectorXd::Zero(dims));
  }

  Eigen::Index dims() const { return log_lengthscales.size(); }
  double signal_var() const;
  Eigen::VectorXd lengthscales() const;
};

/// k(a, b) = sigma_f^2 exp(-1/2 sum_d (a_d - b_d)^2 / l_d^2) for all row
/// pairs of A (n_a x D) and B (n_b x D).
Eigen::MatrixXd kernel_matrix(const KernelHyper& hyper, const Eigen::MatrixXd& A,
                              const Eigen::MatrixXd& B);

/// Scaled squared distances sum_d (a_d - b_d)^2 / l_d^2 (SIMD dispatched).
Eigen::MatrixXd scaled_sqdist(const KernelHyper& hyper, const Eigen::MatrixXd& A,
                              const Eigen::MatrixXd& B);

/// Result of a jittered Cholesky solve.
struct CholSolve {
  Eigen::MatrixXd solution;  // (K + jitter I)^-1 B
  double log_det = 0.0;      // log |K + jitter I|
  double jitter = 0.0;       // 0 when K factorized as given
};

/// Factor of K + jitter I, reusable for several solves.
class JitteredCholesky {
 public:
  /// Tries K as given; on failure adds jitter 1e-8 tr(K)/n to the diagonal,
  /// multiplying it by 10 per retry, at most 5 retries. Throws
  /// NumericalError carrying the last jitter tried.
  explicit JitteredCholesky(const Eigen::MatrixXd& K);

  Eigen::MatrixXd solve(const Eigen::MatrixXd& B) const { return llt_.solve(B); }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }
  Eigen::MatrixXd inverse() const;
  /// Lower-triangular factor.
  Eigen::MatrixXd factor() const { return llt_.matrixL(); }
  double log_det() const { return log_det_; }
  double jitter() const { return jitter_; }
  Eigen::Index size() const { return llt_.rows(); }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
  double jitter_ = 0.0;
};

/// K^-1 B and log|K| with the jitter policy of JitteredCholesky.
CholSolve chol_solve_jitter(const Eigen::MatrixXd& K, const Eigen::MatrixXd& B);

/// Gridded inputs: every combination of a spatial location (row of
/// space_grid, placed in columns space_dims) and a time (time_grid, placed
/// in column time_dim). Flattened row index is s * n_t + t.
struct KronSpec {
  std::vector<int> space_dims;
  int time_dim = 0;
  Eigen::MatrixXd space_grid;
  Eigen::VectorXd time_grid;

  Eigen::Index size() const { return space_grid.rows() * time_grid.size(); }
  Eigen::Index input_dims() const {
    return static_cast<Eigen::Index>(space_dims.size()) + 1;
  }
  /// Checks column indices and that the grids have no duplicate rows.
  void validate() const;
  /// All grid points as an (n_s n_t) x D input matrix.
  Eigen::MatrixXd flattened_inputs() const;
};

/// Builds a KronSpec from gridded inputs; throws DomainError unless X
/// holds every (space, time) combination exactly once.
KronSpec kron_spec_from_inputs(const Eigen::MatrixXd& X,
                               const std::vector<int>& space_dims, int time_dim);

/// K_space (x) K_time held as its two factors.
struct KronKernel {
  Eigen::MatrixXd space;
  Eigen::MatrixXd time;

  Eigen::Index rows() const { return space.rows() * time.rows(); }
  Eigen::Index cols() const { return space.cols() * time.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const {
    const auto nt = time.rows();
    const auto mt = time.cols();
    return space(i / nt, j / mt) * time(i % nt, j % mt);
  }
  Eigen::MatrixXd materialize() const;
  Eigen::VectorXd diagonal() const;
  /// (K_space (x) K_time) V without forming the product.
  Eigen::MatrixXd multiply(const Eigen::MatrixXd& V) const;
};

/// Structured kernel over a grid. hyper_space has one lengthscale per
/// spatial column; hyper_time has a single lengthscale.
KronKernel kron_kernel_matrix(const KernelHyper& hyper_space,
                              const KernelHyper& hyper_time,
                              const KronSpec& spec);

/// Splits a full D-dimensional hyper into (space, time) factors whose
/// Kronecker product equals the dense kernel: the time factor carries
/// sigma_f^2 = 1, the space factor carries the full signal variance.
std::pair<KernelHyper, KernelHyper> split_kron_hyper(const KernelHyper& full,
                                                     const KronSpec& spec);

}  // namespace zigp
