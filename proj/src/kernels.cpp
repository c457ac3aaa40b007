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

#include "zigp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "zigp/error.hpp"
#include "zigp/simd.hpp"

namespace zigp {

double KernelHyper::signal_var() const { return std::exp(log_signal_var); }

Eigen::VectorXd KernelHyper::lengthscales() const {
  return log_lengthscales.array().exp();
}

Eigen::MatrixXd scaled_sqdist(const KernelHyper& hyper, const Eigen::MatrixXd& A,
                              const Eigen::MatrixXd& B) {
  const auto dims = hyper.dims();
  if (A.cols() != dims || B.cols() != dims) {
    throw DimensionError("kernels", "kernel_matrix: inputs have " +
                                        std::to_string(A.cols()) + "/" +
                                        std::to_string(B.cols()) +
                                        " columns, hyper has " +
                                        std::to_string(dims));
  }
  const Eigen::VectorXd w = (-2.0 * hyper.log_lengthscales.array()).exp();
  Eigen::MatrixXd out(A.rows(), B.rows());
  if (out.size() == 0) return out;
  simd::scaled_sqdist(A.data(), static_cast<std::size_t>(A.rows()),
                      static_cast<std::size_t>(A.outerStride()), B.data(),
                      static_cast<std::size_t>(B.rows()),
                      static_cast<std::size_t>(B.outerStride()),
                      static_cast<std::size_t>(dims), w.data(), out.data(),
                      static_cast<std::size_t>(out.outerStride()));
  return out;
}

Eigen::MatrixXd kernel_matrix(const KernelHyper& hyper, const Eigen::MatrixXd& A,
                              const Eigen::MatrixXd& B) {
  Eigen::MatrixXd K = scaled_sqdist(hyper, A, B);
  const double sv = hyper.signal_var();
  K = sv * (-0.5 * K.array()).exp();
  return K;
}

JitteredCholesky::JitteredCholesky(const Eigen::MatrixXd& K) {
  if (K.rows() != K.cols()) {
    throw DimensionError("kernels", "cholesky: matrix is not square");
  }
  const auto n = K.rows();
  auto attempt = [&](double jitter) {
    if (jitter == 0.0) {
      llt_.compute(K);
    } else {
      Eigen::MatrixXd Kj = K;
      Kj.diagonal().array() += jitter;
      llt_.compute(Kj);
    }
    if (llt_.info() != Eigen::Success) return false;
    const Eigen::MatrixXd& f = llt_.matrixLLT();
    double ld = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = f(i, i);
      if (!(d > 0.0) || !std::isfinite(d)) return false;
      ld += 2.0 * std::log(d);
    }
    log_det_ = ld;
    jitter_ = jitter;
    return true;
  };
  if (!K.allFinite()) {
    throw NumericalError("kernels", "cholesky: matrix has non-finite entries");
  }
  if (attempt(0.0)) return;
  const double base =
      n > 0 ? 1e-8 * std::max(K.trace(), 0.0) / static_cast<double>(n) : 1e-8;
  double jitter = base > 0.0 ? base : 1e-8;
  for (int retry = 0; retry < 5; ++retry) {
    if (attempt(jitter)) return;
    if (retry < 4) jitter *= 10.0;
  }
  throw NumericalError("kernels",
                       "cholesky failed after maximum jitter " +
                           std::to_string(jitter),
                       jitter);
}

Eigen::MatrixXd JitteredCholesky::inverse() const {
  return llt_.solve(Eigen::MatrixXd::Identity(size(), size()));
}

CholSolve chol_solve_jitter(const Eigen::MatrixXd& K, const Eigen::MatrixXd& B) {
  if (B.rows() != K.rows()) {
    throw DimensionError("kernels", "chol_solve_jitter: right-hand side has " +
                                        std::to_string(B.rows()) +
                                        " rows, matrix has " +
                                        std::to_string(K.rows()));
  }
  const JitteredCholesky chol(K);
  return CholSolve{chol.solve(B), chol.log_det(), chol.jitter()};
}

void KronSpec::validate() const {
  if (time_dim < 0) throw DomainError("kernels", "kron: negative time column");
  std::set<int> cols(space_dims.begin(), space_dims.end());
  if (cols.size() != space_dims.size() || cols.count(time_dim) != 0 ||
      (!cols.empty() && *cols.begin() < 0)) {
    throw DomainError("kernels", "kron: space/time columns overlap or repeat");
  }
  if (space_grid.cols() != static_cast<Eigen::Index>(space_dims.size())) {
    throw DimensionError("kernels", "kron: space grid width mismatch");
  }
  const auto max_col = std::max(time_dim, cols.empty() ? 0 : *cols.rbegin());
  if (max_col >= input_dims()) {
    throw DomainError("kernels", "kron: column index outside input dims");
  }
  std::set<std::vector<double>> rows;
  for (Eigen::Index s = 0; s < space_grid.rows(); ++s) {
    std::vector<double> r;
    r.reserve(static_cast<std::size_t>(space_grid.cols()));
    for (Eigen::Index c = 0; c < space_grid.cols(); ++c) r.push_back(space_grid(s, c));
    if (!rows.insert(r).second) {
      throw DomainError("kernels", "kron: duplicate spatial grid row");
    }
  }
  std::set<double> times(time_grid.data(), time_grid.data() + time_grid.size());
  if (static_cast<Eigen::Index>(times.size()) != time_grid.size()) {
    throw DomainError("kernels", "kron: duplicate time grid value");
  }
}

Eigen::MatrixXd KronSpec::flattened_inputs() const {
  const auto ns = space_grid.rows();
  const auto nt = time_grid.size();
  Eigen::MatrixXd X(ns * nt, input_dims());
  for (Eigen::Index s = 0; s < ns; ++s) {
    for (Eigen::Index t = 0; t < nt; ++t) {
      const auto r = s * nt + t;
      for (std::size_t c = 0; c < space_dims.size(); ++c) {
        X(r, space_dims[c]) = space_grid(s, static_cast<Eigen::Index>(c));
      }
      X(r, time_dim) = time_grid(t);
    }
  }
  return X;
}

KronSpec kron_spec_from_inputs(const Eigen::MatrixXd& X,
                               const std::vector<int>& space_dims, int time_dim) {
  KronSpec spec;
  spec.space_dims = space_dims;
  spec.time_dim = time_dim;
  if (static_cast<Eigen::Index>(space_dims.size()) + 1 != X.cols()) {
    throw DimensionError("kernels", "kron: space and time columns must cover "
                                    "every input column");
  }
  std::map<std::vector<double>, int> space_index;
  std::map<double, int> time_index;
  std::vector<std::vector<double>> space_rows;
  std::vector<double> times;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    std::vector<double> s;
    for (int c : space_dims) s.push_back(X(i, c));
    if (space_index.emplace(s, static_cast<int>(space_rows.size())).second) {
      space_rows.push_back(s);
    }
    const double t = X(i, time_dim);
    if (time_index.emplace(t, static_cast<int>(times.size())).second) {
      times.push_back(t);
    }
  }
  const auto ns = static_cast<Eigen::Index>(space_rows.size());
  const auto nt = static_cast<Eigen::Index>(times.size());
  if (ns * nt != X.rows()) {
    throw DomainError("kernels", "kron: " + std::to_string(X.rows()) +
                                     " rows do not form a full " +
                                     std::to_string(ns) + " x " +
                                     std::to_string(nt) + " grid");
  }
  std::vector<char> seen(static_cast<std::size_t>(ns * nt), 0);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    std::vector<double> s;
    for (int c : space_dims) s.push_back(X(i, c));
    const auto idx = static_cast<std::size_t>(space_index[s] * nt +
                                              time_index[X(i, time_dim)]);
    if (seen[idx]) throw DomainError("kernels", "kron: duplicate grid point");
    seen[idx] = 1;
  }
  spec.space_grid.resize(ns, static_cast<Eigen::Index>(space_dims.size()));
  for (Eigen::Index s = 0; s < ns; ++s) {
    for (Eigen::Index c = 0; c < spec.space_grid.cols(); ++c) {
      spec.space_grid(s, c) = space_rows[static_cast<std::size_t>(s)]
                                        [static_cast<std::size_t>(c)];
    }
  }
  spec.time_grid = Eigen::Map<Eigen::VectorXd>(times.data(), nt);
  spec.validate();
  return spec;
}

Eigen::MatrixXd KronKernel::materialize() const {
  Eigen::MatrixXd K(rows(), cols());
  const auto nt = time.rows();
  const auto mt = time.cols();
  for (Eigen::Index a = 0; a < space.rows(); ++a) {
    for (Eigen::Index b = 0; b < space.cols(); ++b) {
      K.block(a * nt, b * mt, nt, mt) = space(a, b) * time;
    }
  }
  return K;
}

Eigen::VectorXd KronKernel::diagonal() const {
  const auto ns = std::min(space.rows(), space.cols());
  const auto nt = std::min(time.rows(), time.cols());
  Eigen::VectorXd d(ns * nt);
  for (Eigen::Index s = 0; s < ns; ++s) {
    d.segment(s * nt, nt) = space(s, s) * time.diagonal().head(nt);
  }
  return d;
}

Eigen::MatrixXd KronKernel::multiply(const Eigen::MatrixXd& V) const {
  if (V.rows() != cols()) {
    throw DimensionError("kernels", "kron multiply: shape mismatch");
  }
  Eigen::MatrixXd out(rows(), V.cols());
  for (Eigen::Index k = 0; k < V.cols(); ++k) {
    // vec^-1 of column k as (time x space); (A (x) B) vec(M) = vec(B M A^T)
    const Eigen::Map<const Eigen::MatrixXd> M(V.col(k).data(), time.cols(),
                                              space.cols());
    const Eigen::MatrixXd R = time * M * space.transpose();
    out.col(k) = Eigen::Map<const Eigen::VectorXd>(R.data(), R.size());
  }
  return out;
}

KronKernel kron_kernel_matrix(const KernelHyper& hyper_space,
                              const KernelHyper& hyper_time,
                              const KronSpec& spec) {
  spec.validate();
  if (hyper_space.dims() != static_cast<Eigen::Index>(spec.space_dims.size()) ||
      hyper_time.dims() != 1) {
    throw DimensionError("kernels", "kron: hyper dimensions do not match grid");
  }
  KronKernel k;
  k.space = kernel_matrix(hyper_space, spec.space_grid, spec.space_grid);
  const Eigen::MatrixXd t = spec.time_grid;
  k.time = kernel_matrix(hyper_time, t, t);
  return k;
}

std::pair<KernelHyper, KernelHyper> split_kron_hyper(const KernelHyper& full,
                                                     const KronSpec& spec) {
  if (full.dims() != spec.input_dims()) {
    throw DimensionError("kernels", "kron: hyper dimensions do not match grid");
  }
  KernelHyper space;
  space.log_signal_var = full.log_signal_var;
  space.log_lengthscales.resize(static_cast<Eigen::Index>(spec.space_dims.size()));
  for (std::size_t c = 0; c < spec.space_dims.size(); ++c) {
    space.log_lengthscales(static_cast<Eigen::Index>(c)) =
        full.log_lengthscales(spec.space_dims[c]);
  }
  KernelHyper time(0.0, Eigen::VectorXd::Constant(
                            1, full.log_lengthscales(spec.time_dim)));
  return {space, time};
}

}  // namespace zigp
