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

#include "zigp/model_common.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <string>

#include "zigp/error.hpp"
#include "zigp/parallel.hpp"

namespace zigp {

Process zeros_like(const Process& p) {
  Process z;
  z.hyper.log_signal_var = 0.0;
  z.hyper.log_lengthscales = Eigen::VectorXd::Zero(p.hyper.dims());
  z.block.Z = Eigen::MatrixXd::Zero(p.block.Z.rows(), p.block.Z.cols());
  z.block.m = Eigen::VectorXd::Zero(p.block.m.size());
  z.block.L = Eigen::MatrixXd::Zero(p.block.L.rows(), p.block.L.cols());
  if (p.block.grid) {
    InducingGrid g = *p.block.grid;
    g.space.setZero();
    g.time.setZero();
    z.block.grid = g;
  }
  return z;
}

void add_block_grad(const BlockGrad& g, Process& out) {
  out.hyper.log_signal_var += g.log_signal_var;
  out.hyper.log_lengthscales += g.log_lengthscales;
  out.block.Z += g.Z;
  out.block.m += g.m;
  out.block.L += g.L;
}

void fold_grid_grad(Process& out) {
  if (!out.block.grid) return;
  Eigen::MatrixXd ds;
  Eigen::VectorXd dt;
  out.block.grid->fold_gradient(out.block.Z, ds, dt);
  out.block.grid->space = ds;
  out.block.grid->time = dt;
}

double ordered_sum(const Eigen::VectorXd& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += v(i);
  return s;
}

void check_batch(const char* module, const Eigen::MatrixXd& X, Eigen::Index rows,
                 Eigen::Index dims) {
  if (X.cols() != dims) {
    throw DimensionError(module, "inputs have " + std::to_string(X.cols()) +
                                     " columns, model expects " +
                                     std::to_string(dims));
  }
  if (rows != X.rows()) {
    throw DimensionError(module, "outputs have " + std::to_string(rows) +
                                     " rows, inputs have " +
                                     std::to_string(X.rows()));
  }
}

double gaussian_log_norm(double s2) {
  return -0.5 * std::log(2.0 * std::numbers::pi * s2);
}

std::vector<BlockEval> evaluate_processes(const std::vector<const Process*>& ps,
                                          const Eigen::MatrixXd& X) {
  std::vector<BlockEval> out(ps.size());
  std::vector<std::exception_ptr> errors(ps.size());
  parallel_for(ps.size(), 1, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      try {
        out[k] = evaluate_block(ps[k]->hyper, X, ps[k]->block);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  });
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return out;
}

}  // namespace zigp
