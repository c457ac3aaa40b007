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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zigp/dataset.hpp"
#include "zigp/model.hpp"
#include "zigp/params.hpp"

namespace zigp {

struct GammaPrior {
  double alpha = 0.3;
  double beta = 1.0;
};

struct TrainConfig {
  double learning_rate = 1e-2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  long steps = 1000;
  long batch_size = 256;
  unsigned long long seed = 0;
  bool lengthscale_prior = false;  // gamma prior on every lengthscale
  GammaPrior prior;

  // Initialization.
  long inducing = 20;        // inducing points per process
  long inducing_space = 0;   // Kronecker grids: spatial inducing rows
  long inducing_time = 0;    // Kronecker grids: temporal inducing values
  int latent_q = 2;          // GPRN / sGPRN latent functions

  /// Throws UsageError on out-of-range values.
  void validate() const;
  /// Applies `key = value` pairs; unknown keys are usage errors.
  void apply(const std::map<std::string, std::string>& kv);
  /// Flat `key = value` text, one per line, loadable by apply().
  std::string to_text() const;
};

/// Reads a flat config file: `key = value` lines, '#' comments.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// ELBO plus, when enabled, sum over every lengthscale of
/// (alpha - 1) log l - beta l.
double objective(const ModelState& state, const Eigen::MatrixXd& X,
                 const Eigen::MatrixXd& Y, double scale, const TrainConfig& config);

/// Gradient of the objective over the flattened layout. `value` receives
/// the objective. Non-finite entries raise NumericalError naming the slice.
ParamVector gradient(const ModelState& state, const Eigen::MatrixXd& X,
                     const Eigen::MatrixXd& Y, double scale, const TrainConfig& config,
                     double* value = nullptr);

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;
};

/// One bias-corrected Adam step ascending the objective.
ParamVector adam_step(const ParamVector& params, const ParamVector& grad,
                      AdamState& opt, const TrainConfig& config);

/// Default initial state: inducing locations subsampled from the inputs
/// (or grid-tied for Kronecker datasets), q(u) at the prior, hypers from
/// data scales. Network f means start at a random prior draw so f and W
/// do not sit at the zero saddle.
ModelState initial_state(ModelKind kind, const Dataset& data, const TrainConfig& config);

struct FitResult {
  ModelState state;
  std::vector<double> trace;  // objective on each step's minibatch, scaled
};

/// Seeded minibatch Adam from initial_state for config.steps steps.
FitResult fit(ModelKind kind, const Dataset& data, const TrainConfig& config);

/// Same, from a given state.
FitResult fit_from(ModelState state, const Dataset& data, const TrainConfig& config);

struct SliceCheck {
  std::string name;
  Eigen::Index worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  ModelKind kind = ModelKind::Svgp;
  std::vector<SliceCheck> slices;
  double max_rel_error() const;
  bool passed(double tol = 1e-4) const { return max_rel_error() < tol; }
  std::string to_text() const;
};

/// |a - b| / max(|a|, |b|, 1)
double gradcheck_rel_error(double a, double b);

/// Random desk-scale instance of the given kind (seeded).
struct GradCheckInstance {
  ModelState state;
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;
  double scale = 1.0;
};
GradCheckInstance random_instance(ModelKind kind, unsigned long long seed);

/// Central differences of the objective against gradient(), per slice.
GradCheckReport grad_check(ModelKind kind, unsigned long long seed, double eps);
GradCheckReport grad_check(const ModelState& state, const Eigen::MatrixXd& X,
                           const Eigen::MatrixXd& Y, double scale,
                           const TrainConfig& config, double eps);

}  // namespace zigp
