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
#include <string>
#include <string_view>
#include <variant>

#include "zigp/gprn.hpp"
#include "zigp/sgprn.hpp"
#include "zigp/svgp.hpp"
#include "zigp/zigp_model.hpp"

namespace zigp {

enum class ModelKind { Svgp, Zigp, Gprn, Sgprn };

std::string_view kind_name(ModelKind k);
/// Parses "svgp" / "zigp" / "gprn" / "sgprn"; throws UsageError otherwise.
ModelKind parse_kind(std::string_view s);

using ModelState = std::variant<SvgpState, ZigpState, GprnState, SgprnState>;

ModelKind kind_of(const ModelState& s);
Eigen::Index input_dims(const ModelState& s);
Eigen::Index output_dims(const ModelState& s);

/// Outputs are n x P; single-output models require P = 1.
ElboTerms elbo_terms(const ModelState& s, const Eigen::MatrixXd& X,
                     const Eigen::MatrixXd& Y);
double elbo(const ModelState& s, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
            double scale);
/// ELBO value and its gradient in a state-shaped container of the same kind.
double elbo_grad(const ModelState& s, const Eigen::MatrixXd& X,
                 const Eigen::MatrixXd& Y, double scale, ModelState& grad);

struct Prediction {
  Eigen::MatrixXd mean;  // n x P
  Eigen::MatrixXd var;   // n x P
  std::optional<Eigen::VectorXd> support_prob;  // ZiGP only
};

Prediction predict(const ModelState& s, const Eigen::MatrixXd& Xstar);

/// Every process of the state, in layout order.
std::vector<Process*> processes(ModelState& s);
std::vector<const Process*> processes(const ModelState& s);

}  // namespace zigp
