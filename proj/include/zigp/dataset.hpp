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
#include <vector>

#include "zigp/kernels.hpp"

namespace zigp {

/// Inputs X (n x D), outputs Y (n x P) and optional grid structure.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
  std::optional<KronSpec> kron;

  Eigen::Index size() const { return X.rows(); }
};

}  // namespace zigp
