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
#include <string>
#include <vector>

#include "zigp/model.hpp"

namespace zigp {

/// Named index range of a ParamVector.
struct Slice {
  std::string name;
  Eigen::Index offset = 0;
  Eigen::Index size = 0;
};

/// Flat parameter (or gradient) vector with its named layout. Slices per
/// process are <prefix>.log_signal_var, .log_lengthscales, .Z (or
/// .Z.space / .Z.time when gridded), .m, .L; prefixes are f, g (ZiGP) or
/// f.q, w.q.p, g.q.p (networks). sGPRN g processes carry no Z slice since
/// they share their w locations. L lists the lower triangle column by
/// column, diagonal entries as log L_jj.
struct ParamVector {
  Eigen::VectorXd values;
  std::vector<Slice> layout;

  const Slice& slice(const std::string& name) const;
  Eigen::Index size() const { return values.size(); }
};

ParamVector flatten(const ModelState& state);

/// Same layout for a gradient container produced by elbo_grad; no log
/// transform is applied since gradients already refer to the parameters.
ParamVector flatten_gradient(const ModelState& grad);

/// Writes values into a copy of `like` (which supplies shapes), then
/// re-expands gridded locations and re-ties sGPRN support locations.
ModelState unflatten(const ParamVector& params, const ModelState& like);

}  // namespace zigp
