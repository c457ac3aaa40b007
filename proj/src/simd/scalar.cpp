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

#include "zigp/simd.hpp"

namespace zigp::simd::scalar {

void scaled_sqdist(const double* a, std::size_t na, std::size_t lda,
                   const double* b, std::size_t nb, std::size_t ldb,
                   std::size_t dims, const double* w, double* out,
                   std::size_t ldo) {
  for (std::size_t j = 0; j < nb; ++j) {
    for (std::size_t i = 0; i < na; ++i) {
      double acc = 0.0;
      for (std::size_t d = 0; d < dims; ++d) {
        const double diff = a[d * lda + i] - b[d * ldb + j];
        const double sq = diff * diff;
        acc = acc + sq * w[d];
      }
      out[j * ldo + i] = acc;
    }
  }
}

void row_dots(const double* a, std::size_t lda, const double* b,
              std::size_t ldb, std::size_t n, std::size_t cols, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double prod = a[j * lda + i] * b[j * ldb + i];
      acc = acc + prod;
    }
    out[i] = acc;
  }
}

void gated_product_moments(std::size_t n, const double* mw, const double* vw,
                           const double* ga, const double* gv,
                           const double* mf, const double* vf, double* mean,
                           double* extra) {
  for (std::size_t i = 0; i < n; ++i) {
    const double mw2 = mw[i] * mw[i];
    const double mf2 = mf[i] * mf[i];
    // mw^2*vf + mf^2*vw + vw*vf
    const double spread = (mw2 * vf[i] + mf2 * vw[i]) + vw[i] * vf[i];
    if (ga == nullptr) {
      mean[i] = mean[i] + mw[i] * mf[i];
      extra[i] = extra[i] + spread;
    } else {
      const double gate2 = ga[i] * ga[i] + gv[i];
      mean[i] = mean[i] + (mw[i] * ga[i]) * mf[i];
      extra[i] = extra[i] + (gate2 * spread + (gv[i] * mw2) * mf2);
    }
  }
}

}  // namespace zigp::simd::scalar
