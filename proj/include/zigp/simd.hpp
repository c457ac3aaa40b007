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

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
//
// The variant is chosen once at first use: AVX2 when the CPU reports it,
// unless ZIGP_SIMD=scalar is set in the environment. Both variants evaluate
// identical expression trees per element (no FMA, same summation order), so
// results agree bit-for-bit; tests/test_simd.cpp checks this.
//
// Matrices are column-major with explicit leading dimensions, matching the
// Eigen::MatrixXd default layout.

#include <cstddef>
#include <string_view>

namespace zigp::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// True when the running CPU supports AVX2.
bool avx2_supported();

/// The variant used by the dispatching entry points below.
Isa active_isa();

/// Force a variant (tests and benchmarking). Requesting Avx2 on a CPU
/// without it falls back to Scalar. Returns the variant now active.
Isa set_active_isa(Isa isa);

/// out(i,j) = sum_d w[d] * (a(i,d) - b(j,d))^2
/// a: na x dims (lda), b: nb x dims (ldb), out: na x nb (ldo).
void scaled_sqdist(const double* a, std::size_t na, std::size_t lda,
                   const double* b, std::size_t nb, std::size_t ldb,
                   std::size_t dims, const double* w, double* out,
                   std::size_t ldo);

/// out[i] = sum_j a(i,j) * b(i,j) for n x cols column-major a, b.
void row_dots(const double* a, std::size_t lda, const double* b,
              std::size_t ldb, std::size_t n, std::size_t cols, double* out);

/// Moments of a gated product s = w * phi * f with independent factors,
/// where w ~ (mw, vw), f ~ (mf, vf) and the gate has mean `ga` and
/// variance `gv`. Accumulates, for every i,
///   mean[i]  += mw*ga*mf
///   extra[i] += (ga^2 + gv)*(mw^2*vf + mf^2*vw + vw*vf) + gv*mw^2*mf^2
/// i.e. Var[s]. Passing ga == nullptr means ga = 1, gv = 0 (ungated).
void gated_product_moments(std::size_t n, const double* mw, const double* vw,
                           const double* ga, const double* gv,
                           const double* mf, const double* vf, double* mean,
                           double* extra);

namespace scalar {
void scaled_sqdist(const double* a, std::size_t na, std::size_t lda,
                   const double* b, std::size_t nb, std::size_t ldb,
                   std::size_t dims, const double* w, double* out,
                   std::size_t ldo);
void row_dots(const double* a, std::size_t lda, const double* b,
              std::size_t ldb, std::size_t n, std::size_t cols, double* out);
void gated_product_moments(std::size_t n, const double* mw, const double* vw,
                           const double* ga, const double* gv,
                           const double* mf, const double* vf, double* mean,
                           double* extra);
}  // namespace scalar

namespace avx2 {
void scaled_sqdist(const double* a, std::size_t na, std::size_t lda,
                   const double* b, std::size_t nb, std::size_t ldb,
                   std::size_t dims, const double* w, double* out,
                   std::size_t ldo);
void row_dots(const double* a, std::size_t lda, const double* b,
              std::size_t ldb, std::size_t n, std::size_t cols, double* out);
void gated_product_moments(std::size_t n, const double* mw, const double* vw,
                           const double* ga, const double* gv,
                           const double* mf, const double* vf, double* mean,
                           double* extra);
}  // namespace avx2

}  // namespace zigp::simd
