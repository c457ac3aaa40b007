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

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define ZIGP_HAVE_X86 1
#else
#define ZIGP_HAVE_X86 0
#endif

namespace zigp::simd::avx2 {

#if ZIGP_HAVE_X86

__attribute__((target("avx2"))) void scaled_sqdist(
    const double* a, std::size_t na, std::size_t lda, const double* b,
    std::size_t nb, std::size_t ldb, std::size_t dims, const double* w,
    double* out, std::size_t ldo) {
  const std::size_t blocked = na - na % 4;
  for (std::size_t j = 0; j < nb; ++j) {
    std::size_t i = 0;
    for (; i < blocked; i += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t d = 0; d < dims; ++d) {
        const __m256d va = _mm256_loadu_pd(a + d * lda + i);
        const __m256d vb = _mm256_set1_pd(b[d * ldb + j]);
        const __m256d diff = _mm256_sub_pd(va, vb);
        const __m256d sq = _mm256_mul_pd(diff, diff);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(sq, _mm256_set1_pd(w[d])));
      }
      _mm256_storeu_pd(out + j * ldo + i, acc);
    }
    for (; i < na; ++i) {
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

__attribute__((target("avx2"))) void row_dots(const double* a, std::size_t lda,
                                              const double* b, std::size_t ldb,
                                              std::size_t n, std::size_t cols,
                                              double* out) {
  const std::size_t blocked = n - n % 4;
  std::size_t i = 0;
  for (; i < blocked; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < cols; ++j) {
      const __m256d va = _mm256_loadu_pd(a + j * lda + i);
      const __m256d vb = _mm256_loadu_pd(b + j * ldb + i);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double prod = a[j * lda + i] * b[j * ldb + i];
      acc = acc + prod;
    }
    out[i] = acc;
  }
}

__attribute__((target("avx2"))) void gated_product_moments(
    std::size_t n, const double* mw, const double* vw, const double* ga,
    const double* gv, const double* mf, const double* vf, double* mean,
    double* extra) {
  const std::size_t blocked = n - n % 4;
  std::size_t i = 0;
  for (; i < blocked; i += 4) {
    const __m256d w_m = _mm256_loadu_pd(mw + i);
    const __m256d w_v = _mm256_loadu_pd(vw + i);
    const __m256d f_m = _mm256_loadu_pd(mf + i);
    const __m256d f_v = _mm256_loadu_pd(vf + i);
    const __m256d mw2 = _mm256_mul_pd(w_m, w_m);
    const __m256d mf2 = _mm256_mul_pd(f_m, f_m);
    const __m256d spread =
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(mw2, f_v),
                                    _mm256_mul_pd(mf2, w_v)),
                      _mm256_mul_pd(w_v, f_v));
    __m256d acc_mean = _mm256_loadu_pd(mean + i);
    __m256d acc_extra = _mm256_loadu_pd(extra + i);
    if (ga == nullptr) {
      acc_mean = _mm256_add_pd(acc_mean, _mm256_mul_pd(w_m, f_m));
      acc_extra = _mm256_add_pd(acc_extra, spread);
    } else {
      const __m256d g_a = _mm256_loadu_pd(ga + i);
      const __m256d g_v = _mm256_loadu_pd(gv + i);
      const __m256d gate2 = _mm256_add_pd(_mm256_mul_pd(g_a, g_a), g_v);
      acc_mean = _mm256_add_pd(acc_mean,
                               _mm256_mul_pd(_mm256_mul_pd(w_m, g_a), f_m));
      const __m256d term = _mm256_add_pd(
          _mm256_mul_pd(gate2, spread),
          _mm256_mul_pd(_mm256_mul_pd(g_v, mw2), mf2));
      acc_extra = _mm256_add_pd(acc_extra, term);
    }
    _mm256_storeu_pd(mean + i, acc_mean);
    _mm256_storeu_pd(extra + i, acc_extra);
  }
  if (i < n) {
    scalar::gated_product_moments(
        n - i, mw + i, vw + i, ga == nullptr ? nullptr : ga + i,
        gv == nullptr ? nullptr : gv + i, mf + i, vf + i, mean + i, extra + i);
  }
}

#else

void scaled_sqdist(const double* a, std::size_t na, std::size_t lda,
                   const double* b, std::size_t nb, std::size_t ldb,
                   std::size_t dims, const double* w, double* out,
                   std::size_t ldo) {
  scalar::scaled_sqdist(a, na, lda, b, nb, ldb, dims, w, out, ldo);
}
void row_dots(const double* a, std::size_t lda, const double* b,
              std::size_t ldb, std::size_t n, std::size_t cols, double* out) {
  scalar::row_dots(a, lda, b, ldb, n, cols, out);
}
void gated_product_moments(std::size_t n, const double* mw, const double* vw,
                           const double* ga, const double* gv,
                           const double* mf, const double* vf, double* mean,
                           double* extra) {
  scalar::gated_product_moments(n, mw, vw, ga, gv, mf, vf, mean, extra);
}

#endif

}  // namespace zigp::simd::avx2
