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

#include <atomic>
#include <cstdlib>
#include <string>

#include "zigp/simd.hpp"

namespace zigp::simd {

namespace {

Isa detect() {
  if (const char* env = std::getenv("ZIGP_SIMD")) {
    if (std::string(env) == "scalar") return Isa::Scalar;
  }
  return avx2_supported() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Avx2:
      return "avx2";
    case Isa::Scalar:
      break;
  }
  return "scalar";
}

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

Isa set_active_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_supported()) isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
  return isa;
}

void scaled_sqdist(const double* a, std::size_t na, std::size_t lda,
                   const double* b, std::size_t nb, std::size_t ldb,
                   std::size_t dims, const double* w, double* out,
                   std::size_t ldo) {
  if (active_isa() == Isa::Avx2) {
    avx2::scaled_sqdist(a, na, lda, b, nb, ldb, dims, w, out, ldo);
  } else {
    scalar::scaled_sqdist(a, na, lda, b, nb, ldb, dims, w, out, ldo);
  }
}

void row_dots(const double* a, std::size_t lda, const double* b,
              std::size_t ldb, std::size_t n, std::size_t cols, double* out) {
  if (active_isa() == Isa::Avx2) {
    avx2::row_dots(a, lda, b, ldb, n, cols, out);
  } else {
    scalar::row_dots(a, lda, b, ldb, n, cols, out);
  }
}

void gated_product_moments(std::size_t n, const double* mw, const double* vw,
                           const double* ga, const double* gv,
                           const double* mf, const double* vf, double* mean,
                           double* extra) {
  if (active_isa() == Isa::Avx2) {
    avx2::gated_product_moments(n, mw, vw, ga, gv, mf, vf, mean, extra);
  } else {
    scalar::gated_product_moments(n, mw, vw, ga, gv, mf, vf, mean, extra);
  }
}

}  // namespace zigp::simd
