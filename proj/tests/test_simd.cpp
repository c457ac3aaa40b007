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

#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "zigp/kernels.hpp"
#include "zigp/model.hpp"
#include "zigp/simd.hpp"
#include "zigp/training.hpp"

using namespace zigp;

namespace {

std::vector<double> draws(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> U(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = U(rng);
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Restores the dispatch choice when a test case leaves.
struct IsaGuard {
  simd::Isa saved = simd::active_isa();
  ~IsaGuard() { simd::set_active_isa(saved); }
};

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("dispatch selection") {
  IsaGuard guard;
  CHECK(simd::set_active_isa(simd::Isa::Scalar) == simd::Isa::Scalar);
  CHECK(simd::active_isa() == simd::Isa::Scalar);
  const simd::Isa got = simd::set_active_isa(simd::Isa::Avx2);
  CHECK(got == (simd::avx2_supported() ? simd::Isa::Avx2 : simd::Isa::Scalar));
  CHECK(simd::isa_name(simd::Isa::Scalar) == "scalar");
  CHECK(simd::isa_name(simd::Isa::Avx2) == "avx2");
}

TEST_CASE("scaled_sqdist variants agree bit for bit") {
  if (!simd::avx2_supported()) return;
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> sz(1, 37), dm(1, 5);
  for (int k = 0; k < 200; ++k) {
    const std::size_t na = sz(rng), nb = sz(rng), D = dm(rng);
    const std::size_t lda = na + k % 3, ldb = nb + k % 2, ldo = na + k % 4;
    const auto a = draws(rng, lda * D, -3, 3);
    const auto b = draws(rng, ldb * D, -3, 3);
    const auto w = draws(rng, D, 0.1, 5);
    std::vector<double> o1(ldo * nb, -1.0), o2(ldo * nb, -1.0);
    simd::scalar::scaled_sqdist(a.data(), na, lda, b.data(), nb, ldb, D, w.data(), o1.data(), ldo);
    simd::avx2::scaled_sqdist(a.data(), na, lda, b.data(), nb, ldb, D, w.data(), o2.data(), ldo);
    CHECK(same_bits(o1, o2));
  }
}

TEST_CASE("scaled_sqdist scalar reference values") {
  const double a[] = {0.0, 1.0, 2.0, 0.0};  // 2 x 2 column-major: (0,2), (1,0)
  const double b[] = {1.0, 1.0};            // 1 x 2: (1,1)
  const double w[] = {1.0, 0.5};
  double out[2];
  simd::scalar::scaled_sqdist(a, 2, 2, b, 1, 1, 2, w, out, 2);
  CHECK(out[0] == 1.0 + 0.5);
  CHECK(out[1] == 0.0 + 0.5);
}

TEST_CASE("row_dots variants agree bit for bit") {
  if (!simd::avx2_supported()) return;
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> sz(1, 70), cs(1, 9);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = sz(rng), c = cs(rng), lda = n + k % 3, ldb = n + k % 5;
    const auto a = draws(rng, lda * c, -2, 2);
    const auto b = draws(rng, ldb * c, -2, 2);
    std::vector<double> o1(n), o2(n);
    simd::scalar::row_dots(a.data(), lda, b.data(), ldb, n, c, o1.data());
    simd::avx2::row_dots(a.data(), lda, b.data(), ldb, n, c, o2.data());
    CHECK(same_bits(o1, o2));
    double ref = 0.0;
    for (std::size_t j = 0; j < c; ++j) ref += a[j * lda] * b[j * ldb];
    CHECK(o1[0] == doctest::Approx(ref).epsilon(1e-14));
  }
}

TEST_CASE("gated_product_moments variants agree bit for bit") {
  if (!simd::avx2_supported()) return;
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> sz(1, 90);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = sz(rng);
    const auto mw = draws(rng, n, -2, 2), vw = draws(rng, n, 0, 1);
    const auto ga = draws(rng, n, 0, 1), gv = draws(rng, n, 0, 0.25);
    const auto mf = draws(rng, n, -2, 2), vf = draws(rng, n, 0, 1);
    const auto seed_mean = draws(rng, n, -1, 1), seed_extra = draws(rng, n, 0, 1);
    for (bool gated : {true, false}) {
      auto m1 = seed_mean, e1 = seed_extra, m2 = seed_mean, e2 = seed_extra;
      const double* pa = gated ? ga.data() : nullptr;
      const double* pv = gated ? gv.data() : nullptr;
      simd::scalar::gated_product_moments(n, mw.data(), vw.data(), pa, pv, mf.data(), vf.data(),
                                          m1.data(), e1.data());
      simd::avx2::gated_product_moments(n, mw.data(), vw.data(), pa, pv, mf.data(), vf.data(),
                                        m2.data(), e2.data());
      CHECK(same_bits(m1, m2));
      CHECK(same_bits(e1, e2));
    }
  }
}

TEST_CASE("gated_product_moments matches the product-moment formula") {
  const double mw = 0.7, vw = 0.2, ga = 0.6, gv = 0.05, mf = -1.3, vf = 0.4;
  double mean = 0.0, extra = 0.0;
  simd::scalar::gated_product_moments(1, &mw, &vw, &ga, &gv, &mf, &vf, &mean, &extra);
  // E[s^2] - E[s]^2 with independent factors
  const double es2 = (ga * ga + gv) * (mw * mw + vw) * (mf * mf + vf);
  const double es = mw * ga * mf;
  CHECK(mean == doctest::Approx(es).epsilon(1e-15));
  CHECK(extra == doctest::Approx(es2 - es * es).epsilon(1e-13));
}

TEST_CASE("model ELBOs agree across variants") {
  if (!simd::avx2_supported()) return;
  IsaGuard guard;
  for (ModelKind kind : {ModelKind::Svgp, ModelKind::Zigp, ModelKind::Gprn, ModelKind::Sgprn}) {
    const GradCheckInstance inst = random_instance(kind, 5);
    simd::set_active_isa(simd::Isa::Scalar);
    const double a = elbo(inst.state, inst.X, inst.Y, inst.scale);
    const Prediction pa = predict(inst.state, inst.X);
    simd::set_active_isa(simd::Isa::Avx2);
    const double b = elbo(inst.state, inst.X, inst.Y, inst.scale);
    const Prediction pb = predict(inst.state, inst.X);
    CHECK(a == b);
    CHECK(pa.mean == pb.mean);
    CHECK(pa.var == pb.var);
  }
}

}  // TEST_SUITE
