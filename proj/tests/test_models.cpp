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

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "zigp/error.hpp"
#include "zigp/model.hpp"
#include "zigp/training.hpp"

using namespace zigp;

namespace {

const ModelKind kAllKinds[] = {ModelKind::Svgp, ModelKind::Zigp, ModelKind::Gprn, ModelKind::Sgprn};

double lognorm_sum(const Eigen::MatrixXd& Y, double s2) {
  double t = 0.0;
  for (Eigen::Index k = 0; k < Y.size(); ++k) {
    t += -0.5 * std::log(2.0 * std::numbers::pi * s2) - 0.5 * Y.data()[k] * Y.data()[k] / s2;
  }
  return t;
}

SvgpState svgp_of(unsigned long long seed) {
  return std::get<SvgpState>(random_instance(ModelKind::Svgp, seed).state);
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("kind names round trip") {
  for (ModelKind k : kAllKinds) CHECK(parse_kind(kind_name(k)) == k);
  CHECK_THROWS_AS(parse_kind("gp"), UsageError);
}

TEST_CASE("prior state on an empty batch has a zero ELBO") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd Z = fixture::random_matrix(rng, 4, 2);
  const KernelHyper h(0.2, Eigen::VectorXd::Constant(2, 0.1));
  const Process prior{h, InducingBlock::prior(h, Z)};
  const Eigen::MatrixXd X0(0, 2), Y0(0, 1);
  CHECK(std::abs(elbo(SvgpState{prior, -1.0}, X0, Y0, 1.0)) < 1e-12);
  CHECK(std::abs(elbo(ZigpState{prior, prior, -1.0, 0.3}, X0, Y0, 1.0)) < 1e-12);
}

TEST_CASE("single-output models reject multi-column outputs") {
  const GradCheckInstance inst = random_instance(ModelKind::Svgp, 0);
  const Eigen::MatrixXd Y2 = Eigen::MatrixXd::Zero(inst.X.rows(), 2);
  CHECK_THROWS_AS(elbo(inst.state, inst.X, Y2, 1.0), DimensionError);
  CHECK_THROWS_AS(elbo(inst.state, inst.X.leftCols(1), inst.Y, 1.0), DimensionError);
}

TEST_CASE("expected log-likelihood matches Monte Carlo") {
  for (ModelKind k : kAllKinds) {
    const GradCheckInstance inst = random_instance(k, 11);
    const double closed = elbo_terms(inst.state, inst.X, inst.Y).data;
    const fixture::McEstimate mc = fixture::mc_expected_loglik(inst.state, inst.X, inst.Y, 200000, 3);
    CHECK(std::abs(closed - mc.mean) <= 4.0 * mc.se);
  }
}

TEST_CASE("data terms decompose over any partition") {
  std::mt19937_64 rng(5);
  for (ModelKind k : kAllKinds) {
    const GradCheckInstance inst = random_instance(k, 3);
    const ElboTerms full = elbo_terms(inst.state, inst.X, inst.Y);
    const Eigen::Index n = inst.X.rows();
    std::vector<int> label(static_cast<std::size_t>(n));
    std::uniform_int_distribution<int> pick(0, 2);
    for (auto& l : label) l = pick(rng);
    double sum = 0.0;
    for (int b = 0; b < 3; ++b) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (label[static_cast<std::size_t>(i)] == b) idx.push_back(i);
      }
      const ElboTerms t = elbo_terms(inst.state, inst.X(idx, Eigen::all), inst.Y(idx, Eigen::all));
      sum += t.data;
      CHECK(t.kl == doctest::Approx(full.kl).epsilon(1e-14));
    }
    CHECK(std::abs(sum - full.data) <= 1e-10 * std::max(1.0, std::abs(full.data)));
  }
}

TEST_CASE("svgp bound stays below the exact evidence on full-rank instances") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    const Eigen::MatrixXd X = fixture::random_matrix(rng, 10, 1, 2.0);
    const Eigen::VectorXd y = fixture::random_matrix(rng, 10, 1);
    const KernelHyper h(0.0, Eigen::VectorXd::Constant(1, 0.0));
    SvgpState s{{h, InducingBlock::prior(h, X)}, std::log(0.1)};
    s.f.block.m = fixture::random_matrix(rng, 10, 1);
    const double exact = oracle::exact_log_evidence(oracle::ard(0.0, h.log_lengthscales, X, X), y, 0.1);
    CHECK(elbo_svgp(s, X, y, 1.0) <= exact + 1e-9);
  }
}

TEST_CASE("svgp predictions") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd X = fixture::random_matrix(rng, 5, 2);
  const KernelHyper h(std::log(1.5), Eigen::VectorXd::Constant(2, 0.0));
  SvgpState s{{h, InducingBlock::prior(h, X)}, std::log(0.04)};
  const Eigen::MatrixXd Xs = fixture::random_matrix(rng, 7, 2);
  const SvgpPrediction p0 = predict_svgp(s, Xs);
  CHECK(p0.mean.cwiseAbs().maxCoeff() == 0.0);
  CHECK((p0.var.array() - 1.54).abs().maxCoeff() < 1e-10);

  s.f.block.m = fixture::random_matrix(rng, 5, 1);
  s.f.block.L = 1e-8 * Eigen::MatrixXd::Identity(5, 5);
  const SvgpPrediction p1 = predict_svgp(s, X);
  CHECK((p1.mean - s.f.block.m).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("zigp pinned on reduces to svgp") {
  for (unsigned long long seed = 0; seed < 5; ++seed) {
    const GradCheckInstance inst = random_instance(ModelKind::Svgp, seed);
    const SvgpState s = std::get<SvgpState>(inst.state);
    const ZigpState z = fixture::zigp_pinned(s, 8.0);
    const Eigen::VectorXd y = inst.Y.col(0);
    CHECK(fixture::process_kl(z.g, inst.X) < 1e-10);
    CHECK(std::abs(elbo_zigp(z, inst.X, y, inst.scale) - elbo_svgp(s, inst.X, y, inst.scale)) < 1e-6);

    const Eigen::MatrixXd Xs = inst.X.array() + 0.1;
    const ZigpPrediction pz = predict_zigp(z, Xs);
    const SvgpPrediction ps = predict_svgp(s, Xs);
    CHECK((pz.mean - ps.mean).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((pz.var - ps.var).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("zigp pinned off predicts zero") {
  const GradCheckInstance inst = random_instance(ModelKind::Svgp, 1);
  const SvgpState s = std::get<SvgpState>(inst.state);
  const ZigpState z = fixture::zigp_pinned(s, -8.0);
  const ZigpPrediction p = predict_zigp(z, inst.X);
  CHECK(p.mean.cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p.var.array() - s.noise_var()).abs().maxCoeff() < 1e-12);
  CHECK(p.support_prob.maxCoeff() < 1e-12);
}

TEST_CASE("zigp support probability is one half at a zero gate mean") {
  ZigpState z = std::get<ZigpState>(random_instance(ModelKind::Zigp, 2).state);
  z.beta = 0.0;
  z.g.block.m.setZero();
  std::mt19937_64 rng(4);
  const ZigpPrediction p = predict_zigp(z, fixture::random_matrix(rng, 9, 2));
  CHECK((p.support_prob.array() - 0.5).abs().maxCoeff() < 1e-15);
  CHECK(p.var.minCoeff() > 0.0);
}

TEST_CASE("zigp beta shift with a compensating g shift keeps the data term") {
  const GradCheckInstance inst = random_instance(ModelKind::Zigp, 4);
  ZigpState z = std::get<ZigpState>(inst.state);
  const Eigen::MatrixXd X = z.g.block.Z;  // Q = I here, so a constant m shift moves every mu_g
  std::mt19937_64 rng(8);
  const Eigen::VectorXd y = fixture::random_matrix(rng, X.rows(), 1);
  z.f.block.Z = X;
  const double a = zigp_elbo_terms(z, X, y).data;
  for (double d : {-1.3, 0.4, 2.0}) {
    ZigpState t = z;
    t.beta += d;
    t.g.block.m.array() -= d;
    CHECK(zigp_elbo_terms(t, X, y).data == doctest::Approx(a).epsilon(1e-9));
  }
}

TEST_CASE("classify_zero") {
  Eigen::VectorXd mean(3), sp(3);
  mean << 0.001, -0.5, 0.02;
  sp << 0.9, 0.2, 0.5;
  const auto s = classify_zero(mean, sp, ZeroMode::Support, 0.5);
  CHECK(s == std::vector<bool>{false, true, false});
  const auto m = classify_zero(mean, sp, ZeroMode::Mean, 0.01);
  CHECK(m == std::vector<bool>{true, false, false});
  const auto ones = classify_zero(mean, Eigen::VectorXd::Ones(3), ZeroMode::Support, 0.5);
  CHECK(ones == std::vector<bool>(3, false));
  CHECK_THROWS_AS(classify_zero(mean, sp, ZeroMode::Support, 1.0), DomainError);
  CHECK_THROWS_AS(classify_zero(mean, sp, ZeroMode::Mean, 0.0), DomainError);
}

TEST_CASE("gprn with a unit weight reduces to svgp") {
  for (unsigned long long seed = 0; seed < 5; ++seed) {
    const GradCheckInstance inst = random_instance(ModelKind::Svgp, seed);
    const SvgpState s = std::get<SvgpState>(inst.state);
    const GprnState g = fixture::gprn_unit_weight(s, inst.X);
    const double kl_w = fixture::process_kl(g.w[0], inst.X);
    CHECK(std::abs(elbo_gprn(g, inst.X, inst.Y, inst.scale) + kl_w -
                   elbo_svgp(s, inst.X, inst.Y.col(0), inst.scale)) < 1e-6);
  }
}

TEST_CASE("gprn predictions") {
  GprnState g = std::get<GprnState>(random_instance(ModelKind::Gprn, 1).state);
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd Xs = fixture::random_matrix(rng, 6, 2);
  GprnState zero = g;
  for (auto& w : zero.w) w.block.m.setZero();
  CHECK(predict_gprn(zero, Xs).mean.cwiseAbs().maxCoeff() < 1e-15);

  // single latent, deterministic weight at the data: var = mu_w^2 sigma_f^2 + s2
  const SvgpState s = svgp_of(2);
  GprnState one = fixture::gprn_unit_weight(s, Xs);
  one.w[0].block.m.setConstant(1.7);
  one.f[0].block = InducingBlock::prior(one.f[0].hyper, one.f[0].block.Z);
  const NetworkPrediction p = predict_gprn(one, Xs);
  const double want = 1.7 * 1.7 * one.f[0].hyper.signal_var() + one.noise_var();
  CHECK((p.var.array() - want).abs().maxCoeff() < 1e-6);

  // predictive mean against sampling the factorized marginals
  const auto mf0 = fixture::marginals(g.f[0], Xs), mf1 = fixture::marginals(g.f[1], Xs);
  const NetworkPrediction pg = predict_gprn(g, Xs);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int p2 = 0; p2 < g.P; ++p2) {
    const auto mw0 = fixture::marginals(g.weight(0, p2), Xs);
    const auto mw1 = fixture::marginals(g.weight(1, p2), Xs);
    for (Eigen::Index i = 0; i < Xs.rows(); ++i) {
      oracle::MeanSe acc;
      for (int k = 0; k < 100000; ++k) {
        auto d = [&](const oracle::DenseMarginals& m) { return m.mu(i) + std::sqrt(m.var(i)) * N(rng); };
        acc.add(d(mw0) * d(mf0) + d(mw1) * d(mf1));
      }
      CHECK(std::abs(pg.mean(i, p2) - acc.mean) <= 4.0 * acc.se());
    }
  }
}

TEST_CASE("gprn sign symmetry") {
  for (unsigned long long seed = 0; seed < 3; ++seed) {
    const GradCheckInstance inst = random_instance(ModelKind::Gprn, seed);
    GprnState g = std::get<GprnState>(inst.state);
    const double a = elbo(g, inst.X, inst.Y, inst.scale);
    g.f[1].block.m = -g.f[1].block.m;
    for (int p = 0; p < g.P; ++p) g.w[static_cast<std::size_t>(1 * g.P + p)].block.m *= -1.0;
    CHECK(std::abs(elbo(g, inst.X, inst.Y, inst.scale) - a) < 1e-10);
  }
}

TEST_CASE("network ELBOs are invariant to permuting latents") {
  auto swap_q = [](auto s) {
    std::swap(s.f[0], s.f[1]);
    for (int p = 0; p < s.P; ++p) std::swap(s.w[static_cast<std::size_t>(p)], s.w[static_cast<std::size_t>(s.P + p)]);
    if constexpr (requires { s.g; }) {
      for (int p = 0; p < s.P; ++p) std::swap(s.g[static_cast<std::size_t>(p)], s.g[static_cast<std::size_t>(s.P + p)]);
    }
    return s;
  };
  for (ModelKind k : {ModelKind::Gprn, ModelKind::Sgprn}) {
    const GradCheckInstance inst = random_instance(k, 7);
    const double a = elbo(inst.state, inst.X, inst.Y, inst.scale);
    const ModelState swapped = std::visit([&](const auto& s) -> ModelState {
      if constexpr (requires { s.w; }) return swap_q(s);
      else return s;
    }, inst.state);
    CHECK(elbo(swapped, inst.X, inst.Y, inst.scale) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("sgprn pinned on reduces to gprn") {
  for (unsigned long long seed = 0; seed < 3; ++seed) {
    const GradCheckInstance inst = random_instance(ModelKind::Gprn, seed);
    std::mt19937_64 rng(seed);
    const GprnState g = fixture::gprn_weights_at(std::get<GprnState>(inst.state), inst.X, rng);
    const SgprnState s = fixture::sgprn_pinned(g, inst.X, 8.0);
    double kl_g = 0.0;
    for (const auto& p : s.g) kl_g += fixture::process_kl(p, inst.X);
    CHECK(std::abs(elbo_sgprn(s, inst.X, inst.Y, inst.scale) + kl_g -
                   elbo_gprn(g, inst.X, inst.Y, inst.scale)) < 1e-6);
    const NetworkPrediction a = predict_sgprn(s, inst.X), b = predict_gprn(g, inst.X);
    CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() < 1e-5);
    CHECK((a.var - b.var).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("sgprn pinned off masks the network") {
  const GradCheckInstance inst = random_instance(ModelKind::Gprn, 1);
  std::mt19937_64 rng(1);
  const GprnState g = fixture::gprn_weights_at(std::get<GprnState>(inst.state), inst.X, rng);
  const SgprnState s = fixture::sgprn_pinned(g, inst.X, -8.0);
  CHECK(std::abs(sgprn_elbo_terms(s, inst.X, inst.Y).data - lognorm_sum(inst.Y, s.noise_var())) < 1e-4);
  const NetworkPrediction p = predict_sgprn(s, inst.X);
  CHECK(p.mean.cwiseAbs().maxCoeff() < 1e-10);
  CHECK((p.var.array() - s.noise_var()).abs().maxCoeff() < 1e-10);
}

TEST_CASE("support_map of an untrained state is one half") {
  SgprnState s = std::get<SgprnState>(random_instance(ModelKind::Sgprn, 0).state);
  for (auto& g : s.g) g.block.m.setZero();
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd M = support_map(s, fixture::random_matrix(rng, 11, 2));
  CHECK(M.cols() == 4);
  CHECK((M.array() - 0.5).abs().maxCoeff() < 1e-15);
}

TEST_CASE("sgprn ties g locations to w") {
  SgprnState s = std::get<SgprnState>(random_instance(ModelKind::Sgprn, 3).state);
  for (std::size_t k = 0; k < s.g.size(); ++k) CHECK(s.g[k].block.Z == s.w[k].block.Z);
  s.w[2].block.Z.array() += 1.0;
  s.tie_locations();
  CHECK(s.g[2].block.Z == s.w[2].block.Z);
}

}  // TEST_SUITE
