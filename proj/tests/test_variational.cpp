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
#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "zigp/error.hpp"
#include "zigp/kernels.hpp"
#include "zigp/probit_moments.hpp"
#include "zigp/variational.hpp"

using namespace zigp;

namespace {

struct Instance {
  KernelHyper hyper;
  InducingBlock block;
  Eigen::MatrixXd X;
};

Instance random_case(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m, Eigen::Index D) {
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  Instance c;
  Eigen::VectorXd ls(D);
  for (Eigen::Index d = 0; d < D; ++d) ls(d) = 0.2 + U(rng);
  c.hyper = KernelHyper(U(rng), ls);
  c.X = fixture::random_matrix(rng, n, D);
  c.block.Z = fixture::random_matrix(rng, m, D);
  c.block.m = fixture::random_matrix(rng, m, 1);
  c.block.L = fixture::random_spd(rng, m, 0.3).llt().matrixL();
  c.block.L *= 0.4;
  return c;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_SUITE("variational") {

TEST_CASE("projection at the inducing points") {
  std::mt19937_64 rng(1);
  Instance c = random_case(rng, 4, 4, 2);
  c.X = c.block.Z;
  const Projection p = projection(c.hyper, c.X, c.block);
  CHECK((p.Q - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(p.ktilde_diag.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("projection scalar case") {
  const KernelHyper h(std::log(1.3), Eigen::VectorXd::Constant(1, std::log(0.8)));
  InducingBlock b;
  b.Z = Eigen::MatrixXd::Constant(1, 1, 0.2);
  b.m = Eigen::VectorXd::Zero(1);
  b.L = Eigen::MatrixXd::Identity(1, 1);
  const Eigen::MatrixXd X = Eigen::MatrixXd::Constant(1, 1, -0.5);
  const double knm = 1.3 * std::exp(-0.5 * 0.49 / 0.64);
  const Projection p = projection(h, X, b);
  CHECK(p.Q(0, 0) == doctest::Approx(knm / 1.3).epsilon(1e-14));
  CHECK(p.ktilde_diag(0) == doctest::Approx(1.3 - knm * knm / 1.3).epsilon(1e-13));
}

TEST_CASE("projection matches the dense inverse oracle") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const Instance c = random_case(rng, 7, 3, 2);
    const Projection p = projection(c.hyper, c.X, c.block);
    const Eigen::MatrixXd Kmm = oracle::ard(c.hyper.log_signal_var, c.hyper.log_lengthscales,
                                            c.block.Z, c.block.Z);
    const Eigen::MatrixXd Knm =
        oracle::ard(c.hyper.log_signal_var, c.hyper.log_lengthscales, c.X, c.block.Z);
    const Eigen::MatrixXd Q = Knm * Kmm.fullPivLu().inverse();
    const Eigen::VectorXd kt = c.hyper.signal_var() * Eigen::VectorXd::Ones(7) -
                               (Q * Knm.transpose()).diagonal();
    CHECK((p.Q - Q).cwiseAbs().maxCoeff() <= 1e-8 * Q.cwiseAbs().maxCoeff());
    CHECK((p.ktilde_diag - kt).cwiseAbs().maxCoeff() <= 1e-8 * c.hyper.signal_var());
  }
}

TEST_CASE("prior variational state gives prior marginals") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Instance c = random_case(rng, 9, 1 + k % 5, 1 + k % 3);
    const InducingBlock prior = InducingBlock::prior(c.hyper, c.block.Z);
    CHECK(prior.m.isZero());
    const MarginalMoments mm = marginal_moments(projection(c.hyper, c.X, prior), prior);
    CHECK(mm.mu.cwiseAbs().maxCoeff() == 0.0);
    CHECK((mm.var.array() - c.hyper.signal_var()).abs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("delta posterior at the inducing points") {
  std::mt19937_64 rng(4);
  Instance c = random_case(rng, 5, 5, 2);
  c.X = c.block.Z;
  c.block.L = 1e-9 * Eigen::MatrixXd::Identity(5, 5);
  const MarginalMoments mm = marginal_moments(projection(c.hyper, c.X, c.block), c.block);
  CHECK((mm.mu - c.block.m).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(mm.var.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("marginals match the full covariance oracle") {
  std::mt19937_64 rng(5);
  int tested = 0;
  for (int k = 0; k < 30; ++k) {
    const Instance c = random_case(rng, 6 + k % 7, 2 + k % 4, 1 + k % 3);
    // near-singular K_mm: the two solvers legitimately disagree
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                   kernel_matrix(c.hyper, c.block.Z, c.block.Z))
                                   .eigenvalues();
    if (ev.maxCoeff() > 1e6 * ev.minCoeff()) continue;
    ++tested;
    const MarginalMoments mm = marginal_moments(projection(c.hyper, c.X, c.block), c.block);
    const auto ref = oracle::dense_marginals(c.hyper.log_signal_var, c.hyper.log_lengthscales,
                                             c.X, c.block.Z, c.block.m, c.block.L);
    CHECK((mm.mu - ref.mu).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, ref.mu.cwiseAbs().maxCoeff()));
    CHECK((mm.var - ref.var).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, ref.var.maxCoeff()));
    CHECK(mm.var.minCoeff() >= 0.0);
  }
  CHECK(tested >= 20);
}

TEST_CASE("variance depends on L only through S") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 20; ++k) {
    Instance c = random_case(rng, 8, 4, 2);
    const Projection p = projection(c.hyper, c.X, c.block);
    const MarginalMoments a = marginal_moments(p, c.block);
    const Eigen::MatrixXd R =
        Eigen::HouseholderQR<Eigen::MatrixXd>(fixture::random_matrix(rng, 4, 4)).householderQ();
    const Eigen::MatrixXd LR = c.block.L * R;
    c.block.L = Eigen::MatrixXd((LR * LR.transpose()).llt().matrixL());
    const MarginalMoments b = marginal_moments(p, c.block);
    CHECK((a.var - b.var).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("mean is linear in m") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    Instance c = random_case(rng, 8, 4, 2);
    const Projection p = projection(c.hyper, c.X, c.block);
    const Eigen::VectorXd a = fixture::random_matrix(rng, 4, 1), b = fixture::random_matrix(rng, 4, 1);
    c.block.m = a;
    const Eigen::VectorXd ma = marginal_moments(p, c.block).mu;
    c.block.m = b;
    const Eigen::VectorXd mb = marginal_moments(p, c.block).mu;
    c.block.m = a + b;
    const Eigen::VectorXd mab = marginal_moments(p, c.block).mu;
    CHECK((mab - ma - mb).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("large negative variance is a numerical error") {
  Projection p;
  p.Q = Eigen::MatrixXd::Zero(2, 1);
  p.ktilde_diag = Eigen::VectorXd::Constant(2, -1.0);
  InducingBlock b;
  b.Z = Eigen::MatrixXd::Zero(1, 1);
  b.m = Eigen::VectorXd::Zero(1);
  b.L = Eigen::MatrixXd::Identity(1, 1);
  CHECK_THROWS_AS(marginal_moments(p, b), NumericalError);
  p.ktilde_diag(0) = p.ktilde_diag(1) = -1e-13;
  CHECK(marginal_moments(p, b).var.isZero());
}

TEST_CASE("block_kl equals the standalone KL") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 20; ++k) {
    const Instance c = random_case(rng, 5, 1 + k % 6, 2);
    const BlockEval e = evaluate_block(c.hyper, c.X, c.block);
    const double ref = oracle::gaussian_kl(c.block.m, c.block.S(), e.Kmm);
    CHECK(rel(block_kl(e, c.block), ref) < 1e-8);
    CHECK(rel(gaussian_kl({c.block.m, c.block.L, e.Kmm}), ref) < 1e-8);
  }
}

TEST_CASE("accumulate_block_grad against central differences") {
  std::mt19937_64 rng(9);
  const double eps = 1e-6;
  for (int k = 0; k < 5; ++k) {
    const Instance c = random_case(rng, 6, 3, 2);
    const Eigen::VectorXd dmu = fixture::random_matrix(rng, 6, 1);
    const Eigen::VectorXd dvar = fixture::random_matrix(rng, 6, 1);
    const double w = 0.7;
    auto value = [&](const KernelHyper& h, const InducingBlock& b) {
      const BlockEval e = evaluate_block(h, c.X, b);
      return dmu.dot(e.moments.mu) + dvar.dot(e.moments.var) + w * block_kl(e, b);
    };
    BlockGrad g = BlockGrad::zeros(3, 2);
    accumulate_block_grad(evaluate_block(c.hyper, c.X, c.block), c.hyper, c.X, c.block, dmu,
                          dvar, w, g);
    auto fd = [&](auto&& poke) {
      KernelHyper hp = c.hyper, hm = c.hyper;
      InducingBlock bp = c.block, bm = c.block;
      poke(hp, bp, eps);
      poke(hm, bm, -eps);
      return (value(hp, bp) - value(hm, bm)) / (2 * eps);
    };
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); };
    CHECK(close(g.log_signal_var, fd([](KernelHyper& h, InducingBlock&, double e) { h.log_signal_var += e; })));
    for (int d = 0; d < 2; ++d) {
      CHECK(close(g.log_lengthscales(d),
                  fd([d](KernelHyper& h, InducingBlock&, double e) { h.log_lengthscales(d) += e; })));
    }
    for (int i = 0; i < 3; ++i) {
      CHECK(close(g.m(i), fd([i](KernelHyper&, InducingBlock& b, double e) { b.m(i) += e; })));
      for (int d = 0; d < 2; ++d) {
        CHECK(close(g.Z(i, d), fd([i, d](KernelHyper&, InducingBlock& b, double e) { b.Z(i, d) += e; })));
      }
      for (int j = 0; j <= i; ++j) {
        const double num = fd([i, j](KernelHyper&, InducingBlock& b, double e) {
          if (i == j) b.L(i, i) *= std::exp(e);
          else b.L(i, j) += e;
        });
        CHECK(close(g.L(i, j), num));
      }
    }
  }
}

TEST_CASE("inducing grid expand and fold") {
  InducingGrid grid;
  grid.space_dims = {1};
  grid.time_dim = 0;
  grid.space.resize(2, 1);
  grid.space << 10.0, 20.0;
  grid.time.resize(3);
  grid.time << 1.0, 2.0, 3.0;
  const Eigen::MatrixXd Z = grid.expand();
  CHECK(Z.rows() == 6);
  CHECK(Z(4, 1) == 20.0);  // row a * m_t + b with a = 1, b = 1
  CHECK(Z(4, 0) == 2.0);
  Eigen::MatrixXd dZ(6, 2);
  for (int r = 0; r < 6; ++r) dZ.row(r) << r, 100 + r;
  Eigen::MatrixXd ds;
  Eigen::VectorXd dt;
  grid.fold_gradient(dZ, ds, dt);
  CHECK(ds(0, 0) == 100 + 101 + 102);
  CHECK(ds(1, 0) == 103 + 104 + 105);
  CHECK(dt(0) == 0 + 3);
  CHECK(dt(2) == 2 + 5);
}

TEST_CASE("k-means and subsampling") {
  std::mt19937_64 rng(10);
  const Eigen::MatrixXd X = fixture::random_matrix(rng, 50, 2);
  const Eigen::MatrixXd C = kmeans_centres(X, 8, 3);
  CHECK(C.rows() == 8);
  CHECK(C == kmeans_centres(X, 8, 3));
  CHECK(C.allFinite());

  Eigen::MatrixXd dup(6, 1);
  dup << 1, 1, 2, 2, 3, 3;
  CHECK(kmeans_centres(dup, 5, 0).rows() == 3);

  const Eigen::MatrixXd S = subsample_rows(X, 10, 4);
  CHECK(S.rows() == 10);
  std::set<std::pair<double, double>> rows;
  for (Eigen::Index i = 0; i < 50; ++i) rows.insert({X(i, 0), X(i, 1)});
  std::set<std::pair<double, double>> picked;
  for (Eigen::Index i = 0; i < 10; ++i) {
    CHECK(rows.count({S(i, 0), S(i, 1)}) == 1);
    picked.insert({S(i, 0), S(i, 1)});
  }
  CHECK(picked.size() == 10);
  CHECK(subsample_rows(X, 80, 4).rows() == 50);
}

}  // TEST_SUITE
