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

#include "network.hpp"

#include <string>

#include "zigp/error.hpp"
#include "zigp/probit_moments.hpp"
#include "zigp/simd.hpp"

namespace zigp::detail {

namespace {

std::size_t idx(const NetworkView& v, int q, int p) {
  return static_cast<std::size_t>(q * v.P + p);
}

}  // namespace

void check_network(const NetworkView& v) {
  if (v.Q < 1 || v.P < 1) {
    throw DimensionError(v.module, "Q and P must be at least 1");
  }
  const auto qp = static_cast<std::size_t>(v.Q * v.P);
  if (v.f->size() != static_cast<std::size_t>(v.Q) || v.w->size() != qp ||
      (v.g != nullptr && v.g->size() != qp)) {
    throw DimensionError(v.module, "process count does not match Q=" +
                                       std::to_string(v.Q) +
                                       ", P=" + std::to_string(v.P));
  }
  const auto dims = (*v.f)[0].hyper.dims();
  auto same = [&](const std::vector<Process>& ps) {
    for (const auto& p : ps) {
      if (p.hyper.dims() != dims) {
        throw DimensionError(v.module, "processes differ in input dimension");
      }
    }
  };
  same(*v.f);
  same(*v.w);
  if (v.g != nullptr) same(*v.g);
}

NetworkForward network_forward(const NetworkView& v, const Eigen::MatrixXd& X,
                               const Eigen::MatrixXd* Y) {
  check_network(v);
  const auto dims = (*v.f)[0].hyper.dims();
  if (Y != nullptr) {
    check_batch(v.module, X, Y->rows(), dims);
    if (Y->cols() != v.P) {
      throw DimensionError(v.module, "outputs have " + std::to_string(Y->cols()) +
                                         " columns, model has P=" +
                                         std::to_string(v.P));
    }
  } else {
    check_batch(v.module, X, X.rows(), dims);
  }

  std::vector<const Process*> all;
  for (const auto& p : *v.f) all.push_back(&p);
  for (const auto& p : *v.w) all.push_back(&p);
  if (v.g != nullptr) {
    for (const auto& p : *v.g) all.push_back(&p);
  }
  auto evals = evaluate_processes(all, X);
  NetworkForward fw;
  const auto Q = static_cast<std::size_t>(v.Q);
  const auto QP = static_cast<std::size_t>(v.Q * v.P);
  fw.f.assign(std::make_move_iterator(evals.begin()),
              std::make_move_iterator(evals.begin() + static_cast<long>(Q)));
  fw.w.assign(std::make_move_iterator(evals.begin() + static_cast<long>(Q)),
              std::make_move_iterator(evals.begin() + static_cast<long>(Q + QP)));
  if (v.g != nullptr) {
    fw.g.assign(std::make_move_iterator(evals.begin() + static_cast<long>(Q + QP)),
                std::make_move_iterator(evals.end()));
  }

  const auto n = X.rows();
  if (v.g != nullptr) {
    for (std::size_t k = 0; k < QP; ++k) {
      Eigen::VectorXd ga(n), gv(n), amu(n), avar(n), bmu(n), bvar(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const ProbitMoments pm =
            probit_moments({fw.g[k].moments.mu(i), fw.g[k].moments.var(i)});
        ga(i) = pm.mean;
        gv(i) = pm.square_mean - pm.mean * pm.mean;
        amu(i) = pm.dmean_dmu;
        avar(i) = pm.dmean_dvar;
        bmu(i) = pm.dsquare_dmu;
        bvar(i) = pm.dsquare_dvar;
      }
      fw.ga.push_back(std::move(ga));
      fw.gv.push_back(std::move(gv));
      fw.da_mu.push_back(std::move(amu));
      fw.da_var.push_back(std::move(avar));
      fw.db_mu.push_back(std::move(bmu));
      fw.db_var.push_back(std::move(bvar));
    }
  }

  fw.mean = Eigen::MatrixXd::Zero(n, v.P);
  fw.extra = Eigen::MatrixXd::Zero(n, v.P);
  const auto un = static_cast<std::size_t>(n);
  for (int p = 0; p < v.P; ++p) {
    for (int q = 0; q < v.Q; ++q) {
      const auto k = idx(v, q, p);
      const auto& mf = fw.f[static_cast<std::size_t>(q)].moments;
      const auto& mw = fw.w[k].moments;
      simd::gated_product_moments(un, mw.mu.data(), mw.var.data(),
                                  v.g ? fw.ga[k].data() : nullptr,
                                  v.g ? fw.gv[k].data() : nullptr, mf.mu.data(),
                                  mf.var.data(), fw.mean.col(p).data(),
                                  fw.extra.col(p).data());
    }
  }

  if (Y != nullptr) {
    const double s2 = v.noise_var;
    const double c = gaussian_log_norm(s2);
    fw.terms.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double t = 0.0;
      for (int p = 0; p < v.P; ++p) {
        const double r = (*Y)(i, p) - fw.mean(i, p);
        t += c - (r * r + fw.extra(i, p)) / (2.0 * s2);
      }
      fw.terms(i) = t;
    }
  }
  return fw;
}

double network_kl(const NetworkView& v, const NetworkForward& fw) {
  double kl = 0.0;
  for (std::size_t k = 0; k < fw.f.size(); ++k) kl += block_kl(fw.f[k], (*v.f)[k].block);
  for (std::size_t k = 0; k < fw.w.size(); ++k) kl += block_kl(fw.w[k], (*v.w)[k].block);
  for (std::size_t k = 0; k < fw.g.size(); ++k) kl += block_kl(fw.g[k], (*v.g)[k].block);
  return kl;
}

double network_grad(const NetworkView& v, const Eigen::MatrixXd& X,
                    const Eigen::MatrixXd& Y, double scale, std::vector<Process>& gf,
                    std::vector<Process>& gw, std::vector<Process>* gg,
                    double& gnoise) {
  const NetworkForward fw = network_forward(v, X, &Y);
  const auto n = X.rows();
  const double s2 = v.noise_var;
  const bool gated = v.g != nullptr;
  const auto Q = static_cast<std::size_t>(v.Q);
  const auto QP = static_cast<std::size_t>(v.Q * v.P);

  std::vector<Eigen::VectorXd> dmu_f(Q, Eigen::VectorXd::Zero(n)),
      dvar_f(Q, Eigen::VectorXd::Zero(n)), dmu_w(QP, Eigen::VectorXd::Zero(n)),
      dvar_w(QP, Eigen::VectorXd::Zero(n)), dmu_g(QP, Eigen::VectorXd::Zero(n)),
      dvar_g(QP, Eigen::VectorXd::Zero(n));
  Eigen::VectorXd dnoise(n);

  for (Eigen::Index i = 0; i < n; ++i) {
    double dn = 0.0;
    for (int p = 0; p < v.P; ++p) {
      const double r = Y(i, p) - fw.mean(i, p);
      dn += -0.5 + (r * r + fw.extra(i, p)) / (2.0 * s2);
      for (int q = 0; q < v.Q; ++q) {
        const auto k = idx(v, q, p);
        const auto uq = static_cast<std::size_t>(q);
        const double mf = fw.f[uq].moments.mu(i);
        const double vf = fw.f[uq].moments.var(i);
        const double mw = fw.w[k].moments.mu(i);
        const double vw = fw.w[k].moments.var(i);
        const double a = gated ? fw.ga[k](i) : 1.0;
        const double b = gated ? fw.gv[k](i) + a * a : 1.0;
        const double Mw = mw * mw + vw;
        const double Mf = mf * mf + vf;
        dmu_w[k](i) = scale * (r * a * mf - (b * mw * Mf - a * a * mw * mf * mf)) / s2;
        dvar_w[k](i) = -scale * b * Mf / (2.0 * s2);
        dmu_f[uq](i) += scale * (r * a * mw - (b * Mw * mf - a * a * mw * mw * mf)) / s2;
        dvar_f[uq](i) += -scale * b * Mw / (2.0 * s2);
        if (gated) {
          const double da = (r * mw * mf + a * mw * mw * mf * mf) / s2;
          const double db = -Mw * Mf / (2.0 * s2);
          dmu_g[k](i) = scale * (da * fw.da_mu[k](i) + db * fw.db_mu[k](i));
          dvar_g[k](i) = scale * (da * fw.da_var[k](i) + db * fw.db_var[k](i));
        }
      }
    }
    dnoise(i) = dn;
  }

  auto adjoint = [&](const std::vector<Process>& ps, const std::vector<BlockEval>& ev,
                     const std::vector<Eigen::VectorXd>& dmu,
                     const std::vector<Eigen::VectorXd>& dvar,
                     std::vector<Process>& out) {
    out.clear();
    for (std::size_t k = 0; k < ps.size(); ++k) {
      out.push_back(zeros_like(ps[k]));
      BlockGrad bg = BlockGrad::zeros(ps[k].block.size(), ps[k].hyper.dims());
      accumulate_block_grad(ev[k], ps[k].hyper, X, ps[k].block, dmu[k], dvar[k],
                            -1.0, bg);
      add_block_grad(bg, out.back());
    }
  };
  adjoint(*v.f, fw.f, dmu_f, dvar_f, gf);
  adjoint(*v.w, fw.w, dmu_w, dvar_w, gw);
  if (gated) {
    adjoint(*v.g, fw.g, dmu_g, dvar_g, *gg);
    for (std::size_t k = 0; k < QP; ++k) {
      gw[k].block.Z += (*gg)[k].block.Z;
      (*gg)[k].block.Z.setZero();
    }
  }
  for (auto& p : gf) fold_grid_grad(p);
  for (auto& p : gw) fold_grid_grad(p);
  if (gated) {
    for (auto& p : *gg) {
      if (p.block.grid) {
        p.block.grid->space.setZero();
        p.block.grid->time.setZero();
      }
    }
  }
  gnoise = scale * ordered_sum(dnoise);
  return scale * ordered_sum(fw.terms) - network_kl(v, fw);
}

NetworkForward network_predict(const NetworkView& v, const Eigen::MatrixXd& Xstar) {
  return network_forward(v, Xstar, nullptr);
}

}  // namespace zigp::detail
