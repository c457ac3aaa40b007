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

#include "zigp/model.hpp"

#include <string>

#include "zigp/error.hpp"

namespace zigp {

namespace {

Eigen::VectorXd single_output(const Eigen::MatrixXd& Y) {
  if (Y.cols() != 1) {
    throw DimensionError("training", "single-output model given " +
                                         std::to_string(Y.cols()) + " outputs");
  }
  return Y.col(0);
}

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

}  // namespace

std::string_view kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Svgp: return "svgp";
    case ModelKind::Zigp: return "zigp";
    case ModelKind::Gprn: return "gprn";
    case ModelKind::Sgprn: return "sgprn";
  }
  return "unknown";
}

ModelKind parse_kind(std::string_view s) {
  for (auto k : {ModelKind::Svgp, ModelKind::Zigp, ModelKind::Gprn, ModelKind::Sgprn}) {
    if (kind_name(k) == s) return k;
  }
  throw UsageError("cli", "unknown model kind '" + std::string(s) + "'");
}

ModelKind kind_of(const ModelState& s) { return static_cast<ModelKind>(s.index()); }

Eigen::Index input_dims(const ModelState& s) {
  return std::visit(
      Overload{[](const SvgpState& m) { return m.f.hyper.dims(); },
               [](const ZigpState& m) { return m.f.hyper.dims(); },
               [](const GprnState& m) { return m.f.at(0).hyper.dims(); },
               [](const SgprnState& m) { return m.f.at(0).hyper.dims(); }},
      s);
}

Eigen::Index output_dims(const ModelState& s) {
  return std::visit(Overload{[](const SvgpState&) { return Eigen::Index{1}; },
                             [](const ZigpState&) { return Eigen::Index{1}; },
                             [](const GprnState& m) { return Eigen::Index{m.P}; },
                             [](const SgprnState& m) { return Eigen::Index{m.P}; }},
                    s);
}

ElboTerms elbo_terms(const ModelState& s, const Eigen::MatrixXd& X,
                     const Eigen::MatrixXd& Y) {
  return std::visit(
      Overload{
          [&](const SvgpState& m) { return svgp_elbo_terms(m, X, single_output(Y)); },
          [&](const ZigpState& m) { return zigp_elbo_terms(m, X, single_output(Y)); },
          [&](const GprnState& m) { return gprn_elbo_terms(m, X, Y); },
          [&](const SgprnState& m) { return sgprn_elbo_terms(m, X, Y); }},
      s);
}

double elbo(const ModelState& s, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
            double scale) {
  return elbo_terms(s, X, Y).total(scale);
}

double elbo_grad(const ModelState& s, const Eigen::MatrixXd& X,
                 const Eigen::MatrixXd& Y, double scale, ModelState& grad) {
  return std::visit(
      Overload{[&](const SvgpState& m) {
                 SvgpState g;
                 const double v = elbo_svgp_grad(m, X, single_output(Y), scale, g);
                 grad = std::move(g);
                 return v;
               },
               [&](const ZigpState& m) {
                 ZigpState g;
                 const double v = elbo_zigp_grad(m, X, single_output(Y), scale, g);
                 grad = std::move(g);
                 return v;
               },
               [&](const GprnState& m) {
                 GprnState g;
                 const double v = elbo_gprn_grad(m, X, Y, scale, g);
                 grad = std::move(g);
                 return v;
               },
               [&](const SgprnState& m) {
                 SgprnState g;
                 const double v = elbo_sgprn_grad(m, X, Y, scale, g);
                 grad = std::move(g);
                 return v;
               }},
      s);
}

Prediction predict(const ModelState& s, const Eigen::MatrixXd& Xstar) {
  return std::visit(
      Overload{[&](const SvgpState& m) {
                 const auto p = predict_svgp(m, Xstar);
                 return Prediction{p.mean, p.var, std::nullopt};
               },
               [&](const ZigpState& m) {
                 const auto p = predict_zigp(m, Xstar);
                 return Prediction{p.mean, p.var, p.support_prob};
               },
               [&](const GprnState& m) {
                 const auto p = predict_gprn(m, Xstar);
                 return Prediction{p.mean, p.var, std::nullopt};
               },
               [&](const SgprnState& m) {
                 const auto p = predict_sgprn(m, Xstar);
                 return Prediction{p.mean, p.var, std::nullopt};
               }},
      s);
}

std::vector<Process*> processes(ModelState& s) {
  std::vector<Process*> out;
  std::visit(Overload{[&](SvgpState& m) { out.push_back(&m.f); },
                      [&](ZigpState& m) {
                        out.push_back(&m.f);
                        out.push_back(&m.g);
                      },
                      [&](GprnState& m) {
                        for (auto& p : m.f) out.push_back(&p);
                        for (auto& p : m.w) out.push_back(&p);
                      },
                      [&](SgprnState& m) {
                        for (auto& p : m.f) out.push_back(&p);
                        for (auto& p : m.w) out.push_back(&p);
                        for (auto& p : m.g) out.push_back(&p);
                      }},
             s);
  return out;
}

std::vector<const Process*> processes(const ModelState& s) {
  auto ps = processes(const_cast<ModelState&>(s));
  return {ps.begin(), ps.end()};
}

}  // namespace zigp
