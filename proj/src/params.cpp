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

#include "zigp/params.hpp"

#include <cmath>
#include <string>

#include "zigp/error.hpp"

namespace zigp {

namespace {

struct Ref {
  double* ptr;
  bool log_scale;
};

struct Field {
  std::string name;
  std::vector<Ref> refs;
};

void add_matrix(std::vector<Field>& out, std::string name, Eigen::MatrixXd& M) {
  Field f{std::move(name), {}};
  for (Eigen::Index k = 0; k < M.size(); ++k) f.refs.push_back({M.data() + k, false});
  out.push_back(std::move(f));
}

void add_vector(std::vector<Field>& out, std::string name, Eigen::VectorXd& v) {
  Field f{std::move(name), {}};
  for (Eigen::Index k = 0; k < v.size(); ++k) f.refs.push_back({v.data() + k, false});
  out.push_back(std::move(f));
}

void add_process(std::vector<Field>& out, const std::string& prefix, Process& p,
                 bool with_locations) {
  out.push_back({prefix + ".log_signal_var", {{&p.hyper.log_signal_var, false}}});
  add_vector(out, prefix + ".log_lengthscales", p.hyper.log_lengthscales);
  if (with_locations) {
    if (p.block.grid) {
      add_matrix(out, prefix + ".Z.space", p.block.grid->space);
      add_vector(out, prefix + ".Z.time", p.block.grid->time);
    } else {
      add_matrix(out, prefix + ".Z", p.block.Z);
    }
  }
  add_vector(out, prefix + ".m", p.block.m);
  Field L{prefix + ".L", {}};
  for (Eigen::Index c = 0; c < p.block.L.cols(); ++c) {
    for (Eigen::Index r = c; r < p.block.L.rows(); ++r) {
      L.refs.push_back({&p.block.L(r, c), r == c});
    }
  }
  out.push_back(std::move(L));
}

std::vector<Field> fields(ModelState& s) {
  std::vector<Field> out;
  if (auto* m = std::get_if<SvgpState>(&s)) {
    add_process(out, "f", m->f, true);
    out.push_back({"log_noise_var", {{&m->log_noise_var, false}}});
  } else if (auto* m = std::get_if<ZigpState>(&s)) {
    add_process(out, "f", m->f, true);
    add_process(out, "g", m->g, true);
    out.push_back({"log_noise_var", {{&m->log_noise_var, false}}});
    out.push_back({"beta", {{&m->beta, false}}});
  } else {
    const bool gated = std::holds_alternative<SgprnState>(s);
    int Q = 0, P = 0;
    std::vector<Process>* f = nullptr;
    std::vector<Process>* w = nullptr;
    std::vector<Process>* g = nullptr;
    double* noise = nullptr;
    if (auto* m = std::get_if<GprnState>(&s)) {
      Q = m->Q, P = m->P, f = &m->f, w = &m->w, noise = &m->log_noise_var;
    } else {
      auto& sm = std::get<SgprnState>(s);
      Q = sm.Q, P = sm.P, f = &sm.f, w = &sm.w, g = &sm.g, noise = &sm.log_noise_var;
    }
    if (f->size() != static_cast<std::size_t>(Q) ||
        w->size() != static_cast<std::size_t>(Q * P) ||
        (gated && g->size() != static_cast<std::size_t>(Q * P))) {
      throw DimensionError("training", "process count does not match Q and P");
    }
    for (int q = 0; q < Q; ++q) {
      add_process(out, "f." + std::to_string(q), (*f)[static_cast<std::size_t>(q)], true);
    }
    for (int q = 0; q < Q; ++q) {
      for (int p = 0; p < P; ++p) {
        add_process(out, "w." + std::to_string(q) + "." + std::to_string(p),
                    (*w)[static_cast<std::size_t>(q * P + p)], true);
      }
    }
    if (gated) {
      for (int q = 0; q < Q; ++q) {
        for (int p = 0; p < P; ++p) {
          add_process(out, "g." + std::to_string(q) + "." + std::to_string(p),
                      (*g)[static_cast<std::size_t>(q * P + p)], false);
        }
      }
    }
    out.push_back({"log_noise_var", {{noise, false}}});
  }
  return out;
}

ParamVector pack(const ModelState& s, bool apply_log) {
  ModelState copy = s;
  const auto fs = fields(copy);
  ParamVector pv;
  Eigen::Index total = 0;
  for (const auto& f : fs) total += static_cast<Eigen::Index>(f.refs.size());
  pv.values.resize(total);
  Eigen::Index off = 0;
  for (const auto& f : fs) {
    pv.layout.push_back({f.name, off, static_cast<Eigen::Index>(f.refs.size())});
    for (const auto& r : f.refs) {
      pv.values(off++) = apply_log && r.log_scale ? std::log(*r.ptr) : *r.ptr;
    }
  }
  return pv;
}

}  // namespace

const Slice& ParamVector::slice(const std::string& name) const {
  for (const auto& s : layout) {
    if (s.name == name) return s;
  }
  throw DimensionError("training", "no parameter slice named '" + name + "'");
}

ParamVector flatten(const ModelState& state) { return pack(state, true); }

ParamVector flatten_gradient(const ModelState& grad) { return pack(grad, false); }

ModelState unflatten(const ParamVector& params, const ModelState& like) {
  ModelState out = like;
  const auto fs = fields(out);
  Eigen::Index total = 0;
  for (const auto& f : fs) total += static_cast<Eigen::Index>(f.refs.size());
  if (total != params.size()) {
    throw DimensionError("training", "parameter vector has " +
                                         std::to_string(params.size()) +
                                         " entries, model layout needs " +
                                         std::to_string(total));
  }
  Eigen::Index off = 0;
  for (const auto& f : fs) {
    for (const auto& r : f.refs) {
      const double v = params.values(off++);
      *r.ptr = r.log_scale ? std::exp(v) : v;
    }
  }
  for (Process* p : processes(out)) p->block.sync_grid();
  if (auto* m = std::get_if<SgprnState>(&out)) m->tie_locations();
  return out;
}

}  // namespace zigp
