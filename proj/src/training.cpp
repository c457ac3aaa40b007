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

#include "zigp/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "zigp/error.hpp"
#include "zigp/probit_moments.hpp"

namespace zigp {

namespace {

constexpr const char* kModule = "training";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError(kModule, "config key '" + key + "': not a number: '" + v + "'");
  }
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError(kModule, "config key '" + key + "': not an integer: '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw UsageError(kModule, "config key '" + key + "': not a boolean: '" + v + "'");
}

bool ends_with(const std::string& s, const std::string& tail) {
  return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

double prior_term(const ParamVector& pv, const TrainConfig& c, ParamVector* grad) {
  if (!c.lengthscale_prior) return 0.0;
  double total = 0.0;
  for (const auto& s : pv.layout) {
    if (!ends_with(s.name, ".log_lengthscales")) continue;
    for (Eigen::Index k = s.offset; k < s.offset + s.size; ++k) {
      const double t = pv.values(k);
      const double l = std::exp(t);
      total += (c.prior.alpha - 1.0) * t - c.prior.beta * l;
      if (grad) grad->values(k) += (c.prior.alpha - 1.0) - c.prior.beta * l;
    }
  }
  return total;
}

double second_moment(const Eigen::MatrixXd& Y, bool nonzero_only) {
  double s = 0.0;
  long count = 0;
  for (Eigen::Index i = 0; i < Y.size(); ++i) {
    const double y = Y.data()[i];
    if (nonzero_only && y == 0.0) continue;
    s += y * y;
    ++count;
  }
  const double m = count > 0 ? s / static_cast<double>(count) : 1.0;
  return m > 1e-12 ? m : 1.0;
}

Eigen::VectorXd log_input_scales(const Eigen::MatrixXd& X) {
  Eigen::VectorXd out(X.cols());
  for (Eigen::Index d = 0; d < X.cols(); ++d) {
    const double mean = X.col(d).mean();
    const double var = (X.col(d).array() - mean).square().mean();
    const double sd = std::sqrt(var);
    out(d) = std::log(0.5 * (sd > 1e-12 ? sd : 1.0));
  }
  return out;
}

struct LocationPlan {
  Eigen::MatrixXd Z;
  std::optional<InducingGrid> grid;
};

LocationPlan plan_locations(const Dataset& data, const TrainConfig& c) {
  LocationPlan plan;
  if (data.kron) {
    const KronSpec& k = *data.kron;
    const Eigen::Index ns = k.space_grid.rows();
    const Eigen::Index nt = k.time_grid.size();
    const Eigen::Index ms =
        c.inducing_space > 0 ? std::min<Eigen::Index>(c.inducing_space, ns)
                             : std::min<Eigen::Index>(ns, 5);
    const Eigen::Index mt =
        c.inducing_time > 0
            ? std::min<Eigen::Index>(c.inducing_time, nt)
            : std::min<Eigen::Index>(nt, std::max<Eigen::Index>(1, c.inducing / ms));
    InducingGrid g;
    g.space_dims = k.space_dims;
    g.time_dim = k.time_dim;
    g.space = kmeans_centres(k.space_grid, ms, c.seed);
    Eigen::MatrixXd times = subsample_rows(Eigen::MatrixXd(k.time_grid), mt, c.seed + 1);
    std::vector<double> tv(times.data(), times.data() + times.size());
    std::sort(tv.begin(), tv.end());
    g.time = Eigen::Map<Eigen::VectorXd>(tv.data(), static_cast<Eigen::Index>(tv.size()));
    plan.Z = g.expand();
    plan.grid = g;
  } else {
    plan.Z = kmeans_centres(data.X, c.inducing, c.seed);
  }
  return plan;
}

// Shrinks the starting lengthscales until cond(K_mm) <= 1e4. Adam moves raw
// L entries by about lr on the first steps, which a badly conditioned K_mm
// turns into enormous KL and marginal-variance jumps.
Eigen::VectorXd conditioned_log_scales(Eigen::VectorXd log_ls, const Eigen::MatrixXd& Z) {
  for (int it = 0; it < 60; ++it) {
    const Eigen::MatrixXd K = kernel_matrix(KernelHyper(0.0, log_ls), Z, Z);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K).eigenvalues();
    if (ev(0) > 0.0 && ev(ev.size() - 1) <= 1e4 * ev(0)) break;
    log_ls.array() += std::log(0.8);
  }
  return log_ls;
}

Process make_process(const KernelHyper& h, const LocationPlan& plan) {
  Process p{h, InducingBlock::prior(h, plan.Z)};
  p.block.grid = plan.grid;
  return p;
}

void random_prior_mean(Process& p, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::VectorXd eps(p.block.size());
  for (Eigen::Index k = 0; k < eps.size(); ++k) eps(k) = N(rng);
  p.block.m = p.block.L.triangularView<Eigen::Lower>() * eps;
}

// Per inducing point: the fraction of nonzero outputs and the mean of the
// nonzero outputs among its k nearest training inputs.
struct LocalStats {
  Eigen::VectorXd nonzero_frac;
  Eigen::VectorXd nonzero_mean;
};

LocalStats local_stats(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Eigen::MatrixXd& Z) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = std::clamp<Eigen::Index>(n / std::max<Eigen::Index>(Z.rows(), 1),
                                                  std::min<Eigen::Index>(5, n), n);
  const Eigen::VectorXd w = (-2.0 * log_input_scales(X).array()).exp();
  LocalStats st{Eigen::VectorXd::Zero(Z.rows()), Eigen::VectorXd::Zero(Z.rows())};
  std::vector<std::pair<double, Eigen::Index>> d(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < Z.rows(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      d[static_cast<std::size_t>(i)] = {
          ((X.row(i) - Z.row(j)).array().square() * w.transpose().array()).sum(), i};
    }
    std::partial_sort(d.begin(), d.begin() + k, d.end());
    double on = 0.0, sum = 0.0;
    for (Eigen::Index r = 0; r < k; ++r) {
      const double v = y(d[static_cast<std::size_t>(r)].second);
      if (v != 0.0) {
        on += 1.0;
        sum += v;
      }
    }
    st.nonzero_frac(j) = on / static_cast<double>(k);
    st.nonzero_mean(j) = on > 0.0 ? sum / on : 0.0;
  }
  return st;
}

// K_mm (K_mm + lambda I)^-1 t: targets at Z smoothed so that K_nm K_mm^-1 m
// stays bounded when K_mm is badly conditioned.
Eigen::VectorXd smooth_at_inducing(const Process& p, const Eigen::VectorXd& t) {
  const Eigen::MatrixXd K = kernel_matrix(p.hyper, p.block.Z, p.block.Z);
  Eigen::MatrixXd A = K;
  A.diagonal().array() += 0.1 * p.hyper.signal_var();
  return K * A.llt().solve(t);
}

// Marginal q(g) at Z is N(m, sigma_g^2) while S = K_mm, so
// <Phi(g)> = p needs m = Phi^-1(p) sqrt(1 + sigma_g^2).
double probit_inverse(double p) {
  double lo = -10.0, hi = 10.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std_normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw UsageError(kModule, "learning_rate must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw UsageError(kModule, "adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw UsageError(kModule, "adam_eps must be > 0");
  if (steps < 0) throw UsageError(kModule, "steps must be >= 0");
  if (batch_size < 1) throw UsageError(kModule, "batch_size must be >= 1");
  if (inducing < 1) throw UsageError(kModule, "inducing must be >= 1");
  if (inducing_space < 0 || inducing_time < 0) {
    throw UsageError(kModule, "inducing grid sizes must be >= 0");
  }
  if (latent_q < 1) throw UsageError(kModule, "latent_q must be >= 1");
  if (lengthscale_prior && !(prior.alpha > 0.0 && prior.beta >= 0.0)) {
    throw UsageError(kModule, "prior_alpha must be > 0 and prior_beta >= 0");
  }
}

void TrainConfig::apply(const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "learning_rate") learning_rate = parse_real(key, value);
    else if (key == "adam_beta1") adam_beta1 = parse_real(key, value);
    else if (key == "adam_beta2") adam_beta2 = parse_real(key, value);
    else if (key == "adam_eps") adam_eps = parse_real(key, value);
    else if (key == "steps") steps = parse_int(key, value);
    else if (key == "batch_size") batch_size = parse_int(key, value);
    else if (key == "seed") seed = static_cast<unsigned long long>(parse_int(key, value));
    else if (key == "lengthscale_prior") lengthscale_prior = parse_bool(key, value);
    else if (key == "prior_alpha") prior.alpha = parse_real(key, value);
    else if (key == "prior_beta") prior.beta = parse_real(key, value);
    else if (key == "inducing") inducing = parse_int(key, value);
    else if (key == "inducing_space") inducing_space = parse_int(key, value);
    else if (key == "inducing_time") inducing_time = parse_int(key, value);
    else if (key == "latent_q") latent_q = static_cast<int>(parse_int(key, value));
    else throw UsageError(kModule, "unknown config key '" + key + "'");
  }
  validate();
}

std::string TrainConfig::to_text() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "learning_rate = " << learning_rate << "\n"
     << "adam_beta1 = " << adam_beta1 << "\n"
     << "adam_beta2 = " << adam_beta2 << "\n"
     << "adam_eps = " << adam_eps << "\n"
     << "steps = " << steps << "\n"
     << "batch_size = " << batch_size << "\n"
     << "seed = " << seed << "\n"
     << "lengthscale_prior = " << (lengthscale_prior ? "true" : "false") << "\n"
     << "prior_alpha = " << prior.alpha << "\n"
     << "prior_beta = " << prior.beta << "\n"
     << "inducing = " << inducing << "\n"
     << "inducing_space = " << inducing_space << "\n"
     << "inducing_time = " << inducing_time << "\n"
     << "latent_q = " << latent_q << "\n";
  return os.str();
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(kModule, "cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(kModule, path + ":" + std::to_string(lineno) +
                                    ": expected 'key = value'");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

double objective(const ModelState& state, const Eigen::MatrixXd& X,
                 const Eigen::MatrixXd& Y, double scale, const TrainConfig& config) {
  const double e = elbo(state, X, Y, scale);
  if (!config.lengthscale_prior) return e;
  return e + prior_term(flatten(state), config, nullptr);
}

ParamVector gradient(const ModelState& state, const Eigen::MatrixXd& X,
                     const Eigen::MatrixXd& Y, double scale, const TrainConfig& config,
                     double* value) {
  ModelState g;
  double v = elbo_grad(state, X, Y, scale, g);
  ParamVector grad = flatten_gradient(g);
  if (config.lengthscale_prior) v += prior_term(flatten(state), config, &grad);
  for (const auto& s : grad.layout) {
    for (Eigen::Index k = s.offset; k < s.offset + s.size; ++k) {
      if (!std::isfinite(grad.values(k))) {
        throw NumericalError(kModule, "non-finite gradient in slice '" + s.name + "'");
      }
    }
  }
  if (value) *value = v;
  return grad;
}

ParamVector adam_step(const ParamVector& params, const ParamVector& grad,
                      AdamState& opt, const TrainConfig& c) {
  if (grad.size() != params.size()) {
    throw DimensionError(kModule, "adam: gradient and parameter sizes differ");
  }
  if (opt.t == 0 || opt.m.size() != params.size()) {
    opt.m = Eigen::VectorXd::Zero(params.size());
    opt.v = Eigen::VectorXd::Zero(params.size());
    opt.t = 0;
  }
  ++opt.t;
  const double b1t = 1.0 - std::pow(c.adam_beta1, static_cast<double>(opt.t));
  const double b2t = 1.0 - std::pow(c.adam_beta2, static_cast<double>(opt.t));
  ParamVector out = params;
  for (Eigen::Index k = 0; k < params.size(); ++k) {
    const double g = grad.values(k);
    opt.m(k) = c.adam_beta1 * opt.m(k) + (1.0 - c.adam_beta1) * g;
    opt.v(k) = c.adam_beta2 * opt.v(k) + (1.0 - c.adam_beta2) * g * g;
    const double mhat = opt.m(k) / b1t;
    const double vhat = opt.v(k) / b2t;
    out.values(k) += c.learning_rate * mhat / (std::sqrt(vhat) + c.adam_eps);
  }
  return out;
}

ModelState initial_state(ModelKind kind, const Dataset& data, const TrainConfig& c) {
  c.validate();
  if (data.X.rows() < 1) throw DomainError(kModule, "empty dataset");
  if (data.Y.rows() != data.X.rows()) {
    throw DimensionError(kModule, "inputs and outputs differ in row count");
  }
  const LocationPlan plan = plan_locations(data, c);
  const Eigen::VectorXd log_ls = conditioned_log_scales(log_input_scales(data.X), plan.Z);
  std::mt19937_64 rng(c.seed ^ 0x9e3779b97f4a7c15ULL);

  switch (kind) {
    case ModelKind::Svgp: {
      const double sm = second_moment(data.Y, false);
      SvgpState s;
      s.f = make_process(KernelHyper(std::log(sm), log_ls), plan);
      s.log_noise_var = std::log(0.05 * sm);
      const LocalStats st = local_stats(data.X, data.Y.col(0), s.f.block.Z);
      s.f.block.m = smooth_at_inducing(s.f, st.nonzero_mean.cwiseProduct(st.nonzero_frac));
      return s;
    }
    case ModelKind::Zigp: {
      const double sm = second_moment(data.Y, true);
      ZigpState s;
      s.f = make_process(KernelHyper(std::log(sm), log_ls), plan);
      s.g = make_process(KernelHyper(0.0, log_ls), plan);
      s.log_noise_var = std::log(0.05 * sm);
      s.beta = 0.0;
      const LocalStats st = local_stats(data.X, data.Y.col(0), s.f.block.Z);
      s.f.block.m = smooth_at_inducing(s.f, st.nonzero_mean);
      const double scale_g = std::sqrt(1.0 + s.g.hyper.signal_var());
      Eigen::VectorXd tg(st.nonzero_frac.size());
      for (Eigen::Index j = 0; j < tg.size(); ++j) {
        tg(j) = probit_inverse(std::clamp(st.nonzero_frac(j), 0.05, 0.95)) * scale_g;
      }
      s.g.block.m = smooth_at_inducing(s.g, tg);
      return s;
    }
    case ModelKind::Gprn:
    case ModelKind::Sgprn: {
      const double sm = second_moment(data.Y, false);
      const int Q = c.latent_q;
      const int P = static_cast<int>(data.Y.cols());
      std::vector<Process> f, w, g;
      for (int q = 0; q < Q; ++q) {
        f.push_back(make_process(KernelHyper(0.0, log_ls), plan));
        random_prior_mean(f.back(), rng);
      }
      const double wv = sm / static_cast<double>(Q);
      for (int k = 0; k < Q * P; ++k) {
        w.push_back(make_process(KernelHyper(std::log(wv), log_ls), plan));
        if (kind == ModelKind::Sgprn) g.push_back(make_process(KernelHyper(std::log(4.0), log_ls), plan));
      }
      if (kind == ModelKind::Gprn) {
        GprnState s;
        s.Q = Q, s.P = P, s.f = std::move(f), s.w = std::move(w);
        s.log_noise_var = std::log(0.05 * sm);
        return s;
      }
      SgprnState s;
      s.Q = Q, s.P = P, s.f = std::move(f), s.w = std::move(w), s.g = std::move(g);
      s.log_noise_var = std::log(0.05 * sm);
      s.tie_locations();
      return s;
    }
  }
  throw UsageError(kModule, "unknown model kind");
}

FitResult fit(ModelKind kind, const Dataset& data, const TrainConfig& config) {
  return fit_from(initial_state(kind, data, config), data, config);
}

FitResult fit_from(ModelState state, const Dataset& data, const TrainConfig& config) {
  config.validate();
  const Eigen::Index n = data.X.rows();
  if (n < 1) throw DomainError(kModule, "empty dataset");
  const Eigen::Index batch = std::min<Eigen::Index>(config.batch_size, n);
  const double scale = static_cast<double>(n) / static_cast<double>(batch);

  FitResult out;
  out.trace.reserve(static_cast<std::size_t>(config.steps));
  ParamVector params = flatten(state);
  AdamState opt;
  std::mt19937_64 rng(config.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::size_t cursor = order.size();

  for (long step = 0; step < config.steps; ++step) {
    try {
      double value = 0.0;
      ParamVector grad;
      if (batch == n) {
        grad = gradient(state, data.X, data.Y, 1.0, config, &value);
      } else {
        std::vector<Eigen::Index> rows;
        rows.reserve(static_cast<std::size_t>(batch));
        while (static_cast<Eigen::Index>(rows.size()) < batch) {
          if (cursor == order.size()) {
            std::shuffle(order.begin(), order.end(), rng);
            cursor = 0;
          }
          rows.push_back(order[cursor++]);
        }
        const Eigen::MatrixXd Xb = data.X(rows, Eigen::all);
        const Eigen::MatrixXd Yb = data.Y(rows, Eigen::all);
        grad = gradient(state, Xb, Yb, scale, config, &value);
      }
      out.trace.push_back(value);
      params = adam_step(params, grad, opt, config);
      state = unflatten(params, state);
    } catch (const NumericalError& e) {
      throw NumericalError(kModule,
                           "step " + std::to_string(step) + ": [" + e.module() +
                               "] " + e.what(),
                           e.last_jitter());
    }
  }
  out.state = std::move(state);
  return out;
}

double gradcheck_rel_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

double GradCheckReport::max_rel_error() const {
  double m = 0.0;
  for (const auto& s : slices) m = std::max(m, s.rel_error);
  return m;
}

std::string GradCheckReport::to_text() const {
  std::ostringstream os;
  os << "model " << kind_name(kind) << "\n";
  os << std::scientific << std::setprecision(3);
  for (const auto& s : slices) {
    os << s.name << " [" << s.worst_index << "] analytic " << s.analytic
       << " numeric " << s.numeric << " rel_error " << s.rel_error << "\n";
  }
  os << "max_rel_error " << max_rel_error() << "\n";
  return os.str();
}

GradCheckInstance random_instance(ModelKind kind, unsigned long long seed) {
  std::mt19937_64 rng(seed * 7919ULL + static_cast<unsigned long long>(kind));
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto uni = [&](double a, double b) { return a + (b - a) * U(rng); };
  const Eigen::Index D = 2;
  const Eigen::Index m = 3;
  auto randn = [&](Eigen::Index r, Eigen::Index c, double sd) {
    Eigen::MatrixXd M(r, c);
    for (Eigen::Index k = 0; k < M.size(); ++k) M.data()[k] = sd * N(rng);
    return M;
  };
  auto process = [&](double mean_sd) {
    Process p;
    p.hyper = KernelHyper(uni(-0.5, 0.5), Eigen::VectorXd(D));
    for (Eigen::Index d = 0; d < D; ++d) p.hyper.log_lengthscales(d) = uni(-0.2, 0.6);
    p.block.Z = randn(m, D, 1.0);
    p.block.m = randn(m, 1, mean_sd).col(0);
    p.block.L = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index c = 0; c < m; ++c) {
      p.block.L(c, c) = std::exp(uni(-1.2, -0.2));
      for (Eigen::Index r = c + 1; r < m; ++r) p.block.L(r, c) = 0.3 * N(rng);
    }
    return p;
  };

  GradCheckInstance inst;
  inst.scale = 1.7;
  switch (kind) {
    case ModelKind::Svgp:
    case ModelKind::Zigp: {
      const Eigen::Index n = 8;
      inst.X = randn(n, D, 1.0);
      inst.Y = randn(n, 1, 1.0);
      if (kind == ModelKind::Svgp) {
        SvgpState s{process(0.7), uni(-1.5, -0.5)};
        inst.state = s;
      } else {
        for (Eigen::Index i = 0; i < n; i += 2) inst.Y(i, 0) = 0.0;
        ZigpState s{process(0.7), process(0.7), uni(-1.5, -0.5), uni(-0.5, 0.5)};
        inst.state = s;
      }
      break;
    }
    case ModelKind::Gprn:
    case ModelKind::Sgprn: {
      const int Q = 2, P = 2;
      const Eigen::Index n = kind == ModelKind::Gprn ? 6 : 5;
      inst.X = randn(n, D, 1.0);
      inst.Y = randn(n, P, 1.0);
      std::vector<Process> f, w, g;
      for (int q = 0; q < Q; ++q) f.push_back(process(0.7));
      for (int k = 0; k < Q * P; ++k) w.push_back(process(0.7));
      if (kind == ModelKind::Gprn) {
        GprnState s;
        s.Q = Q, s.P = P, s.f = f, s.w = w, s.log_noise_var = uni(-1.5, -0.5);
        inst.state = s;
      } else {
        for (int k = 0; k < Q * P; ++k) g.push_back(process(0.7));
        SgprnState s;
        s.Q = Q, s.P = P, s.f = f, s.w = w, s.g = g, s.log_noise_var = uni(-1.5, -0.5);
        s.tie_locations();
        inst.state = s;
      }
      break;
    }
  }
  return inst;
}

GradCheckReport grad_check(const ModelState& state, const Eigen::MatrixXd& X,
                           const Eigen::MatrixXd& Y, double scale,
                           const TrainConfig& config, double eps) {
  if (!(eps > 0.0)) throw UsageError(kModule, "gradcheck eps must be > 0");
  GradCheckReport rep;
  rep.kind = kind_of(state);
  const ParamVector analytic = gradient(state, X, Y, scale, config);
  const ParamVector base = flatten(state);
  for (const auto& s : base.layout) {
    SliceCheck sc;
    sc.name = s.name;
    for (Eigen::Index k = s.offset; k < s.offset + s.size; ++k) {
      ParamVector plus = base, minus = base;
      plus.values(k) += eps;
      minus.values(k) -= eps;
      const double fp = objective(unflatten(plus, state), X, Y, scale, config);
      const double fm = objective(unflatten(minus, state), X, Y, scale, config);
      const double numeric = (fp - fm) / (2.0 * eps);
      const double err = gradcheck_rel_error(analytic.values(k), numeric);
      if (k == s.offset || err > sc.rel_error) {
        sc.worst_index = k - s.offset;
        sc.analytic = analytic.values(k);
        sc.numeric = numeric;
        sc.rel_error = err;
      }
    }
    rep.slices.push_back(sc);
  }
  return rep;
}

GradCheckReport grad_check(ModelKind kind, unsigned long long seed, double eps) {
  const GradCheckInstance inst = random_instance(kind, seed);
  TrainConfig config;
  config.lengthscale_prior = true;
  return grad_check(inst.state, inst.X, inst.Y, inst.scale, config, eps);
}

}  // namespace zigp
