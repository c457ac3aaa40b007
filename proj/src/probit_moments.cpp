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

#include "zigp/probit_moments.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "zigp/error.hpp"
#include "zigp/kernels.hpp"

namespace zigp {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kInv2Pi = 0.15915494309189533577;

// Phi(x) - 1/2
double znorm1(double x) { return 0.5 * std::erf(x * kInvSqrt2); }
// 1 - Phi(x)
double znorm2(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

// Owen's T via the Patefield-Tandy region scheme (J. Stat. Softw. 5(5),
// 2000): the (h, a) plane with h >= 0, 0 <= a <= 1 is split into 18
// regions, each with a series method T1..T6 and a truncation order tuned
// for double precision.

int region_code(double h, double a) {
  static constexpr std::array<double, 14> hrange = {
      0.02, 0.06, 0.09, 0.125, 0.26, 0.4, 0.6,
      1.6,  1.7,  2.33, 2.4,   3.36, 3.4, 4.8};
  static constexpr std::array<double, 7> arange = {0.025, 0.09, 0.15, 0.36,
                                                   0.5,   0.9,  0.99999};
  static constexpr std::array<int, 8 * 15> select = {
      0, 0, 1, 12, 12, 12, 12, 12, 12, 12, 12, 15, 15, 15, 8,
      0, 1, 1, 2,  2,  4,  4,  13, 13, 14, 14, 15, 15, 15, 8,
      1, 1, 2, 2,  2,  4,  4,  14, 14, 14, 14, 15, 15, 15, 9,
      1, 1, 2, 4,  4,  4,  4,  6,  6,  15, 15, 15, 15, 15, 9,
      1, 2, 2, 4,  4,  5,  5,  7,  7,  16, 16, 16, 11, 11, 10,
      1, 2, 4, 4,  4,  5,  5,  7,  7,  16, 16, 16, 11, 11, 11,
      1, 2, 3, 3,  5,  5,  7,  7,  16, 16, 16, 16, 16, 11, 11,
      1, 2, 3, 3,  5,  5,  17, 17, 17, 17, 16, 16, 16, 11, 11};
  int ih = 14;
  for (int i = 0; i < 14; ++i) {
    if (h <= hrange[static_cast<std::size_t>(i)]) {
      ih = i;
      break;
    }
  }
  int ia = 7;
  for (int i = 0; i < 7; ++i) {
    if (a <= arange[static_cast<std::size_t>(i)]) {
      ia = i;
      break;
    }
  }
  return select[static_cast<std::size_t>(ia * 15 + ih)];
}

double method_t1(double h, double a, int order) {
  const double hs = -0.5 * h * h;
  const double dhs = std::exp(hs);
  const double as = a * a;
  int j = 1;
  double jj = 1.0;
  double aj = a * kInv2Pi;
  double dj = std::expm1(hs);
  double gj = hs * dhs;
  double val = std::atan(a) * kInv2Pi;
  while (true) {
    val += dj * aj / jj;
    if (order <= j) break;
    ++j;
    jj += 2.0;
    aj *= as;
    dj = gj - dj;
    gj *= hs / static_cast<double>(j);
  }
  return val;
}

double method_t2(double h, double a, int order, double ah) {
  const int maxii = order + order + 1;
  const double hs = h * h;
  const double as = -a * a;
  const double y = 1.0 / hs;
  int ii = 1;
  double val = 0.0;
  double vi = a * std::exp(-0.5 * ah * ah) * kInvSqrt2Pi;
  double z = znorm1(ah) / h;
  while (true) {
    val += z;
    if (maxii <= ii) {
      val *= std::exp(-0.5 * hs) * kInvSqrt2Pi;
      break;
    }
    z = y * (vi - static_cast<double>(ii) * z);
    vi *= as;
    ii += 2;
  }
  return val;
}

double method_t3(double h, double a, double ah) {
  static constexpr std::array<double, 21> c2 = {
      0.99999999999999987510,     -0.99999999999988796462,
      0.99999999998290743652,     -0.99999999896282500134,
      0.99999996660459362918,     -0.99999933986272476760,
      0.99999125611136965852,     -0.99991777624463387686,
      0.99942835555870132569,     -0.99697311720723000295,
      0.98751448037275303682,     -0.95915857980572882813,
      0.89246305511006708555,     -0.76893425990463999675,
      0.58893528468484693250,     -0.38380345160440256652,
      0.20317601701045299653,     -0.82813631607004984866E-01,
      0.24167984735759576523E-01, -0.44676566663971825242E-02,
      0.39141169402373836468E-03};
  constexpr std::size_t order = 20;
  const double as = a * a;
  const double hs = h * h;
  const double y = 1.0 / hs;
  double ii = 1.0;
  double vi = a * std::exp(-0.5 * ah * ah) * kInvSqrt2Pi;
  double zi = znorm1(ah) / h;
  double val = 0.0;
  for (std::size_t i = 0;; ++i) {
    val += zi * c2[i];
    if (order <= i) {
      val *= std::exp(-0.5 * hs) * kInvSqrt2Pi;
      break;
    }
    zi = y * (ii * zi - vi);
    vi *= as;
    ii += 2.0;
  }
  return val;
}

double method_t4(double h, double a, int order) {
  const int maxii = order + order + 1;
  const double hs = h * h;
  const double as = -a * a;
  int ii = 1;
  double ai = a * std::exp(-0.5 * hs * (1.0 - as)) * kInv2Pi;
  double yi = 1.0;
  double val = 0.0;
  while (true) {
    val += ai * yi;
    if (maxii <= ii) break;
    ii += 2;
    yi = (1.0 - hs * yi) / static_cast<double>(ii);
    ai *= as;
  }
  return val;
}

double method_t5(double h, double a) {
  // Squared Gauss-Legendre abscissas and weights pre-scaled by 1/(2 pi).
  static constexpr std::array<double, 13> pts = {
      0.35082039676451715489E-02, 0.31279042338030753740E-01,
      0.85266826283219451090E-01, 0.16245071730812277011,
      0.25851196049125434828,     0.36807553840697533536,
      0.48501092905604697475,     0.60277514152618576821,
      0.71477884217753226516,     0.81475510988760098605,
      0.89711029755948965867,     0.95723808085944261843,
      0.99178832974629703586};
  static constexpr std::array<double, 13> wts = {
      0.18831438115323502887E-01, 0.18567086243977649478E-01,
      0.18042093461223385584E-01, 0.17263829606398753364E-01,
      0.16243219975989856730E-01, 0.14994592034116704829E-01,
      0.13535474469662088392E-01, 0.11886351605820165233E-01,
      0.10070377242777431897E-01, 0.81130545742299586629E-02,
      0.60419009528470238773E-02, 0.38862217010742057883E-02,
      0.16793031084546090448E-02};
  const double as = a * a;
  const double hs = -0.5 * h * h;
  double val = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double r = 1.0 + as * pts[i];
    val += wts[i] * std::exp(hs * r) / r;
  }
  return val * a;
}

double method_t6(double h, double a) {
  const double normh = znorm2(h);
  const double y = 1.0 - a;
  const double r = std::atan2(y, 1.0 + a);
  double val = 0.5 * normh * (1.0 - normh);
  if (r != 0.0) val -= r * std::exp(-0.5 * y * h * h / r) * kInv2Pi;
  return val;
}

// Preconditions: h >= 0, 0 <= a <= 1, ah = a * h.
double owen_t_reduced(double h, double a, double ah) {
  if (h == 0.0) return std::atan(a) * kInv2Pi;
  if (a == 0.0) return 0.0;
  if (a == 1.0) return 0.5 * znorm2(-h) * znorm2(h);

  static constexpr std::array<int, 18> order = {2,  3,  4,  5, 7, 10, 12, 18, 10,
                                                20, 30, 0,  4, 7, 8,  20, 0,  0};
  static constexpr std::array<int, 18> method = {1, 1, 1, 1, 1, 1, 1, 1, 2,
                                                 2, 2, 3, 4, 4, 4, 4, 5, 6};
  const auto code = static_cast<std::size_t>(region_code(h, a));
  const int m = order[code];
  switch (method[code]) {
    case 1:
      return method_t1(h, a, m);
    case 2:
      return method_t2(h, a, m, ah);
    case 3:
      return method_t3(h, a, ah);
    case 4:
      return method_t4(h, a, m);
    case 5:
      return method_t5(h, a);
    default:
      return method_t6(h, a);
  }
}

}  // namespace

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double owen_t(double h, double a) {
  h = std::fabs(h);
  const double abs_a = std::fabs(a);
  const double abs_ah = abs_a * h;
  double val = 0.0;
  if (abs_a <= 1.0) {
    val = owen_t_reduced(h, abs_a, abs_ah);
  } else if (h <= 0.67) {
    // T(h,a) = 1/4 - (Phi(h)-1/2)(Phi(ah)-1/2) - T(ah, 1/a), written with
    // the centred cdf to avoid cancellation near the origin.
    val = 0.25 - znorm1(h) * znorm1(abs_ah) -
          owen_t_reduced(abs_ah, 1.0 / abs_a, h);
  } else {
    const double normh = znorm2(h);
    const double normah = znorm2(abs_ah);
    val = 0.5 * (normh + normah) - normh * normah -
          owen_t_reduced(abs_ah, 1.0 / abs_a, h);
  }
  return a < 0.0 ? -val : val;
}

double owen_t_dh(double h, double a) {
  return -std_normal_pdf(h) * znorm1(a * h);
}

double owen_t_da(double h, double a) {
  const double r = 1.0 + a * a;
  return kInv2Pi * std::exp(-0.5 * h * h * r) / r;
}

namespace {

void check_var(double var) {
  if (!(var >= 0.0) || !std::isfinite(var)) {
    throw DomainError("probit_moments",
                      "Gaussian variance must be finite and >= 0, got " +
                          std::to_string(var));
  }
}

double clamp_variance(double v) {
  if (v >= 0.0) return v;
  if (v >= -1e-12) return 0.0;
  throw NumericalError("probit_moments",
                       "probit variance is negative beyond rounding: " +
                           std::to_string(v));
}

}  // namespace

double probit_mean(GaussianScalar g) {
  check_var(g.var);
  return std_normal_cdf(g.mu / std::sqrt(1.0 + g.var));
}

double probit_square_mean(GaussianScalar g) {
  check_var(g.var);
  const double lambda = g.mu / std::sqrt(1.0 + g.var);
  const double c = 1.0 / std::sqrt(1.0 + 2.0 * g.var);
  return std_normal_cdf(lambda) - 2.0 * owen_t(lambda, c);
}

double probit_variance(GaussianScalar g) {
  const double mean = probit_mean(g);
  return clamp_variance(probit_square_mean(g) - mean * mean);
}

ProbitMoments probit_moments(GaussianScalar g) {
  check_var(g.var);
  const double s = std::sqrt(1.0 + g.var);
  const double lambda = g.mu / s;
  const double c = 1.0 / std::sqrt(1.0 + 2.0 * g.var);
  const double pdf = std_normal_pdf(lambda);

  ProbitMoments out;
  out.mean = std_normal_cdf(lambda);
  out.square_mean = out.mean - 2.0 * owen_t(lambda, c);
  out.variance = clamp_variance(out.square_mean - out.mean * out.mean);

  const double dlambda_dmu = 1.0 / s;
  const double dlambda_dvar = -0.5 * lambda / (1.0 + g.var);
  const double dc_dvar = -c * c * c;
  out.dmean_dmu = pdf * dlambda_dmu;
  out.dmean_dvar = pdf * dlambda_dvar;

  const double outer = pdf - 2.0 * owen_t_dh(lambda, c);
  out.dsquare_dmu = outer * dlambda_dmu;
  out.dsquare_dvar = outer * dlambda_dvar - 2.0 * owen_t_da(lambda, c) * dc_dvar;
  return out;
}

double gaussian_kl(const KlInputs& k) {
  const auto m = k.m.size();
  if (k.L.rows() != m || k.L.cols() != m || k.Kmm.rows() != m ||
      k.Kmm.cols() != m) {
    throw DimensionError("probit_moments", "gaussian_kl: inconsistent shapes");
  }
  double log_det_s = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!(k.L(j, j) > 0.0)) {
      throw DomainError("probit_moments",
                        "gaussian_kl: L must have a positive diagonal");
    }
    log_det_s += 2.0 * std::log(k.L(j, j));
  }
  const Eigen::MatrixXd lower = k.L.triangularView<Eigen::Lower>();
  Eigen::MatrixXd rhs(m, m + 1);
  rhs.leftCols(m) = lower;
  rhs.col(m) = k.m;
  const CholSolve solved = chol_solve_jitter(k.Kmm, rhs);
  // tr(Kmm^-1 S) = sum_ij L_ij (Kmm^-1 L)_ij
  const double trace =
      (lower.array() * solved.solution.leftCols(m).array()).sum() +
      k.m.dot(solved.solution.col(m));
  return 0.5 * (solved.log_det - log_det_s + trace - static_cast<double>(m));
}

}  // namespace zigp
