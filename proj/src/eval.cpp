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

#include "zigp/eval.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "zigp/error.hpp"

namespace zigp {

namespace {

constexpr const char* kModule = "eval";

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DimensionError(kModule, "length mismatch: " + std::to_string(a) + " vs " +
                                      std::to_string(b));
  }
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_edge(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

RegressionMetrics regression_metrics(const Eigen::VectorXd& y_true,
                                     const Eigen::VectorXd& y_pred) {
  check_lengths(static_cast<std::size_t>(y_true.size()),
                static_cast<std::size_t>(y_pred.size()));
  if (y_true.size() == 0) throw DimensionError(kModule, "empty input");
  double se = 0.0, ae = 0.0;
  for (Eigen::Index i = 0; i < y_true.size(); ++i) {
    const double e = y_true(i) - y_pred(i);
    se += e * e;
    ae += std::abs(e);
  }
  const double n = static_cast<double>(y_true.size());
  return {std::sqrt(se / n), ae / n};
}

ClassificationMetrics classification_metrics(const std::vector<bool>& y_true_zero,
                                             const std::vector<bool>& y_pred_zero) {
  check_lengths(y_true_zero.size(), y_pred_zero.size());
  double tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < y_true_zero.size(); ++i) {
    const bool t = !y_true_zero[i];
    const bool p = !y_pred_zero[i];
    if (t && p) ++tp;
    else if (!t && p) ++fp;
    else if (!t && !p) ++tn;
    else ++fn;
  }
  ClassificationMetrics m;
  m.accuracy = ratio(tp + tn, tp + tn + fp + fn);
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  return m;
}

std::vector<long> error_histogram(const Eigen::VectorXd& y_true,
                                  const Eigen::VectorXd& y_pred,
                                  const std::vector<double>& bin_edges) {
  check_lengths(static_cast<std::size_t>(y_true.size()),
                static_cast<std::size_t>(y_pred.size()));
  if (bin_edges.size() < 2) throw DomainError(kModule, "need at least two bin edges");
  for (std::size_t k = 1; k < bin_edges.size(); ++k) {
    if (!(bin_edges[k] > bin_edges[k - 1])) {
      throw DomainError(kModule, "bin edges must be strictly increasing");
    }
  }
  const std::size_t bins = bin_edges.size() - 1;
  std::vector<long> counts(bins, 0);
  for (Eigen::Index i = 0; i < y_true.size(); ++i) {
    const double e = std::abs(y_true(i) - y_pred(i));
    std::size_t b = 0;
    while (b + 1 < bins && e >= bin_edges[b + 1]) ++b;
    ++counts[b];
  }
  return counts;
}

double fraction_within(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred,
                       double tol) {
  check_lengths(static_cast<std::size_t>(y_true.size()),
                static_cast<std::size_t>(y_pred.size()));
  if (y_true.size() == 0) return 0.0;
  long k = 0;
  for (Eigen::Index i = 0; i < y_true.size(); ++i) {
    if (std::abs(y_true(i) - y_pred(i)) < tol) ++k;
  }
  return static_cast<double>(k) / static_cast<double>(y_true.size());
}

std::string EvalReport::to_text() const {
  std::ostringstream os;
  os << "n = " << n << "\n"
     << "rmse = " << fmt(regression.rmse) << "\n"
     << "mae = " << fmt(regression.mae) << "\n"
     << "f1 = " << fmt(classification.f1) << "\n"
     << "accuracy = " << fmt(classification.accuracy) << "\n"
     << "precision = " << fmt(classification.precision) << "\n"
     << "recall = " << fmt(classification.recall) << "\n";
  for (std::size_t b = 0; b < histogram.size(); ++b) {
    os << "abs_error_bin[" << fmt_edge(bin_edges[b]) << "," << fmt_edge(bin_edges[b + 1])
       << ") = " << histogram[b] << "\n";
  }
  return os.str();
}

std::string EvalReport::csv_header() const {
  std::string h = "n,rmse,mae,f1,accuracy,precision,recall";
  for (std::size_t b = 0; b < histogram.size(); ++b) h += ",bin_" + std::to_string(b);
  return h;
}

std::string EvalReport::csv_row() const {
  std::string r = std::to_string(n) + "," + fmt(regression.rmse) + "," +
                  fmt(regression.mae) + "," + fmt(classification.f1) + "," +
                  fmt(classification.accuracy) + "," + fmt(classification.precision) +
                  "," + fmt(classification.recall);
  for (long c : histogram) r += "," + std::to_string(c);
  return r;
}

}  // namespace zigp
