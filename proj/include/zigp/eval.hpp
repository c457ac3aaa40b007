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

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace zigp {

struct RegressionMetrics {
  double rmse = 0.0;
  double mae = 0.0;
};

RegressionMetrics regression_metrics(const Eigen::VectorXd& y_true,
                                     const Eigen::VectorXd& y_pred);

/// Positive class is "nonzero". Ratios with a zero denominator are 0.
struct ClassificationMetrics {
  double f1 = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

ClassificationMetrics classification_metrics(const std::vector<bool>& y_true_zero,
                                             const std::vector<bool>& y_pred_zero);

/// Counts of |y_true - y_pred| per half-open bin [e_k, e_k+1). Errors below
/// the first edge land in bin 0 and errors at or beyond the last edge in
/// the last bin, so the counts always sum to n.
std::vector<long> error_histogram(const Eigen::VectorXd& y_true,
                                  const Eigen::VectorXd& y_pred,
                                  const std::vector<double>& bin_edges);

/// Fraction of points with |error| < tol.
double fraction_within(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred,
                       double tol);

struct EvalReport {
  RegressionMetrics regression;
  ClassificationMetrics classification;
  std::vector<double> bin_edges;
  std::vector<long> histogram;
  long n = 0;

  /// `key = value` lines.
  std::string to_text() const;
  std::string csv_header() const;
  std::string csv_row() const;
};

}  // namespace zigp
