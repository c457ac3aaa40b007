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
#include <utility>
#include <vector>

#include "zigp/dataset.hpp"
#include "zigp/model.hpp"

namespace zigp {

/// A parsed CSV: header names and a numeric body.
struct Table {
  std::vector<std::string> header;
  Eigen::MatrixXd values;  // rows x header.size()

  /// Column index by name; throws IoError naming the file otherwise.
  Eigen::Index column(const std::string& name) const;
};

/// Reads a headered CSV with numeric cells. Parse failures report the
/// data row (1-based) and column name; non-finite cells are rejected.
Table read_table(const std::string& path);

/// Writes `header` and `values` with 17 significant digits.
void write_table(const std::string& path, const std::vector<std::string>& header,
                 const Eigen::MatrixXd& values);

Dataset load_csv(const std::string& path, const std::vector<std::string>& input_cols,
                 const std::vector<std::string>& output_cols);

/// Inputs first, then outputs.
void save_csv(const std::string& path, const Dataset& ds);

/// Default column roles: columns named y or y<digits> are outputs, the
/// rest inputs; without such names the last column is the output.
std::pair<std::vector<std::string>, std::vector<std::string>> default_columns(
    const std::vector<std::string>& header);

/// Partitions the unique values of column `time_col` at random (seeded)
/// so that round(train_frac * n_times) of them go to training, keeping
/// at least one time on each side.
std::pair<Dataset, Dataset> split_by_time(const Dataset& ds, Eigen::Index time_col,
                                          double train_frac, unsigned long long seed);

/// Model file: header lines (kind, Q, P, D, m, grid layout, column
/// names) then one `slice = [v, ...]` line per parameter slice.
struct ModelFile {
  ModelState state;
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
};

void save_model(const std::string& path, const ModelFile& model);
ModelFile load_model(const std::string& path);

/// Columns: inputs..., mean_p..., var_p..., support_prob (when present).
void save_predictions(const std::string& path, const std::vector<std::string>& input_names,
                      const Eigen::MatrixXd& X, const Prediction& pred);

struct PredictionFile {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd var;
  std::optional<Eigen::VectorXd> support_prob;
};
PredictionFile load_predictions(const std::string& path);

}  // namespace zigp
