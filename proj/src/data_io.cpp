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

#include "zigp/data_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "zigp/error.hpp"
#include "zigp/params.hpp"

namespace zigp {

namespace {

constexpr const char* kModule = "data_io";

std::vector<std::string> split_csv_line(const std::string& line, const std::string& path,
                                        long row) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (quoted) {
    throw IoError(kModule, path + ": unterminated quote on row " + std::to_string(row));
  }
  out.push_back(cell);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote_name(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

Dataset subset(const Dataset& ds, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.X = ds.X(rows, Eigen::all);
  out.Y = ds.Y(rows, Eigen::all);
  out.input_names = ds.input_names;
  out.output_names = ds.output_names;
  if (ds.kron) {
    out.kron = kron_spec_from_inputs(out.X, ds.kron->space_dims, ds.kron->time_dim);
  }
  return out;
}

}  // namespace

Eigen::Index Table::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return static_cast<Eigen::Index>(c);
  }
  throw IoError(kModule, "missing column '" + name + "'");
}

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(kModule, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError(kModule, path + ": missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  Table t;
  for (auto& h : split_csv_line(line, path, 0)) t.header.push_back(trim(h));
  std::vector<std::vector<double>> rows;
  long row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty() || trim(line) == "\r") continue;
    ++row;
    const auto cells = split_csv_line(line, path, row);
    if (cells.size() != t.header.size()) {
      throw IoError(kModule, path + ": row " + std::to_string(row) + " has " +
                                 std::to_string(cells.size()) + " cells, header has " +
                                 std::to_string(t.header.size()));
    }
    std::vector<double> vals;
    vals.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string cell = trim(cells[c]);
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw IoError(kModule, path + ": row " + std::to_string(row) + ", column '" +
                                   t.header[c] + "': cannot parse '" + cell + "'");
      }
      if (!std::isfinite(v)) {
        throw IoError(kModule, path + ": row " + std::to_string(row) + ", column '" +
                                   t.header[c] + "': non-finite value '" + cell + "'");
      }
      vals.push_back(v);
    }
    rows.push_back(std::move(vals));
  }
  t.values.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return t;
}

void write_table(const std::string& path, const std::vector<std::string>& header,
                 const Eigen::MatrixXd& values) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols()) {
    throw DimensionError(kModule, "header and value widths differ");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(kModule, "cannot write '" + path + "'");
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << quote_name(header[c]);
  out << "\n";
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      out << (c ? "," : "") << format_real(values(r, c));
    }
    out << "\n";
  }
  if (!out) throw IoError(kModule, "write failed for '" + path + "'");
}

Dataset load_csv(const std::string& path, const std::vector<std::string>& input_cols,
                 const std::vector<std::string>& output_cols) {
  const Table t = read_table(path);
  if (t.values.rows() < 1) throw IoError(kModule, path + ": no data rows");
  Dataset ds;
  ds.input_names = input_cols;
  ds.output_names = output_cols;
  ds.X.resize(t.values.rows(), static_cast<Eigen::Index>(input_cols.size()));
  ds.Y.resize(t.values.rows(), static_cast<Eigen::Index>(output_cols.size()));
  auto pick = [&](const std::string& name) {
    try {
      return t.column(name);
    } catch (const IoError&) {
      throw IoError(kModule, path + ": missing column '" + name + "'");
    }
  };
  for (std::size_t c = 0; c < input_cols.size(); ++c) {
    ds.X.col(static_cast<Eigen::Index>(c)) = t.values.col(pick(input_cols[c]));
  }
  for (std::size_t c = 0; c < output_cols.size(); ++c) {
    ds.Y.col(static_cast<Eigen::Index>(c)) = t.values.col(pick(output_cols[c]));
  }
  return ds;
}

void save_csv(const std::string& path, const Dataset& ds) {
  if (ds.Y.rows() != ds.X.rows()) throw DimensionError(kModule, "X and Y row counts differ");
  std::vector<std::string> header = ds.input_names;
  header.insert(header.end(), ds.output_names.begin(), ds.output_names.end());
  Eigen::MatrixXd values(ds.X.rows(), ds.X.cols() + ds.Y.cols());
  values << ds.X, ds.Y;
  write_table(path, header, values);
}

std::pair<std::vector<std::string>, std::vector<std::string>> default_columns(
    const std::vector<std::string>& header) {
  static const std::regex out_name("y[0-9]*");
  std::vector<std::string> in, out;
  for (const auto& h : header) {
    (std::regex_match(h, out_name) ? out : in).push_back(h);
  }
  if (out.empty() && !in.empty()) {
    out.push_back(in.back());
    in.pop_back();
  }
  return {in, out};
}

std::pair<Dataset, Dataset> split_by_time(const Dataset& ds, Eigen::Index time_col,
                                          double train_frac, unsigned long long seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw DomainError(kModule, "train_frac must lie in (0, 1)");
  }
  if (time_col < 0 || time_col >= ds.X.cols()) {
    throw DimensionError(kModule, "time column out of range");
  }
  std::set<double> unique(ds.X.col(time_col).data(),
                          ds.X.col(time_col).data() + ds.X.rows());
  if (unique.size() < 2) throw DomainError(kModule, "fewer than 2 unique times");
  std::vector<double> times(unique.begin(), unique.end());
  std::mt19937_64 rng(seed);
  std::shuffle(times.begin(), times.end(), rng);
  const auto nt = static_cast<long>(times.size());
  const long n_train =
      std::clamp(std::lround(train_frac * static_cast<double>(nt)), 1L, nt - 1);
  const std::set<double> train_times(times.begin(), times.begin() + n_train);
  std::vector<Eigen::Index> train_rows, test_rows;
  for (Eigen::Index i = 0; i < ds.X.rows(); ++i) {
    (train_times.count(ds.X(i, time_col)) ? train_rows : test_rows).push_back(i);
  }
  return {subset(ds, train_rows), subset(ds, test_rows)};
}

// Model files

namespace {

struct Shape {
  ModelKind kind = ModelKind::Svgp;
  int Q = 1;
  int P = 1;
  Eigen::Index D = 1;
  Eigen::Index m = 1;
  std::optional<InducingGrid> grid;  // values unused, shapes only
};

Process skeleton_process(const Shape& s) {
  Process p;
  p.hyper = KernelHyper::unit(s.D);
  p.block.Z = Eigen::MatrixXd::Zero(s.m, s.D);
  p.block.m = Eigen::VectorXd::Zero(s.m);
  p.block.L = Eigen::MatrixXd::Identity(s.m, s.m);
  if (s.grid) {
    p.block.grid = s.grid;
    p.block.Z = s.grid->expand();
  }
  return p;
}

ModelState skeleton(const Shape& s) {
  switch (s.kind) {
    case ModelKind::Svgp: return SvgpState{skeleton_process(s), 0.0};
    case ModelKind::Zigp:
      return ZigpState{skeleton_process(s), skeleton_process(s), 0.0, 0.0};
    case ModelKind::Gprn: {
      GprnState g;
      g.Q = s.Q, g.P = s.P;
      g.f.assign(static_cast<std::size_t>(s.Q), skeleton_process(s));
      g.w.assign(static_cast<std::size_t>(s.Q * s.P), skeleton_process(s));
      return g;
    }
    case ModelKind::Sgprn: {
      SgprnState g;
      g.Q = s.Q, g.P = s.P;
      g.f.assign(static_cast<std::size_t>(s.Q), skeleton_process(s));
      g.w.assign(static_cast<std::size_t>(s.Q * s.P), skeleton_process(s));
      g.g.assign(static_cast<std::size_t>(s.Q * s.P), skeleton_process(s));
      return g;
    }
  }
  throw IoError(kModule, "unknown model kind");
}

Shape shape_of(const ModelState& st) {
  Shape s;
  s.kind = kind_of(st);
  s.D = input_dims(st);
  s.P = static_cast<int>(output_dims(st));
  if (const auto* g = std::get_if<GprnState>(&st)) s.Q = g->Q;
  if (const auto* g = std::get_if<SgprnState>(&st)) s.Q = g->Q;
  const auto ps = processes(st);
  s.m = ps.front()->block.size();
  s.grid = ps.front()->block.grid;
  for (const Process* p : ps) {
    const bool same_grid =
        p->block.grid.has_value() == s.grid.has_value() &&
        (!s.grid || (p->block.grid->space.rows() == s.grid->space.rows() &&
                     p->block.grid->time.size() == s.grid->time.size() &&
                     p->block.grid->space_dims == s.grid->space_dims &&
                     p->block.grid->time_dim == s.grid->time_dim));
    if (p->block.size() != s.m || !same_grid) {
      throw IoError(kModule, "model file format needs equal inducing shapes across processes");
    }
  }
  return s;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

long parse_long(const std::string& path, const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw IoError(kModule, path + ": bad integer for '" + key + "': '" + v + "'");
  }
  return x;
}

}  // namespace

void save_model(const std::string& path, const ModelFile& model) {
  const Shape s = shape_of(model.state);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(kModule, "cannot write '" + path + "'");
  out << "# zigp model\n";
  out << "kind = " << kind_name(s.kind) << "\n";
  out << "Q = " << s.Q << "\n";
  out << "P = " << s.P << "\n";
  out << "D = " << s.D << "\n";
  out << "m = " << s.m << "\n";
  if (s.grid) {
    out << "grid_space_dims = " << join_ints(s.grid->space_dims) << "\n";
    out << "grid_time_dim = " << s.grid->time_dim << "\n";
    out << "m_space = " << s.grid->space.rows() << "\n";
    out << "m_time = " << s.grid->time.size() << "\n";
  }
  out << "inputs = " << join(model.input_names) << "\n";
  out << "outputs = " << join(model.output_names) << "\n";
  const ParamVector pv = flatten(model.state);
  for (const auto& sl : pv.layout) {
    out << sl.name << " = [";
    for (Eigen::Index k = 0; k < sl.size; ++k) {
      out << (k ? ", " : "") << format_real(pv.values(sl.offset + k));
    }
    out << "]\n";
  }
  if (!out) throw IoError(kModule, "write failed for '" + path + "'");
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(kModule, "cannot open model file '" + path + "'");
  std::map<std::string, std::string> header;
  std::vector<std::pair<std::string, std::string>> slices;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw IoError(kModule, path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!val.empty() && val.front() == '[') {
      if (val.back() != ']') {
        throw IoError(kModule, path + ":" + std::to_string(lineno) + ": unterminated array");
      }
      slices.emplace_back(key, val.substr(1, val.size() - 2));
    } else {
      header[key] = val;
    }
  }
  auto need = [&](const std::string& k) -> const std::string& {
    const auto it = header.find(k);
    if (it == header.end()) throw IoError(kModule, path + ": missing header key '" + k + "'");
    return it->second;
  };
  Shape s;
  try {
    s.kind = parse_kind(need("kind"));
  } catch (const UsageError& e) {
    throw IoError(kModule, path + ": " + e.what());
  }
  s.Q = static_cast<int>(parse_long(path, "Q", need("Q")));
  s.P = static_cast<int>(parse_long(path, "P", need("P")));
  s.D = parse_long(path, "D", need("D"));
  s.m = parse_long(path, "m", need("m"));
  if (s.Q < 1 || s.P < 1 || s.D < 1 || s.m < 1) {
    throw IoError(kModule, path + ": Q, P, D and m must be positive");
  }
  if (header.count("grid_time_dim")) {
    InducingGrid g;
    for (const auto& c : split_list(need("grid_space_dims"))) {
      g.space_dims.push_back(static_cast<int>(parse_long(path, "grid_space_dims", c)));
    }
    g.time_dim = static_cast<int>(parse_long(path, "grid_time_dim", need("grid_time_dim")));
    const long ms = parse_long(path, "m_space", need("m_space"));
    const long mt = parse_long(path, "m_time", need("m_time"));
    if (ms < 1 || mt < 1 || ms * mt != s.m ||
        static_cast<Eigen::Index>(g.space_dims.size()) + 1 != s.D) {
      throw IoError(kModule, path + ": inconsistent grid layout");
    }
    for (int c : g.space_dims) {
      if (c < 0 || c >= s.D || c == g.time_dim) throw IoError(kModule, path + ": bad grid column");
    }
    if (g.time_dim < 0 || g.time_dim >= s.D) throw IoError(kModule, path + ": bad grid column");
    g.space = Eigen::MatrixXd::Zero(ms, static_cast<Eigen::Index>(g.space_dims.size()));
    g.time = Eigen::VectorXd::LinSpaced(mt, 0.0, 1.0);
    s.grid = g;
  }

  const ModelState like = skeleton(s);
  ParamVector pv = flatten(like);
  if (pv.layout.size() != slices.size()) {
    throw IoError(kModule, path + ": expected " + std::to_string(pv.layout.size()) +
                               " parameter slices, found " + std::to_string(slices.size()));
  }
  for (std::size_t k = 0; k < slices.size(); ++k) {
    const Slice& sl = pv.layout[k];
    if (slices[k].first != sl.name) {
      throw IoError(kModule, path + ": expected slice '" + sl.name + "', found '" +
                                 slices[k].first + "'");
    }
    const auto items = split_list(slices[k].second);
    if (static_cast<Eigen::Index>(items.size()) != sl.size) {
      throw IoError(kModule, path + ": slice '" + sl.name + "' has " +
                                 std::to_string(items.size()) + " values, expected " +
                                 std::to_string(sl.size));
    }
    for (Eigen::Index j = 0; j < sl.size; ++j) {
      const std::string& item = items[static_cast<std::size_t>(j)];
      char* end = nullptr;
      const double v = std::strtod(item.c_str(), &end);
      if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(v)) {
        throw IoError(kModule, path + ": slice '" + sl.name + "': bad value '" + item + "'");
      }
      pv.values(sl.offset + j) = v;
    }
  }
  ModelFile mf;
  mf.state = unflatten(pv, like);
  mf.input_names = split_list(header.count("inputs") ? header["inputs"] : "");
  mf.output_names = split_list(header.count("outputs") ? header["outputs"] : "");
  if (static_cast<Eigen::Index>(mf.input_names.size()) != s.D) {
    throw IoError(kModule, path + ": 'inputs' must list " + std::to_string(s.D) + " names");
  }
  return mf;
}

void save_predictions(const std::string& path, const std::vector<std::string>& input_names,
                      const Eigen::MatrixXd& X, const Prediction& pred) {
  const auto P = pred.mean.cols();
  std::vector<std::string> header = input_names;
  for (Eigen::Index p = 0; p < P; ++p) header.push_back("mean_" + std::to_string(p));
  for (Eigen::Index p = 0; p < P; ++p) header.push_back("var_" + std::to_string(p));
  if (pred.support_prob) header.push_back("support_prob");
  Eigen::MatrixXd values(X.rows(), static_cast<Eigen::Index>(header.size()));
  values.leftCols(X.cols()) = X;
  values.middleCols(X.cols(), P) = pred.mean;
  values.middleCols(X.cols() + P, P) = pred.var;
  if (pred.support_prob) values.rightCols(1) = *pred.support_prob;
  write_table(path, header, values);
}

PredictionFile load_predictions(const std::string& path) {
  const Table t = read_table(path);
  std::vector<Eigen::Index> mean_cols, var_cols;
  for (int p = 0;; ++p) {
    const auto it = std::find(t.header.begin(), t.header.end(), "mean_" + std::to_string(p));
    if (it == t.header.end()) break;
    mean_cols.push_back(it - t.header.begin());
    var_cols.push_back(t.column("var_" + std::to_string(p)));
  }
  if (mean_cols.empty()) throw IoError(kModule, path + ": no mean_0 column");
  PredictionFile pf;
  pf.mean = t.values(Eigen::all, mean_cols);
  pf.var = t.values(Eigen::all, var_cols);
  const auto it = std::find(t.header.begin(), t.header.end(), "support_prob");
  if (it != t.header.end()) pf.support_prob = t.values.col(it - t.header.begin());
  return pf;
}

}  // namespace zigp
