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

#include "zigp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "zigp/data_io.hpp"
#include "zigp/error.hpp"
#include "zigp/eval.hpp"
#include "zigp/model.hpp"
#include "zigp/sgprn.hpp"
#include "zigp/synth.hpp"
#include "zigp/training.hpp"
#include "zigp/zigp_model.hpp"

namespace zigp {

namespace {

constexpr const char* kModule = "cli";

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(kModule, "cannot write '" + path + "'");
  return f;
}

// Columns of `t` named in `names`, in that order.
Eigen::MatrixXd columns(const Table& t, const std::vector<std::string>& names) {
  Eigen::MatrixXd M(t.values.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t k = 0; k < names.size(); ++k) {
    M.col(static_cast<Eigen::Index>(k)) = t.values.col(t.column(names[k]));
  }
  return M;
}

int input_index(const std::vector<std::string>& inputs, const std::string& key) {
  const auto it = std::find(inputs.begin(), inputs.end(), key);
  if (it != inputs.end()) return static_cast<int>(it - inputs.begin());
  try {
    std::size_t used = 0;
    const int k = std::stoi(key, &used);
    if (used == key.size() && k >= 0 && k < static_cast<int>(inputs.size())) return k;
  } catch (const std::exception&) {
  }
  throw UsageError(kModule, "--kron: '" + key + "' is not an input column");
}

struct SynthArgs {
  std::string kind = "zigp";
  unsigned long long seed = 0;
  long n = 500;
  long d = 1;
  double zero_frac = 0.9;
  int q = 2;
  int p = 2;
  std::string out;
  std::string support_out;
};

void cmd_synth(const SynthArgs& a, std::ostream& out) {
  Dataset data;
  Eigen::MatrixXd support;
  if (a.kind == "zigp") {
    ZigpSynth s = synth_zigp(a.seed, a.n, a.d, a.zero_frac);
    data = std::move(s.data);
    support = s.support;
  } else if (a.kind == "gprn" || a.kind == "sgprn") {
    GprnSynth s = synth_gprn(a.seed, a.n, a.d, a.q, a.p, a.kind == "sgprn");
    data = std::move(s.data);
    support = s.support;
  } else {
    throw UsageError(kModule, "synth: unknown kind '" + a.kind + "'");
  }
  save_csv(a.out, data);
  if (!a.support_out.empty()) {
    std::vector<std::string> header = data.input_names;
    if (support.cols() == 1) {
      header.push_back("support");
    } else {
      for (int q = 0; q < a.q; ++q) {
        for (int p = 0; p < a.p; ++p) {
          header.push_back("support_" + std::to_string(q) + "_" + std::to_string(p));
        }
      }
    }
    Eigen::MatrixXd M(data.X.rows(), data.X.cols() + support.cols());
    M << data.X, support;
    write_table(a.support_out, header, M);
  }
  out << "wrote " << data.size() << " rows to " << a.out << "\n";
}

struct FitArgs {
  std::string model;
  std::string data;
  std::string config;
  std::string out;
  std::string kron;
  std::optional<long> steps;
  std::optional<unsigned long long> seed;
  std::optional<double> learning_rate;
  std::optional<long> batch_size;
  std::optional<long> inducing;
  std::optional<int> latent_q;
};

void cmd_fit(const FitArgs& a, std::ostream& out) {
  const ModelKind kind = parse_kind(a.model);
  TrainConfig config;
  if (!a.config.empty()) config.apply(read_config_file(a.config));
  if (a.steps) config.steps = *a.steps;
  if (a.seed) config.seed = *a.seed;
  if (a.learning_rate) config.learning_rate = *a.learning_rate;
  if (a.batch_size) config.batch_size = *a.batch_size;
  if (a.inducing) config.inducing = *a.inducing;
  if (a.latent_q) config.latent_q = *a.latent_q;
  config.validate();

  const Table t = read_table(a.data);
  const auto [inputs, outputs] = default_columns(t.header);
  Dataset data = load_csv(a.data, inputs, outputs);
  if (!a.kron.empty()) {
    const std::vector<std::string> keys = split_commas(a.kron);
    if (keys.size() < 2) {
      throw UsageError(kModule, "--kron needs at least one space column and a time column");
    }
    std::vector<int> space;
    for (std::size_t k = 0; k + 1 < keys.size(); ++k) {
      space.push_back(input_index(data.input_names, keys[k]));
    }
    data.kron = kron_spec_from_inputs(data.X, space, input_index(data.input_names, keys.back()));
  }

  const FitResult r = fit(kind, data, config);
  save_model(a.out, ModelFile{r.state, data.input_names, data.output_names});

  const std::string trace_path = a.out + ".trace.csv";
  std::ofstream f = open_out(trace_path);
  f << "# model = " << kind_name(kind) << "\n";
  f << "# data = " << a.data << "\n";
  std::istringstream cfg(config.to_text());
  for (std::string line; std::getline(cfg, line);) f << "# " << line << "\n";
  f << "step,objective\n";
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    f << k << "," << format_real(r.trace[k]) << "\n";
  }
  if (!f) throw IoError(kModule, "write failed for '" + trace_path + "'");
  out << kind_name(kind) << ": " << r.trace.size() << " steps";
  if (!r.trace.empty()) out << ", final objective " << format_real(r.trace.back());
  out << "\nmodel " << a.out << "\ntrace " << trace_path << "\n";
}

void cmd_predict(const std::string& model_path, const std::string& data_path,
                 const std::string& out_path, std::ostream& out) {
  const ModelFile mf = load_model(model_path);
  const Table t = read_table(data_path);
  const Eigen::MatrixXd X = columns(t, mf.input_names);
  const Prediction pred = predict(mf.state, X);
  save_predictions(out_path, mf.input_names, X, pred);
  out << "wrote " << X.rows() << " predictions to " << out_path << "\n";
}

void cmd_evaluate(const std::string& preds_path, const std::string& truth_path,
                  const std::string& mode_name, std::optional<double> threshold,
                  const std::string& report_path, std::ostream& out) {
  ZeroMode mode;
  if (mode_name == "support") {
    mode = ZeroMode::Support;
  } else if (mode_name == "mean") {
    mode = ZeroMode::Mean;
  } else {
    throw UsageError(kModule, "evaluate: --mode must be support or mean");
  }
  const double thr = threshold ? *threshold : (mode == ZeroMode::Support ? 0.5 : 0.01);

  const PredictionFile pf = load_predictions(preds_path);
  const Table t = read_table(truth_path);
  const Eigen::MatrixXd Y = columns(t, default_columns(t.header).second);
  if (Y.rows() != pf.mean.rows() || Y.cols() != pf.mean.cols()) {
    throw DimensionError(kModule, "evaluate: predictions are " +
                                      std::to_string(pf.mean.rows()) + "x" +
                                      std::to_string(pf.mean.cols()) + ", truth is " +
                                      std::to_string(Y.rows()) + "x" +
                                      std::to_string(Y.cols()));
  }
  if (mode == ZeroMode::Support && !pf.support_prob) {
    throw UsageError(kModule, "evaluate: --mode support needs a support_prob column");
  }

  const Eigen::Index n = Y.size();
  const Eigen::VectorXd y = Y.reshaped();
  const Eigen::VectorXd mu = pf.mean.reshaped();
  std::vector<bool> truth_zero(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) truth_zero[static_cast<std::size_t>(i)] = y(i) == 0.0;
  const Eigen::VectorXd support =
      mode == ZeroMode::Support ? *pf.support_prob : mu;

  EvalReport rep;
  rep.n = n;
  rep.regression = regression_metrics(y, mu);
  rep.classification = classification_metrics(truth_zero, classify_zero(mu, support, mode, thr));
  rep.bin_edges = {0.0, 0.01, 0.1, 0.5, 1.0, 2.0};
  rep.histogram = error_histogram(y, mu, rep.bin_edges);

  std::ofstream f = open_out(report_path);
  f << "mode = " << mode_name << "\n";
  f << "threshold = " << format_real(thr) << "\n";
  f << rep.to_text();
  if (!f) throw IoError(kModule, "write failed for '" + report_path + "'");
  out << rep.to_text();
}

int cmd_gradcheck(const std::string& model, unsigned long long seed, double eps,
                  std::ostream& out) {
  const GradCheckReport r = grad_check(parse_kind(model), seed, eps);
  out << r.to_text();
  if (!r.passed()) {
    throw NumericalError("training", "gradcheck: max relative error " +
                                         format_real(r.max_rel_error()) + " >= 1e-4");
  }
  return kExitOk;
}

void cmd_support_map(const std::string& model_path, const std::string& grid_path,
                     const std::string& out_path, std::ostream& out) {
  const ModelFile mf = load_model(model_path);
  const auto* s = std::get_if<SgprnState>(&mf.state);
  if (!s) {
    throw UsageError(kModule, "support-map needs an sgprn model, got " +
                                  std::string(kind_name(kind_of(mf.state))));
  }
  const Table t = read_table(grid_path);
  const Eigen::MatrixXd X = columns(t, mf.input_names);
  const Eigen::MatrixXd S = support_map(*s, X);
  std::vector<std::string> header = mf.input_names;
  for (int q = 0; q < s->Q; ++q) {
    for (int p = 0; p < s->P; ++p) {
      header.push_back("g_" + std::to_string(q) + "_" + std::to_string(p));
    }
  }
  Eigen::MatrixXd M(X.rows(), X.cols() + S.cols());
  M << X, S;
  write_table(out_path, header, M);
  out << "wrote " << X.rows() << " support rows to " << out_path << "\n";
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  return kExitUsage;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-inflated and sparse Gaussian process regression networks", "zigp"};
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--kind", sa.kind, "zigp | gprn | sgprn")->required();
  synth->add_option("--seed", sa.seed)->required();
  synth->add_option("--n", sa.n, "Rows")->required()->check(CLI::PositiveNumber);
  synth->add_option("--out", sa.out, "Output CSV")->required();
  synth->add_option("--zero-frac", sa.zero_frac, "zigp: target zero fraction");
  synth->add_option("--q", sa.q, "gprn/sgprn: latent functions")->check(CLI::PositiveNumber);
  synth->add_option("--p", sa.p, "gprn/sgprn: outputs")->check(CLI::PositiveNumber);
  synth->add_option("--d", sa.d, "Input dimensions")->check(CLI::PositiveNumber);
  synth->add_option("--support-out", sa.support_out, "Write the true on/off map here");

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "Train a model");
  fit_cmd->add_option("--model", fa.model, "svgp | zigp | gprn | sgprn")->required();
  fit_cmd->add_option("--data", fa.data, "Training CSV")->required();
  fit_cmd->add_option("--config", fa.config, "key = value config file");
  fit_cmd->add_option("--out", fa.out, "Model file")->required();
  fit_cmd->add_option("--kron", fa.kron, "space_cols,...,time_col");
  fit_cmd->add_option("--steps", fa.steps);
  fit_cmd->add_option("--seed", fa.seed);
  fit_cmd->add_option("--learning-rate", fa.learning_rate);
  fit_cmd->add_option("--batch-size", fa.batch_size);
  fit_cmd->add_option("--inducing", fa.inducing);
  fit_cmd->add_option("--latent-q", fa.latent_q);

  std::string model_file, data_path, out_path;
  auto* predict_cmd = app.add_subcommand("predict", "Predict at new inputs");
  predict_cmd->add_option("--model-file", model_file)->required();
  predict_cmd->add_option("--data", data_path)->required();
  predict_cmd->add_option("--out", out_path)->required();

  std::string preds, truth, mode = "support", report;
  std::optional<double> threshold;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against truth");
  eval_cmd->add_option("--preds", preds)->required();
  eval_cmd->add_option("--truth", truth)->required();
  eval_cmd->add_option("--mode", mode, "support | mean");
  eval_cmd->add_option("--threshold", threshold, "Default 0.5 (support), 0.01 (mean)");
  eval_cmd->add_option("--report", report)->required();

  std::string gc_model;
  unsigned long long gc_seed = 0;
  double gc_eps = 1e-4;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient audit");
  gc_cmd->add_option("--model", gc_model)->required();
  gc_cmd->add_option("--seed", gc_seed);
  gc_cmd->add_option("--eps", gc_eps)->check(CLI::PositiveNumber);

  std::string sm_model, sm_grid, sm_out;
  auto* sm_cmd = app.add_subcommand("support-map", "Export sgprn support probabilities");
  sm_cmd->add_option("--model-file", sm_model)->required();
  sm_cmd->add_option("--grid", sm_grid)->required();
  sm_cmd->add_option("--out", sm_out)->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error [" << kModule << "]: " << e.what() << "\n";
    err << app.help();
    return kExitUsage;
  }

  try {
    if (synth->parsed()) cmd_synth(sa, out);
    else if (fit_cmd->parsed()) cmd_fit(fa, out);
    else if (predict_cmd->parsed()) cmd_predict(model_file, data_path, out_path, out);
    else if (eval_cmd->parsed()) cmd_evaluate(preds, truth, mode, threshold, report, out);
    else if (gc_cmd->parsed()) cmd_gradcheck(gc_model, gc_seed, gc_eps, out);
    else if (sm_cmd->parsed()) cmd_support_map(sm_model, sm_grid, sm_out, out);
  } catch (const Error& e) {
    err << "error [" << e.module() << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error [" << kModule << "]: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace zigp
