// Copyright 2026 The lppf Authors
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

#include "lppf/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "lppf/data_io.hpp"
#include "lppf/errors.hpp"
#include "lppf/evaluation.hpp"
#include "lppf/factor_models.hpp"
#include "lppf/mcmc_engine.hpp"
#include "lppf/noise_inversion.hpp"
#include "lppf/privacy.hpp"

namespace lppf {

namespace {

using nlohmann::json;

constexpr int kManifestVersion = 1;
constexpr int kFileFormatVersion = 1;

int default_threads() {
  if (const char* env = std::getenv("LPPF_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

// Every command writes a manifest next to its primary output so the run can
// be reproduced byte for byte.
void write_manifest(const std::string& primary_output,
                    const std::string& command, const json& params) {
  json manifest;
  manifest["tool"] = "lppf";
  manifest["manifest_version"] = kManifestVersion;
  manifest["file_format_version"] = kFileFormatVersion;
  manifest["command"] = command;
  manifest["params"] = params;
  std::ofstream out(primary_output + ".manifest.json");
  if (!out) {
    throw ParseError("cannot write manifest for '" + primary_output + "'");
  }
  out << manifest.dump(2) << "\n";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "topic") return ModelKind::topic;
  if (name == "mmsb") return ModelKind::mmsb;
  throw ConfigError("unknown model '" + name + "' (expected topic|mmsb)");
}

struct SynthArgs {
  std::string model;
  long long docs = 0, vocab = 0, actors = 0;
  int factors = 0;
  double a0 = 0.1, b0 = 1.0;
  bool no_diagonal = false;
  std::uint64_t seed = 1;
  std::string out_counts;
  std::string out_factors;
};

int cmd_synth(const SynthArgs& a) {
  const ModelKind kind = model_kind_from_string(a.model);
  ModelConfig config;
  config.kind = kind;
  config.hyper = GammaHyper{a.a0, a.b0};
  config.include_diagonal = !a.no_diagonal;
  Index rows = 0, cols = 0;
  if (kind == ModelKind::topic) {
    if (a.docs <= 0 || a.vocab <= 0 || a.factors <= 0) {
      throw ConfigError("synth --model topic requires --docs, --vocab, --topics");
    }
    rows = a.docs;
    cols = a.vocab;
  } else {
    if (a.actors <= 0 || a.factors <= 0) {
      throw ConfigError("synth --model mmsb requires --actors, --communities");
    }
    rows = cols = a.actors;
  }
  config.factors = a.factors;

  Rng rng(mix64(a.seed));
  const SyntheticData data = generate_synthetic(config, rows, cols, rng);
  write_sparse_counts(a.out_counts, data.counts);
  if (!a.out_factors.empty()) {
    write_factors(a.out_factors, {kind, rows, cols, data.factors});
  }

  json params = {{"model", a.model},       {"rows", rows},
                 {"cols", cols},           {"factors", a.factors},
                 {"a0", a.a0},             {"b0", a.b0},
                 {"include_diagonal", config.include_diagonal},
                 {"seed", a.seed},         {"out_counts", a.out_counts},
                 {"out_factors", a.out_factors}};
  write_manifest(a.out_counts, "synth", params);
  std::cout << "wrote " << data.counts.entries.size() << " nonzero counts ("
            << rows << "x" << cols << ") to " << a.out_counts << "\n";
  return 0;
}

struct PrivatizeArgs {
  std::string input;
  long long precision = 0;
  std::string precision_from_data;
  double epsilon = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 1;
  std::string granularity = "cell";
  std::int64_t max_cells = 100000000LL;
  std::string out;
};

int cmd_privatize(const PrivatizeArgs& a) {
  const CountMatrix counts = read_sparse_counts(a.input);

  long long precision = a.precision;
  if (!a.precision_from_data.empty()) {
    if (a.precision > 0) {
      throw ConfigError("--precision and --precision-from-data are exclusive");
    }
    if (a.precision_from_data != "mean") {
      throw ConfigError("--precision-from-data supports only 'mean'");
    }
    precision = std::max<long long>(1, std::llround(counts.mean()));
  }
  if (precision < 1) {
    throw ConfigError("need --precision N (>= 1) or --precision-from-data mean");
  }
  if ((a.epsilon > 0.0) == (a.alpha > 0.0)) {
    throw ConfigError("exactly one of --epsilon or --alpha is required");
  }
  PrivacyParams params = a.epsilon > 0.0
                             ? PrivacyParams::from_precision_epsilon(precision,
                                                                     a.epsilon)
                             : PrivacyParams::from_precision_alpha(precision,
                                                                   a.alpha);
  params.observation_granularity = a.granularity;

  Rng rng(mix64(a.seed));
  PrivatizedMatrix privatized = privatize(counts, params, rng, a.max_cells);
  privatized.seed = a.seed;
  write_privatized(a.out, privatized);

  json jparams = {{"input", a.input},
                  {"precision_n", params.precision_n},
                  {"epsilon", params.epsilon},
                  {"alpha", params.alpha},
                  {"granularity", a.granularity},
                  {"seed", a.seed},
                  {"max_cells", a.max_cells},
                  {"out", a.out}};
  write_manifest(a.out, "privatize", jparams);
  std::cout << "privatized " << counts.n_rows << "x" << counts.n_cols
            << " counts with N=" << params.precision_n
            << " epsilon=" << params.epsilon << " alpha=" << params.alpha
            << " -> " << a.out << "\n";
  return 0;
}

struct FitArgs {
  std::string data;
  std::string mode;
  std::string model;
  int factors = 10;
  double a0 = 0.1, b0 = 1.0;
  bool no_diagonal = false;
  long long iters = 7500, burnin = 2500, thin = 100;
  std::uint64_t seed = 1;
  int mask_top = 0;
  std::string mask_source;
  int threads = 1;
  std::string out;
};

std::optional<MaskSpec> build_mask(int mask_top, const std::string& mask_source,
                                   Index rows, Index cols) {
  if (mask_top == 0 && mask_source.empty()) return std::nullopt;
  if (mask_top <= 0 || mask_source.empty()) {
    throw ConfigError("--mask-top and --mask-source must be given together");
  }
  const CountMatrix ranking = read_sparse_counts(mask_source);
  if (ranking.n_rows != rows || ranking.n_cols != cols) {
    throw ConfigError("mask source dimensions do not match the data");
  }
  return heldout_mask_top_senders(ranking, mask_top);
}

int cmd_fit(const FitArgs& a) {
  const FitMode mode = fit_mode_from_string(a.mode);
  if ((a.mask_top > 0) != !a.mask_source.empty()) {
    throw ConfigError("--mask-top and --mask-source must be given together");
  }
  ModelConfig config;
  config.kind = model_kind_from_string(a.model);
  config.factors = a.factors;
  config.hyper = GammaHyper{a.a0, a.b0};
  config.include_diagonal = !a.no_diagonal;
  Schedule schedule{a.iters, a.burnin, a.thin, mode};
  schedule.check();
  EngineOptions options;
  options.threads = a.threads;

  SampleTrace trace;
  if (mode == FitMode::non_private) {
    const CountMatrix counts = read_sparse_counts(a.data);
    const auto mask = build_mask(a.mask_top, a.mask_source, counts.n_rows,
                                 counts.n_cols);
    trace = run(counts, config, schedule, mask ? &*mask : nullptr, a.seed,
                options);
  } else {
    const PrivatizedMatrix privatized = read_privatized(a.data);
    const auto mask = build_mask(a.mask_top, a.mask_source,
                                 privatized.values.rows(),
                                 privatized.values.cols());
    trace = run(privatized, config, schedule, mask ? &*mask : nullptr, a.seed,
                options);
  }
  write_trace(a.out, trace);

  json params = {{"data", a.data},
                 {"mode", a.mode},
                 {"model", a.model},
                 {"factors", a.factors},
                 {"a0", a.a0},
                 {"b0", a.b0},
                 {"include_diagonal", config.include_diagonal},
                 {"iters", a.iters},
                 {"burnin", a.burnin},
                 {"thin", a.thin},
                 {"seed", a.seed},
                 {"mask_top", a.mask_top},
                 {"mask_source", a.mask_source},
                 {"threads", a.threads},
                 {"out", a.out}};
  write_manifest(a.out, "fit", params);
  std::cout << "fit " << a.mode << " saved " << trace.samples.size()
            << " samples -> " << a.out << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string trace_path;
  std::string true_counts;
  std::string metric = "all";
  std::string cells = "all";
  int mask_top = 0;
  std::string mask_source;
  int top = 10;
  std::string out;
  std::string out_json;
  std::string dump_rates;
};

int cmd_evaluate(const EvaluateArgs& a) {
  if (a.metric != "all" && a.metric != "mae" && a.metric != "npmi" &&
      a.metric != "coherence") {
    throw ConfigError("unknown metric '" + a.metric + "'");
  }
  if (a.cells != "all" && a.cells != "heldout") {
    throw ConfigError("--cells must be all|heldout");
  }
  if (a.cells == "heldout" && (a.mask_top <= 0 || a.mask_source.empty())) {
    throw ConfigError("--cells heldout requires --mask-top and --mask-source");
  }
  const SampleTrace trace = read_trace(a.trace_path);
  const CountMatrix truth = read_sparse_counts(a.true_counts);
  if (truth.n_rows != trace.data_rows || truth.n_cols != trace.data_cols) {
    throw ConfigError("true-counts dimensions do not match the trace");
  }

  // Stored posterior-mean rates must be recomputable from the samples.
  const Matrix recomputed = posterior_mean_rates(trace);
  const double drift =
      (recomputed - trace.posterior_mean_rates).cwiseAbs().maxCoeff();
  if (drift > 1e-10) {
    throw NumericalError("stored posterior-mean rates drift " +
                             std::to_string(drift) + " from samples",
                         0);
  }

  const bool topic = trace.model_kind == ModelKind::topic;
  const bool want_mae = a.metric == "all" || a.metric == "mae";
  const bool want_npmi = a.metric == "npmi" || (a.metric == "all" && topic);
  const bool want_coherence =
      a.metric == "coherence" || (a.metric == "all" && topic);
  if ((a.metric == "npmi" || a.metric == "coherence") && !topic) {
    throw ConfigError("metric '" + a.metric + "' applies to topic traces only");
  }

  json results;
  std::ostringstream table;
  table << "metric\tscope\tvalue\n";

  if (want_mae) {
    std::vector<std::pair<Index, Index>> cells;
    std::string scope;
    if (a.cells == "heldout") {
      const auto mask = build_mask(a.mask_top, a.mask_source, trace.data_rows,
                                   trace.data_cols);
      cells = mask->cells;
      scope = "heldout";
    } else {
      for (Index i = 0; i < trace.data_rows; ++i) {
        for (Index j = 0; j < trace.data_cols; ++j) {
          if (trace.model_kind == ModelKind::mmsb && i == j &&
              !trace.include_diagonal) {
            continue;
          }
          cells.emplace_back(i, j);
        }
      }
      scope = "all";
    }
    const double value = mae(trace.posterior_mean_rates, truth, cells);
    results["mae"] = {{"scope", scope}, {"value", value}};
    table << "mae\t" << scope << "\t" << value << "\n";
  }

  if (want_npmi) {
    const TopicMetricReport report = npmi_of_trace(trace, truth, a.top);
    results["npmi"] = {{"mean", report.mean}, {"per_topic", report.per_topic}};
    for (std::size_t k = 0; k < report.per_topic.size(); ++k) {
      table << "npmi\ttopic:" << k << "\t" << report.per_topic[k] << "\n";
    }
    table << "npmi\tmean\t" << report.mean << "\n";
  }
  if (want_coherence) {
    const TopicMetricReport report = coherence_of_trace(trace, truth, a.top);
    results["coherence"] = {{"mean", report.mean},
                            {"per_topic", report.per_topic}};
    for (std::size_t k = 0; k < report.per_topic.size(); ++k) {
      table << "coherence\ttopic:" << k << "\t" << report.per_topic[k] << "\n";
    }
    table << "coherence\tmean\t" << report.mean << "\n";
  }

  {
    std::ofstream out(a.out);
    if (!out) throw ParseError("cannot open '" + a.out + "' for writing");
    out << table.str();
  }
  if (!a.out_json.empty()) {
    std::ofstream out(a.out_json);
    if (!out) throw ParseError("cannot open '" + a.out_json + "' for writing");
    out << results.dump(2) << "\n";
  }
  if (!a.dump_rates.empty()) {
    std::ofstream out(a.dump_rates);
    if (!out) {
      throw ParseError("cannot open '" + a.dump_rates + "' for writing");
    }
    const Matrix& rates = trace.posterior_mean_rates;
    for (Index i = 0; i < rates.rows(); ++i) {
      for (Index j = 0; j < rates.cols(); ++j) {
        out << rates(i, j) << (j + 1 == rates.cols() ? "\n" : "\t");
      }
    }
  }

  json params = {{"trace", a.trace_path}, {"true_counts", a.true_counts},
                 {"metric", a.metric},    {"cells", a.cells},
                 {"mask_top", a.mask_top}, {"mask_source", a.mask_source},
                 {"top", a.top},          {"out", a.out},
                 {"out_json", a.out_json}, {"dump_rates", a.dump_rates}};
  write_manifest(a.out, "evaluate", params);
  std::cout << table.str();
  return 0;
}

struct VerifyArgs {
  long long precision = 1;
  double epsilon = 0.0;
  double alpha = 0.0;
  long long value_bound = 10;
  long long window = 0;  // 0: derive from the tail bound
  std::string out;
};

int cmd_verify(const VerifyArgs& a) {
  if ((a.epsilon > 0.0) == (a.alpha > 0.0)) {
    throw ConfigError("exactly one of --epsilon or --alpha is required");
  }
  const PrivacyParams params =
      a.epsilon > 0.0
          ? PrivacyParams::from_precision_epsilon(a.precision, a.epsilon)
          : PrivacyParams::from_precision_alpha(a.precision, a.alpha);

  long long lo, hi;
  if (a.window > 0) {
    lo = -a.window;
    hi = a.value_bound + a.window;
  } else {
    std::tie(lo, hi) = default_ratio_window(params, a.value_bound);
  }
  const double ratio = verify_privacy_ratio(params, a.value_bound, lo, hi);
  const double bound = params.epsilon + 1e-9;
  const bool ok = ratio <= bound;

  std::ostringstream report;
  report << "precision_n\t" << params.precision_n << "\n"
         << "epsilon\t" << params.epsilon << "\n"
         << "alpha\t" << params.alpha << "\n"
         << "value_bound\t" << a.value_bound << "\n"
         << "window\t[" << lo << "," << hi << "]\n"
         << "max_log_ratio\t" << ratio << "\n"
         << "bound\t" << params.epsilon << "\n"
         << "satisfied\t" << (ok ? "yes" : "no") << "\n";
  std::cout << report.str();
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw ParseError("cannot open '" + a.out + "' for writing");
    out << report.str();
    json params_json = {{"precision_n", params.precision_n},
                        {"epsilon", params.epsilon},
                        {"alpha", params.alpha},
                        {"value_bound", a.value_bound},
                        {"window_lo", lo},
                        {"window_hi", hi},
                        {"out", a.out}};
    write_manifest(a.out, "verify", params_json);
  }
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"locally private Poisson factorization"};
  app.require_subcommand(1);
  app.set_config("--config");

  SynthArgs synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate synthetic factors and counts");
  synth_cmd->add_option("--model", synth.model, "topic|mmsb")->required();
  synth_cmd->add_option("--docs", synth.docs, "documents (topic model)");
  synth_cmd->add_option("--vocab", synth.vocab, "vocabulary size (topic model)");
  synth_cmd->add_option("--actors", synth.actors, "actors (block model)");
  synth_cmd->add_option("--topics,--communities", synth.factors,
                        "latent factor count");
  synth_cmd->add_option("--a0", synth.a0, "gamma shape hyperparameter");
  synth_cmd->add_option("--b0", synth.b0, "gamma rate hyperparameter");
  synth_cmd->add_flag("--no-diagonal", synth.no_diagonal,
                      "exclude the diagonal (block model)");
  synth_cmd->add_option("--seed", synth.seed, "master seed");
  synth_cmd->add_option("--out-counts", synth.out_counts, "counts output path")
      ->required();
  synth_cmd->add_option("--out-factors", synth.out_factors,
                        "ground-truth factors output path");

  PrivatizeArgs priv;
  CLI::App* priv_cmd =
      app.add_subcommand("privatize", "apply the geometric mechanism");
  priv_cmd->add_option("--input", priv.input, "sparse counts path")->required();
  priv_cmd->add_option("--precision", priv.precision, "precision N");
  priv_cmd->add_option("--precision-from-data", priv.precision_from_data,
                       "derive N from the data ('mean')");
  priv_cmd->add_option("--epsilon", priv.epsilon, "privacy budget epsilon");
  priv_cmd->add_option("--alpha", priv.alpha, "noise parameter alpha");
  priv_cmd->add_option("--seed", priv.seed, "noise seed");
  priv_cmd->add_option("--granularity", priv.granularity,
                       "observation granularity label");
  priv_cmd->add_option("--max-cells", priv.max_cells,
                       "dense materialization budget");
  priv_cmd->add_option("--out", priv.out, "privatized output path")->required();

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "run the MCMC sampler");
  fit_cmd->add_option("--data", fit.data, "privatized matrix or counts path")
      ->required();
  fit_cmd->add_option("--mode", fit.mode, "proposed|naive|non_private")
      ->required();
  fit_cmd->add_option("--model", fit.model, "topic|mmsb")->required();
  fit_cmd->add_option("--factors,--topics,--communities", fit.factors,
                      "latent factor count");
  fit_cmd->add_option("--a0", fit.a0, "gamma shape hyperparameter");
  fit_cmd->add_option("--b0", fit.b0, "gamma rate hyperparameter");
  fit_cmd->add_flag("--no-diagonal", fit.no_diagonal,
                    "exclude the diagonal (block model)");
  fit_cmd->add_option("--iters", fit.iters, "total MCMC iterations");
  fit_cmd->add_option("--burnin", fit.burnin, "burn-in iterations");
  fit_cmd->add_option("--thin", fit.thin, "thinning interval");
  fit_cmd->add_option("--seed", fit.seed, "master seed");
  fit_cmd->add_option("--mask-top", fit.mask_top,
                      "hold out cells of the top-k senders/recipients");
  fit_cmd->add_option("--mask-source", fit.mask_source,
                      "counts file ranked to build the mask");
  fit.threads = default_threads();
  fit_cmd->add_option("--threads", fit.threads,
                      "worker threads (results identical for any count)");
  fit_cmd->add_option("--out", fit.out, "trace output path")->required();

  EvaluateArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "score a fitted trace");
  eval_cmd->add_option("--trace", eval.trace_path, "trace path")->required();
  eval_cmd->add_option("--true-counts", eval.true_counts,
                       "reference counts path")
      ->required();
  eval_cmd->add_option("--metric", eval.metric, "mae|npmi|coherence|all");
  eval_cmd->add_option("--cells", eval.cells, "all|heldout (MAE cell set)");
  eval_cmd->add_option("--mask-top", eval.mask_top, "held-out top-k");
  eval_cmd->add_option("--mask-source", eval.mask_source,
                       "counts file ranked to build the mask");
  eval_cmd->add_option("--top", eval.top, "top words per topic");
  eval_cmd->add_option("--out", eval.out, "metrics table output path")
      ->required();
  eval_cmd->add_option("--out-json", eval.out_json, "metrics JSON output path");
  eval_cmd->add_option("--dump-rates", eval.dump_rates,
                       "write the posterior-mean rate matrix as TSV");

  VerifyArgs verify;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "enumerate the privacy-ratio bound");
  verify_cmd->add_option("--precision", verify.precision, "precision N");
  verify_cmd->add_option("--epsilon", verify.epsilon, "privacy budget epsilon");
  verify_cmd->add_option("--alpha", verify.alpha, "noise parameter alpha");
  verify_cmd->add_option("--value-bound", verify.value_bound,
                         "enumerate inputs in [0, bound]");
  verify_cmd->add_option("--window", verify.window,
                         "output window half-width (default: derived)");
  verify_cmd->add_option("--out", verify.out, "report output path");

  std::vector<const char*> argv;
  argv.push_back("lppf");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth);
    if (priv_cmd->parsed()) return cmd_privatize(priv);
    if (fit_cmd->parsed()) return cmd_fit(fit);
    if (eval_cmd->parsed()) return cmd_evaluate(eval);
    if (verify_cmd->parsed()) return cmd_verify(verify);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cerr << "error: no subcommand given\n";
  return 2;
}

}  // namespace lppf
