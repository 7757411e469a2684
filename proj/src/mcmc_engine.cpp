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

#include "lppf/mcmc_engine.hpp"

#include <cmath>
#include <memory>

#include "lppf/distributions.hpp"
#include "lppf/errors.hpp"
#include "lppf/noise_inversion.hpp"
#include "lppf/rng.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace lppf {

std::string to_string(FitMode mode) {
  switch (mode) {
    case FitMode::proposed: return "proposed";
    case FitMode::naive: return "naive";
    case FitMode::non_private: return "non_private";
  }
  return "?";
}

FitMode fit_mode_from_string(const std::string& name) {
  if (name == "proposed") return FitMode::proposed;
  if (name == "naive") return FitMode::naive;
  if (name == "non_private") return FitMode::non_private;
  throw ConfigError("unknown fit mode '" + name +
                    "' (expected proposed|naive|non_private)");
}

void Schedule::check() const {
  if (total_iters < 1) throw ConfigError("total_iters must be >= 1");
  if (burn_in < 0 || burn_in >= total_iters) {
    throw ConfigError("burn_in must satisfy 0 <= burn_in < total_iters");
  }
  if (thin < 1) throw ConfigError("thin must be >= 1");
  if (saved_sample_count(*this) < 1) {
    throw ConfigError("schedule saves no samples: (total_iters - burn_in) < thin");
  }
}

long long saved_sample_count(const Schedule& schedule) {
  return (schedule.total_iters - schedule.burn_in) / schedule.thin;
}

namespace {

void check_finite_state(const FactorModel& model, const Matrix& rates,
                        long long iteration) {
  if (!model.theta().allFinite() || !model.second().allFinite() ||
      !rates.allFinite()) {
    throw NumericalError("non-finite factor state", iteration);
  }
}

// Deterministic reduction: per-row partial sums combined in row order.
double data_log_lik(const CountGrid& counts, const Matrix& rates,
                    const MaskSpec* mask, ModelKind kind,
                    bool include_diagonal) {
  double total = 0.0;
  for (Index i = 0; i < counts.rows(); ++i) {
    double row_sum = 0.0;
    for (Index j = 0; j < counts.cols(); ++j) {
      if (kind == ModelKind::mmsb && i == j && !include_diagonal) continue;
      if (mask && mask->contains(i, j)) continue;
      row_sum += poisson_log_pmf(counts(i, j), rates(i, j));
    }
    total += row_sum;
  }
  return total;
}

struct AuxGrid {
  std::vector<EntryAuxState> cells;
  Index cols = 0;
  EntryAuxState& at(Index i, Index j) {
    return cells[static_cast<std::size_t>(i * cols + j)];
  }
  const EntryAuxState& at(Index i, Index j) const {
    return cells[static_cast<std::size_t>(i * cols + j)];
  }
};

double aux_log_lik(const AuxGrid& aux, const CountGrid& observed,
                   const MaskSpec* mask, double alpha, ModelKind kind,
                   bool include_diagonal) {
  const double rate = lambda_prior_rate(alpha);
  double total = 0.0;
  for (Index i = 0; i < observed.rows(); ++i) {
    double row_sum = 0.0;
    for (Index j = 0; j < observed.cols(); ++j) {
      if (kind == ModelKind::mmsb && i == j && !include_diagonal) continue;
      if (mask && mask->contains(i, j)) continue;
      const EntryAuxState& cell = aux.at(i, j);
      row_sum += poisson_log_pmf(cell.g_plus, cell.lambda_plus) +
                 poisson_log_pmf(cell.g_minus, cell.lambda_minus) +
                 exponential_log_pdf(cell.lambda_plus, rate) +
                 exponential_log_pdf(cell.lambda_minus, rate);
    }
    total += row_sum;
  }
  return total;
}

SampleTrace make_trace_shell(const FactorModel& model,
                             const ModelConfig& config,
                             const Schedule& schedule, std::uint64_t seed) {
  SampleTrace trace;
  trace.model_kind = config.kind;
  trace.data_rows = model.data_rows();
  trace.data_cols = model.data_cols();
  trace.factors = config.factors;
  trace.include_diagonal = config.include_diagonal;
  trace.schedule = schedule;
  trace.seed = seed;
  trace.samples.reserve(static_cast<std::size_t>(saved_sample_count(schedule)));
  trace.log_joint.reserve(static_cast<std::size_t>(schedule.total_iters));
  return trace;
}

bool should_save(const Schedule& schedule, long long iteration) {
  return iteration > schedule.burn_in &&
         (iteration - schedule.burn_in) % schedule.thin == 0;
}

// Shared fitting path for the naive and non-private modes: the counts are
// taken at face value.  Bitwise identical results for identical grids.
SampleTrace fit_given_counts(const CountGrid& counts,
                             const ModelConfig& config,
                             const Schedule& schedule, const MaskSpec* mask,
                             std::uint64_t seed) {
  std::unique_ptr<FactorModel> model =
      make_model(config, counts.rows(), counts.cols());
  SampleTrace trace = make_trace_shell(*model, config, schedule, seed);

  Rng master(mix64(seed));
  model->init_from_prior(master);
  Matrix rates = model->rate_matrix();
  Matrix rate_accum = Matrix::Zero(counts.rows(), counts.cols());

  for (long long iter = 1; iter <= schedule.total_iters; ++iter) {
    model->resample(counts, mask, master);
    rates = model->rate_matrix();
    check_finite_state(*model, rates, iter);
    trace.log_joint.push_back(
        data_log_lik(counts, rates, mask, config.kind,
                     config.include_diagonal) +
        model->log_prior());
    if (should_save(schedule, iter)) {
      trace.samples.push_back(model->snapshot());
      rate_accum += rates;
    }
  }
  trace.posterior_mean_rates =
      rate_accum / static_cast<double>(trace.samples.size());
  return trace;
}

SampleTrace fit_proposed(const PrivatizedMatrix& data,
                         const ModelConfig& config, const Schedule& schedule,
                         const MaskSpec* mask, std::uint64_t seed,
                         const EngineOptions& options) {
  const CountGrid& observed = data.values;
  const double alpha = data.params.alpha;
  const Index rows = observed.rows();
  const Index cols = observed.cols();
  std::unique_ptr<FactorModel> model = make_model(config, rows, cols);
  SampleTrace trace = make_trace_shell(*model, config, schedule, seed);

  const bool diag = config.include_diagonal;
  auto cell_active = [&](Index i, Index j) {
    if (config.kind == ModelKind::mmsb && i == j && !diag) return false;
    return !(mask && mask->contains(i, j));
  };

  Rng master(mix64(seed));
  model->init_from_prior(master);
  Matrix rates = model->rate_matrix();

  AuxGrid aux;
  aux.cols = cols;
  aux.cells.assign(static_cast<std::size_t>(rows * cols), EntryAuxState{});
  CountGrid imputed = CountGrid::Zero(rows, cols);

  const int threads = options.threads > 0 ? options.threads : 1;
#if defined(_OPENMP)
#pragma omp parallel for num_threads(threads) schedule(static)
#endif
  for (Index i = 0; i < rows; ++i) {
    Rng row_rng = substream(seed, 0, static_cast<std::uint64_t>(i));
    for (Index j = 0; j < cols; ++j) {
      if (!cell_active(i, j)) continue;
      EntryAuxState& cell = aux.at(i, j);
      cell = init_entry_aux(alpha, row_rng);
      cell = entry_gibbs_sweep(observed(i, j), rates(i, j), cell, alpha,
                               row_rng);
      imputed(i, j) = cell.y_true;
    }
  }

  Matrix rate_accum = Matrix::Zero(rows, cols);
  for (long long iter = 1; iter <= schedule.total_iters; ++iter) {
#if defined(_OPENMP)
#pragma omp parallel for num_threads(threads) schedule(static)
#endif
    for (Index i = 0; i < rows; ++i) {
      Rng row_rng = substream(seed, static_cast<std::uint64_t>(iter),
                              static_cast<std::uint64_t>(i));
      for (Index j = 0; j < cols; ++j) {
        if (!cell_active(i, j)) continue;
        EntryAuxState& cell = aux.at(i, j);
        cell = entry_gibbs_sweep(observed(i, j), rates(i, j), cell, alpha,
                                 row_rng);
        imputed(i, j) = cell.y_true;
      }
    }

    model->resample(imputed, mask, master);
    rates = model->rate_matrix();
    check_finite_state(*model, rates, iter);
    trace.log_joint.push_back(
        data_log_lik(imputed, rates, mask, config.kind, diag) +
        aux_log_lik(aux, observed, mask, alpha, config.kind, diag) +
        model->log_prior());
    if (should_save(schedule, iter)) {
      trace.samples.push_back(model->snapshot());
      rate_accum += rates;
    }
  }
  trace.posterior_mean_rates =
      rate_accum / static_cast<double>(trace.samples.size());
  return trace;
}

}  // namespace

SampleTrace run(const PrivatizedMatrix& data, const ModelConfig& config,
                const Schedule& schedule, const MaskSpec* mask,
                std::uint64_t seed, const EngineOptions& options) {
  schedule.check();
  data.params.check();
  if (mask && (mask->rows != data.values.rows() ||
               mask->cols != data.values.cols())) {
    throw ConfigError("mask dimensions do not match the data");
  }
  switch (schedule.mode) {
    case FitMode::proposed:
      if (data.truncated) {
        throw ConfigError(
            "proposed mode requires an untruncated privatized matrix");
      }
      return fit_proposed(data, config, schedule, mask, seed, options);
    case FitMode::naive: {
      const CountGrid counts = data.values.cwiseMax(std::int64_t{0});
      return fit_given_counts(counts, config, schedule, mask, seed);
    }
    case FitMode::non_private:
      throw ConfigError("non_private mode requires true counts, not a "
                        "privatized matrix");
  }
  throw ConfigError("unknown fit mode");
}

SampleTrace run(const CountMatrix& data, const ModelConfig& config,
                const Schedule& schedule, const MaskSpec* mask,
                std::uint64_t seed, const EngineOptions& options) {
  (void)options;
  schedule.check();
  if (schedule.mode != FitMode::non_private) {
    throw ConfigError(to_string(schedule.mode) +
                      " mode requires a privatized matrix input");
  }
  const CountGrid counts = data.to_dense();
  if (mask && (mask->rows != counts.rows() || mask->cols != counts.cols())) {
    throw ConfigError("mask dimensions do not match the data");
  }
  return fit_given_counts(counts, config, schedule, mask, seed);
}

Matrix posterior_mean_rates(const SampleTrace& trace) {
  if (trace.samples.empty()) {
    throw DomainError("cannot average rates over an empty trace");
  }
  Matrix mean = Matrix::Zero(trace.data_rows, trace.data_cols);
  for (const FactorSample& sample : trace.samples) {
    mean += rate_matrix_from(trace.model_kind, sample);
  }
  return mean / static_cast<double>(trace.samples.size());
}

}  // namespace lppf
