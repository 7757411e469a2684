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

#ifndef LPPF_MCMC_ENGINE_HPP_
#define LPPF_MCMC_ENGINE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lppf/count_matrix.hpp"
#include "lppf/factor_models.hpp"
#include "lppf/privacy.hpp"

namespace lppf {

enum class FitMode { proposed, naive, non_private };

std::string to_string(FitMode mode);
FitMode fit_mode_from_string(const std::string& name);

struct Schedule {
  long long total_iters = 1000;
  long long burn_in = 500;
  long long thin = 10;
  FitMode mode = FitMode::proposed;

  // burn_in < total_iters, thin >= 1, and at least one saved sample.
  void check() const;
};

long long saved_sample_count(const Schedule& schedule);

struct SampleTrace {
  ModelKind model_kind = ModelKind::topic;
  Index data_rows = 0;
  Index data_cols = 0;
  int factors = 0;
  bool include_diagonal = true;
  Schedule schedule;
  std::uint64_t seed = 0;
  std::vector<FactorSample> samples;   // thinned post-burn-in draws
  Matrix posterior_mean_rates;         // mean of per-sample rate matrices
  std::vector<double> log_joint;       // one value per iteration
};

struct EngineOptions {
  int threads = 1;  // results are identical for every thread count
};

// Locally private fit (mode proposed: noise-inversion sweeps interleaved
// with factor updates) or the naive baseline (mode naive: truncates the
// privatized values and fits them as if they were true counts).
SampleTrace run(const PrivatizedMatrix& data, const ModelConfig& config,
                const Schedule& schedule, const MaskSpec* mask,
                std::uint64_t seed, const EngineOptions& options = {});

// Non-private fit conditioned on the true counts.
SampleTrace run(const CountMatrix& data, const ModelConfig& config,
                const Schedule& schedule, const MaskSpec* mask,
                std::uint64_t seed, const EngineOptions& options = {});

// Recomputes the posterior-mean rates from the stored samples.
Matrix posterior_mean_rates(const SampleTrace& trace);

}  // namespace lppf

#endif  // LPPF_MCMC_ENGINE_HPP_
