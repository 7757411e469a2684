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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "lppf/errors.hpp"
#include "test_util.hpp"

using namespace lppf;

namespace {

PrivatizedMatrix make_privatized(const CountMatrix& counts, double alpha,
                                 std::uint64_t seed) {
  const PrivacyParams params = PrivacyParams::from_precision_alpha(1, alpha);
  Rng rng(mix64(seed));
  PrivatizedMatrix out = privatize(counts, params, rng);
  out.seed = seed;
  return out;
}

CountMatrix tiny_network(std::uint64_t seed) {
  ModelConfig config;
  config.kind = ModelKind::mmsb;
  config.factors = 2;
  config.hyper = {0.3, 0.7};
  Rng rng(mix64(seed));
  return generate_synthetic(config, 8, 8, rng).counts;
}

bool traces_equal(const SampleTrace& a, const SampleTrace& b) {
  if (a.samples.size() != b.samples.size()) return false;
  for (std::size_t s = 0; s < a.samples.size(); ++s) {
    if (a.samples[s].theta != b.samples[s].theta) return false;
    if (a.samples[s].second != b.samples[s].second) return false;
  }
  if (a.posterior_mean_rates != b.posterior_mean_rates) return false;
  return a.log_joint == b.log_joint;
}

}  // namespace

TEST_CASE("schedule sample counts and validation") {
  CHECK(saved_sample_count({7500, 2500, 100, FitMode::proposed}) == 50);
  CHECK(saved_sample_count({8500, 1000, 25, FitMode::proposed}) == 300);

  CHECK_THROWS_AS((Schedule{100, 100, 1, FitMode::naive}).check(), ConfigError);
  CHECK_THROWS_AS((Schedule{100, 10, 0, FitMode::naive}).check(), ConfigError);
  CHECK_THROWS_AS((Schedule{100, 95, 10, FitMode::naive}).check(), ConfigError);
  CHECK_NOTHROW((Schedule{100, 50, 10, FitMode::naive}).check());
}

TEST_CASE("mode/data compatibility is enforced") {
  const CountMatrix counts = tiny_network(1);
  const PrivatizedMatrix privatized = make_privatized(counts, 0.5, 2);
  ModelConfig config;
  config.kind = ModelKind::mmsb;
  config.factors = 2;
  const Schedule proposed{40, 10, 5, FitMode::proposed};
  const Schedule non_private{40, 10, 5, FitMode::non_private};

  CHECK_THROWS_AS(run(truncate(privatized), config, proposed, nullptr, 3),
                  ConfigError);
  CHECK_THROWS_AS(run(privatized, config, non_private, nullptr, 3), ConfigError);
  CHECK_THROWS_AS(run(counts, config, proposed, nullptr, 3), ConfigError);
}

TEST_CASE("identical seeds give bitwise-identical traces") {
  const CountMatrix counts = tiny_network(4);
  const PrivatizedMatrix privatized = make_privatized(counts, 0.5, 5);
  ModelConfig config;
  config.kind = ModelKind::mmsb;
  config.factors = 2;
  const Schedule schedule{60, 20, 4, FitMode::proposed};

  const SampleTrace a = run(privatized, config, schedule, nullptr, 11);
  const SampleTrace b = run(privatized, config, schedule, nullptr, 11);
  CHECK(traces_equal(a, b));
  CHECK(a.samples.size() == 10);

  const SampleTrace c = run(privatized, config, schedule, nullptr, 12);
  CHECK(!traces_equal(a, c));
}

TEST_CASE("thread count does not change the trace") {
  const CountMatrix counts = tiny_network(6);
  const PrivatizedMatrix privatized = make_privatized(counts, 0.5, 7);
  ModelConfig config;
  config.kind = ModelKind::mmsb;
  config.factors = 2;
  const Schedule schedule{50, 10, 5, FitMode::proposed};

  EngineOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const SampleTrace a = run(privatized, config, schedule, nullptr, 21, one);
  const SampleTrace b = run(privatized, config, schedule, nullptr, 21, four);
  CHECK(traces_equal(a, b));
}

TEST_CASE("naive on nonnegative data equals non_private on the same values") {
  const CountMatrix counts = tiny_network(8);
  PrivatizedMatrix as_privatized;
  as_privatized.params = PrivacyParams::from_precision_alpha(1, 0.5);
  as_privatized.values = counts.to_dense();  // all nonnegative: truncation no-op
  ModelConfig config;
  config.kind = ModelKind::mmsb;
  config.factors = 2;

  const SampleTrace naive =
      run(as_privatized, config, {60, 20, 4, FitMode::naive}, nullptr, 31);
  const SampleTrace nonpriv =
      run(counts, config, {60, 20, 4, FitMode::non_private}, nullptr, 31);
  CHECK(traces_equal(naive, nonpriv));
}

TEST_CASE("posterior mean rates recompute from the stored samples") {
  const CountMatrix counts = tiny_network(9);
  ModelConfig config;
  config.kind = ModelKind::mmsb;
  config.factors = 2;
  const SampleTrace trace =
      run(counts, config, {80, 20, 10, FitMode::non_private}, nullptr, 41);
  CHECK(trace.samples.size() == 6);
  const Matrix recomputed = posterior_mean_rates(trace);
  CHECK((recomputed - trace.posterior_mean_rates).cwiseAbs().maxCoeff() < 1e-10);

  SampleTrace empty = trace;
  empty.samples.clear();
  CHECK_THROWS_AS(posterior_mean_rates(empty), DomainError);

  // Two hand-built samples average exactly.
  SampleTrace two;
  two.model_kind = ModelKind::topic;
  two.data_rows = 1;
  two.data_cols = 1;
  two.factors = 1;
  FactorSample s1{Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 2.0)};
  FactorSample s2{Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 2.0)};
  two.samples = {s1, s2};
  CHECK(posterior_mean_rates(two)(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("log joint is finite and trends upward through burn-in") {
  // Well-specified synthetic data; the burn-in median must not decrease.
  ModelConfig config;
  config.kind = ModelKind::topic;
  config.factors = 3;
  config.hyper = {0.5, 1.0};
  Rng rng(mix64(77));
  const SyntheticData data = generate_synthetic(config, 20, 30, rng);
  const Schedule schedule{400, 200, 20, FitMode::non_private};
  const SampleTrace trace = run(data.counts, config, schedule, nullptr, 51);

  std::vector<double> head, tail;
  for (long long i = 0; i < 50; ++i) {
    head.push_back(trace.log_joint[static_cast<std::size_t>(i)]);
    tail.push_back(
        trace.log_joint[static_cast<std::size_t>(schedule.burn_in - 50 + i)]);
  }
  for (double lj : trace.log_joint) CHECK(std::isfinite(lj));
  CHECK(lppf_test::median_of(tail) >= lppf_test::median_of(head) - 1e-9);
}

TEST_CASE("proposed mode runs with a mask and fills masked rates") {
  const CountMatrix counts = tiny_network(10);
  const PrivatizedMatrix privatized = make_privatized(counts, 0.5, 13);
  const MaskSpec mask = MaskSpec::from_cells(8, 8, {{0, 0}, {0, 1}, {3, 4}});
  ModelConfig config;
  config.kind = ModelKind::mmsb;
  config.factors = 2;
  const SampleTrace trace =
      run(privatized, config, {60, 20, 4, FitMode::proposed}, &mask, 61);
  CHECK(trace.posterior_mean_rates.allFinite());
  CHECK(trace.posterior_mean_rates(0, 0) > 0.0);  // computable from factors
}

TEST_CASE("mask dimension mismatch is rejected") {
  const CountMatrix counts = tiny_network(11);
  const MaskSpec mask = MaskSpec::from_cells(5, 5, {{0, 0}});
  ModelConfig config;
  config.kind = ModelKind::mmsb;
  config.factors = 2;
  CHECK_THROWS_AS(
      run(counts, config, {40, 10, 5, FitMode::non_private}, &mask, 71),
      ConfigError);
}
