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

#include "lppf/factor_models.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "lppf/errors.hpp"
#include "test_util.hpp"

using namespace lppf;

namespace {

double loop_rate_topic(const Matrix& theta, const Matrix& phi, Index d, Index v) {
  double mu = 0.0;
  for (Index k = 0; k < theta.cols(); ++k) mu += theta(d, k) * phi(k, v);
  return mu;
}

double loop_rate_mmsb(const Matrix& theta, const Matrix& pi, Index i, Index j) {
  double mu = 0.0;
  for (Index c = 0; c < theta.cols(); ++c) {
    for (Index d = 0; d < theta.cols(); ++d) {
      mu += theta(i, c) * theta(j, d) * pi(c, d);
    }
  }
  return mu;
}

}  // namespace

TEST_CASE("rate: rank-1 topic model") {
  TopicModel model(1, 1, 1, {0.1, 1.0});
  FactorSample s;
  s.theta = Matrix::Constant(1, 1, 2.0);
  s.second = Matrix::Constant(1, 1, 3.0);
  model.restore(s);
  CHECK(model.rate(0, 0) == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("rate: block-diagonal MMSB with one-hot memberships") {
  MmsbModel model(4, 2, {0.1, 1.0}, true);
  FactorSample s;
  s.theta = Matrix::Zero(4, 2);
  s.theta(0, 0) = 1.0;
  s.theta(1, 0) = 1.0;
  s.theta(2, 1) = 1.0;
  s.theta(3, 1) = 1.0;
  s.second = Matrix::Identity(2, 2);
  model.restore(s);
  for (Index i = 0; i < 4; ++i) {
    for (Index j = 0; j < 4; ++j) {
      const bool same = (i < 2) == (j < 2);
      CHECK(model.rate(i, j) == doctest::Approx(same ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("rate matches the naive summation oracle on random states") {
  Rng rng(8);
  TopicModel topic(5, 7, 3, {0.5, 1.0});
  topic.init_from_prior(rng);
  const Matrix rates = topic.rate_matrix();
  for (Index d = 0; d < 5; ++d) {
    for (Index v = 0; v < 7; ++v) {
      const double oracle = loop_rate_topic(topic.theta(), topic.second(), d, v);
      CHECK(std::abs(rates(d, v) - oracle) <= 1e-10 * std::max(1.0, oracle));
    }
  }

  MmsbModel mmsb(6, 3, {0.5, 1.0}, true);
  mmsb.init_from_prior(rng);
  const Matrix mu = mmsb.rate_matrix();
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 6; ++j) {
      const double oracle = loop_rate_mmsb(mmsb.theta(), mmsb.second(), i, j);
      CHECK(std::abs(mu(i, j) - oracle) <= 1e-10 * std::max(1.0, oracle));
    }
  }
}

TEST_CASE("MMSB rates are invariant to community relabeling") {
  Rng rng(44);
  MmsbModel model(5, 3, {0.7, 1.0}, true);
  model.init_from_prior(rng);
  const Matrix before = model.rate_matrix();

  const std::vector<Index> perm{2, 0, 1};
  FactorSample permuted;
  permuted.theta = Matrix::Zero(5, 3);
  permuted.second = Matrix::Zero(3, 3);
  for (Index c = 0; c < 3; ++c) {
    permuted.theta.col(perm[static_cast<std::size_t>(c)]) =
        model.theta().col(c);
    for (Index d = 0; d < 3; ++d) {
      permuted.second(perm[static_cast<std::size_t>(c)],
                      perm[static_cast<std::size_t>(d)]) =
          model.second()(c, d);
    }
  }
  MmsbModel relabeled(5, 3, {0.7, 1.0}, true);
  relabeled.restore(permuted);
  const Matrix after = relabeled.rate_matrix();
  CHECK((before - after).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("MaskSpec validates bounds and answers contains()") {
  CHECK_THROWS_AS(MaskSpec::from_cells(3, 3, {{3, 0}}), DomainError);
  const MaskSpec mask = MaskSpec::from_cells(3, 4, {{0, 1}, {2, 3}, {0, 1}});
  CHECK(mask.cells.size() == 2);  // duplicates collapse
  CHECK(mask.contains(0, 1));
  CHECK(mask.contains(2, 3));
  CHECK(!mask.contains(1, 1));
}

TEST_CASE("allocation conserves every cell count exactly") {
  Rng rng(3);
  TopicModel topic(4, 6, 3, {0.3, 1.0});
  topic.init_from_prior(rng);
  CountGrid counts = CountGrid::Zero(4, 6);
  counts(0, 0) = 5;
  counts(1, 3) = 17;
  counts(3, 5) = 1;
  const Allocation alloc = topic.allocate_counts(counts, nullptr, rng);
  CHECK(alloc.size() == 3);
  for (const CellAllocation& cell : alloc) {
    const long long total =
        std::accumulate(cell.parts.begin(), cell.parts.end(), 0LL);
    CHECK(total == counts(cell.row, cell.col));
  }

  MmsbModel mmsb(5, 2, {0.3, 1.0}, false);
  mmsb.init_from_prior(rng);
  CountGrid net = CountGrid::Zero(5, 5);
  net(0, 1) = 9;
  net(2, 2) = 4;  // diagonal: skipped when excluded
  net(4, 0) = 2;
  const Allocation net_alloc = mmsb.allocate_counts(net, nullptr, rng);
  CHECK(net_alloc.size() == 2);
  for (const CellAllocation& cell : net_alloc) {
    CHECK(cell.parts.size() == 4);
    const long long total =
        std::accumulate(cell.parts.begin(), cell.parts.end(), 0LL);
    CHECK(total == net(cell.row, cell.col));
    CHECK(cell.row != cell.col);
  }
}

TEST_CASE("allocation respects masks and trivial cases") {
  Rng rng(5);
  TopicModel topic(2, 2, 1, {0.3, 1.0});
  topic.init_from_prior(rng);
  CountGrid counts = CountGrid::Zero(2, 2);
  counts(0, 0) = 7;
  counts(1, 1) = 3;
  const MaskSpec mask = MaskSpec::from_cells(2, 2, {{1, 1}});
  const Allocation alloc = topic.allocate_counts(counts, &mask, rng);
  // K = 1: the whole count lands in the single component; masked cell skipped.
  CHECK(alloc.size() == 1);
  CHECK(alloc[0].row == 0);
  CHECK(alloc[0].parts == std::vector<long long>{7});

  const CountGrid zeros = CountGrid::Zero(2, 2);
  CHECK(topic.allocate_counts(zeros, nullptr, rng).empty());
}

TEST_CASE("allocation splits proportionally to the rate components") {
  Rng rng(7);
  TopicModel topic(1, 1, 2, {0.3, 1.0});
  FactorSample s;
  s.theta = Matrix::Zero(1, 2);
  s.theta << 1.0, 3.0;
  s.second = Matrix::Ones(2, 1);
  topic.restore(s);  // component weights (0.25, 0.75)
  CountGrid counts = CountGrid::Constant(1, 1, 100000);
  const Allocation alloc = topic.allocate_counts(counts, nullptr, rng);
  const double first = static_cast<double>(alloc[0].parts[0]);
  const double sd = std::sqrt(100000.0 * 0.25 * 0.75);
  CHECK(std::abs(first - 25000.0) < 3.0 * sd);
}

TEST_CASE("prior-dominated update draws factors from the exposed prior") {
  // With an all-zero allocation, theta(0,k) ~ Gamma(a0, b0 + sum_v phi(k,v)).
  Rng rng(21);
  const GammaHyper hyper{0.4, 1.2};
  TopicModel topic(1, 3, 1, hyper);
  FactorSample fixed;
  fixed.theta = Matrix::Ones(1, 1);
  fixed.second = Matrix::Ones(1, 3) * 0.7;  // exposure 3 * 0.7 = 2.1
  const double expected_mean = hyper.a0 / (hyper.b0 + 2.1);

  const int n = 20000;
  std::vector<double> draws;
  draws.reserve(n);
  for (int i = 0; i < n; ++i) {
    topic.restore(fixed);
    topic.update_factors({}, nullptr, rng);
    draws.push_back(topic.theta()(0, 0));
  }
  const double sd = std::sqrt(hyper.a0) / (hyper.b0 + 2.1);
  CHECK(std::abs(lppf_test::mean_of(draws) - expected_mean) <
        4.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("a giant count concentrates the conjugate posterior") {
  Rng rng(22);
  const GammaHyper hyper{0.1, 1.0};
  const Index V = 22;
  TopicModel topic(1, V, 1, hyper);
  FactorSample fixed;
  fixed.theta = Matrix::Ones(1, 1);
  fixed.second = Matrix::Ones(1, V);

  Allocation alloc;
  alloc.push_back({0, 0, {10000}});
  const double expected_mean =
      (hyper.a0 + 10000.0) / (hyper.b0 + static_cast<double>(V));
  const int n = 500;
  std::vector<double> draws;
  draws.reserve(n);
  for (int i = 0; i < n; ++i) {
    topic.restore(fixed);
    topic.update_factors(alloc, nullptr, rng);
    draws.push_back(topic.theta()(0, 0));
  }
  const double sd =
      std::sqrt(hyper.a0 + 10000.0) / (hyper.b0 + static_cast<double>(V));
  CHECK(std::abs(lppf_test::mean_of(draws) - expected_mean) <
        4.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("masked rows fall back to the bare prior exposure") {
  Rng rng(23);
  const GammaHyper hyper{0.5, 2.0};
  TopicModel topic(2, 3, 1, hyper);
  FactorSample fixed;
  fixed.theta = Matrix::Ones(2, 1);
  fixed.second = Matrix::Ones(1, 3);
  const MaskSpec mask =
      MaskSpec::from_cells(2, 3, {{0, 0}, {0, 1}, {0, 2}});  // doc 0 fully held out

  const int n = 20000;
  std::vector<double> draws;
  draws.reserve(n);
  for (int i = 0; i < n; ++i) {
    topic.restore(fixed);
    topic.update_factors({}, &mask, rng);
    draws.push_back(topic.theta()(0, 0));  // exposure is just b0
  }
  const double sd = std::sqrt(hyper.a0) / hyper.b0;
  CHECK(std::abs(lppf_test::mean_of(draws) - hyper.a0 / hyper.b0) <
        4.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("synthetic generation reproduces the sparse block regime") {
  // V=20, C=5, a0=0.01, b0=0.5: the zero fraction stays above 0.6.
  ModelConfig config;
  config.kind = ModelKind::mmsb;
  config.factors = 5;
  config.hyper = {0.01, 0.5};
  std::vector<double> zero_fractions;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(mix64(seed));
    const SyntheticData data = generate_synthetic(config, 20, 20, rng);
    const double nnz = static_cast<double>(data.counts.entries.size());
    zero_fractions.push_back(1.0 - nnz / 400.0);
  }
  CHECK(lppf_test::median_of(zero_fractions) >= 0.6);
}

TEST_CASE("synthetic cell means match the analytic prior moment") {
  // Topic model: E[mu_dv] = K (a0/b0)^2 and counts are Poisson around it.
  ModelConfig config;
  config.kind = ModelKind::topic;
  config.factors = 3;
  config.hyper = {1.0, 1.0};
  const double expected = 3.0;
  std::vector<double> seed_means;
  for (std::uint64_t seed = 1; seed <= 400; ++seed) {
    Rng rng(mix64(seed * 31 + 7));
    const SyntheticData data = generate_synthetic(config, 4, 5, rng);
    seed_means.push_back(static_cast<double>(data.counts.total()) / 20.0);
  }
  const double se = lppf_test::stderr_of(seed_means);
  CHECK(std::abs(lppf_test::mean_of(seed_means) - expected) < 4.0 * se);
}

TEST_CASE("generate_synthetic returns positive factors and in-bounds counts") {
  ModelConfig config;
  config.kind = ModelKind::mmsb;
  config.factors = 2;
  config.hyper = {0.5, 1.0};
  config.include_diagonal = false;
  Rng rng(9);
  const SyntheticData data = generate_synthetic(config, 6, 6, rng);
  CHECK((data.factors.theta.array() > 0.0).all());
  CHECK((data.factors.second.array() > 0.0).all());
  for (const CountEntry& e : data.counts.entries) {
    CHECK(e.row != e.col);  // diagonal excluded
  }
}

TEST_CASE("make_model validates shapes") {
  ModelConfig config;
  config.kind = ModelKind::mmsb;
  config.factors = 2;
  CHECK_THROWS_AS(make_model(config, 4, 5), DomainError);
  config.kind = ModelKind::topic;
  CHECK_NOTHROW(make_model(config, 4, 5));
}
