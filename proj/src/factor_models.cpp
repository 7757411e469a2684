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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lppf/distributions.hpp"
#include "lppf/errors.hpp"

namespace lppf {

namespace {

void check_hyper(const GammaHyper& h) {
  if (!(h.a0 > 0.0) || !(h.b0 > 0.0)) {
    throw DomainError("gamma hyperparameters must be positive");
  }
}

// Gamma draw conditioned on being strictly positive.  Exact zeros occur
// with small shapes when u^(1/shape) underflows; the event has probability
// zero in exact arithmetic.
double positive_gamma(double shape, double rate, Rng& rng) {
  for (;;) {
    const double x = gamma_sample(shape, rate, rng);
    if (x > 0.0) return x;
  }
}

// Multinomial split of `count` over `linear` weights, recomputing in log
// space when every linear weight underflowed to zero.
std::vector<long long> split_count(long long count,
                                   std::span<const double> linear,
                                   std::span<const double> log_weights,
                                   Rng& rng) {
  double sum = 0.0;
  for (double w : linear) sum += w;
  if (sum > 0.0 && std::isfinite(sum)) {
    return multinomial_sample(count, linear, rng);
  }
  double max_log = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) max_log = std::max(max_log, lw);
  if (max_log == -std::numeric_limits<double>::infinity()) {
    throw DomainError("zero total rate at a cell with a positive count");
  }
  std::vector<double> scaled(log_weights.size());
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    scaled[i] = std::exp(log_weights[i] - max_log);
  }
  return multinomial_sample(count, scaled, rng);
}

}  // namespace

MaskSpec MaskSpec::from_cells(Index rows, Index cols,
                              std::vector<std::pair<Index, Index>> cells) {
  if (rows <= 0 || cols <= 0) {
    throw DomainError("mask dimensions must be positive");
  }
  for (const auto& [i, j] : cells) {
    if (i < 0 || i >= rows || j < 0 || j >= cols) {
      throw DomainError("mask cell (" + std::to_string(i) + "," +
                        std::to_string(j) + ") out of bounds");
    }
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  MaskSpec mask;
  mask.rows = rows;
  mask.cols = cols;
  mask.cells = std::move(cells);
  mask.bits_.assign(static_cast<std::size_t>(rows * cols), 0);
  for (const auto& [i, j] : mask.cells) {
    mask.bits_[static_cast<std::size_t>(i * cols + j)] = 1;
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Topic model
// ---------------------------------------------------------------------------

TopicModel::TopicModel(Index docs, Index vocab, int topics, GammaHyper hyper)
    : theta_(Matrix::Zero(docs, topics)),
      phi_(Matrix::Zero(topics, vocab)),
      hyper_(hyper) {
  if (docs <= 0 || vocab <= 0 || topics <= 0) {
    throw DomainError("topic model dimensions must be positive");
  }
  check_hyper(hyper);
}

double TopicModel::rate(Index d, Index v) const {
  return theta_.row(d).dot(phi_.col(v));
}

Matrix TopicModel::rate_matrix() const { return theta_ * phi_; }

void TopicModel::init_from_prior(Rng& rng) {
  for (Index d = 0; d < theta_.rows(); ++d) {
    for (Index k = 0; k < theta_.cols(); ++k) {
      theta_(d, k) = positive_gamma(hyper_.a0, hyper_.b0, rng);
    }
  }
  for (Index k = 0; k < phi_.rows(); ++k) {
    for (Index v = 0; v < phi_.cols(); ++v) {
      phi_(k, v) = positive_gamma(hyper_.a0, hyper_.b0, rng);
    }
  }
}

Allocation TopicModel::allocate_counts(const CountGrid& counts,
                                       const MaskSpec* mask, Rng& rng) const {
  if (counts.rows() != data_rows() || counts.cols() != data_cols()) {
    throw DomainError("allocation: count grid does not match model dims");
  }
  const Index K = theta_.cols();
  Allocation allocation;
  std::vector<double> weights(static_cast<std::size_t>(K));
  std::vector<double> log_weights(static_cast<std::size_t>(K));
  for (Index d = 0; d < counts.rows(); ++d) {
    for (Index v = 0; v < counts.cols(); ++v) {
      const long long y = counts(d, v);
      if (y == 0) continue;
      if (y < 0) throw DomainError("allocation: negative count");
      if (mask && mask->contains(d, v)) continue;
      for (Index k = 0; k < K; ++k) {
        const double t = theta_(d, k);
        const double p = phi_(k, v);
        weights[static_cast<std::size_t>(k)] = t * p;
        log_weights[static_cast<std::size_t>(k)] = std::log(t) + std::log(p);
      }
      allocation.push_back({d, v, split_count(y, weights, log_weights, rng)});
    }
  }
  return allocation;
}

void TopicModel::update_factors(const Allocation& allocation,
                                const MaskSpec* mask, Rng& rng) {
  const Index D = theta_.rows();
  const Index K = theta_.cols();
  const Index V = phi_.cols();

  Matrix doc_counts = Matrix::Zero(D, K);
  Matrix word_counts = Matrix::Zero(K, V);
  for (const CellAllocation& cell : allocation) {
    for (Index k = 0; k < K; ++k) {
      const double c = static_cast<double>(cell.parts[static_cast<std::size_t>(k)]);
      doc_counts(cell.row, k) += c;
      word_counts(k, cell.col) += c;
    }
  }

  // theta | phi, allocation
  const Eigen::VectorXd phi_row_sums = phi_.rowwise().sum();
  for (Index d = 0; d < D; ++d) {
    Eigen::VectorXd exposure = phi_row_sums;
    if (mask) {
      for (Index v = 0; v < V; ++v) {
        if (mask->contains(d, v)) exposure -= phi_.col(v);
      }
    }
    for (Index k = 0; k < K; ++k) {
      theta_(d, k) = positive_gamma(hyper_.a0 + doc_counts(d, k),
                                    hyper_.b0 + exposure(k), rng);
    }
  }

  // phi | theta, allocation (theta already updated this sweep)
  const Eigen::RowVectorXd theta_col_sums = theta_.colwise().sum();
  for (Index v = 0; v < V; ++v) {
    Eigen::RowVectorXd exposure = theta_col_sums;
    if (mask) {
      for (Index d = 0; d < D; ++d) {
        if (mask->contains(d, v)) exposure -= theta_.row(d);
      }
    }
    for (Index k = 0; k < K; ++k) {
      phi_(k, v) = positive_gamma(hyper_.a0 + word_counts(k, v),
                                  hyper_.b0 + exposure(k), rng);
    }
  }
}

CountGrid TopicModel::sample_counts(Rng& rng) const {
  CountGrid counts(data_rows(), data_cols());
  const Matrix rates = rate_matrix();
  for (Index d = 0; d < counts.rows(); ++d) {
    for (Index v = 0; v < counts.cols(); ++v) {
      counts(d, v) = poisson_sample(rates(d, v), rng);
    }
  }
  return counts;
}

double TopicModel::log_prior() const {
  double lp = 0.0;
  for (Index d = 0; d < theta_.rows(); ++d) {
    for (Index k = 0; k < theta_.cols(); ++k) {
      lp += gamma_log_pdf(theta_(d, k), hyper_.a0, hyper_.b0);
    }
  }
  for (Index k = 0; k < phi_.rows(); ++k) {
    for (Index v = 0; v < phi_.cols(); ++v) {
      lp += gamma_log_pdf(phi_(k, v), hyper_.a0, hyper_.b0);
    }
  }
  return lp;
}

FactorSample TopicModel::snapshot() const { return {theta_, phi_}; }

void TopicModel::restore(const FactorSample& sample) {
  if (sample.theta.rows() != theta_.rows() ||
      sample.theta.cols() != theta_.cols() ||
      sample.second.rows() != phi_.rows() ||
      sample.second.cols() != phi_.cols()) {
    throw DomainError("restore: factor sample dims do not match model");
  }
  theta_ = sample.theta;
  phi_ = sample.second;
}

// ---------------------------------------------------------------------------
// Block model
// ---------------------------------------------------------------------------

MmsbModel::MmsbModel(Index actors, int communities, GammaHyper hyper,
                     bool include_diagonal)
    : theta_(Matrix::Zero(actors, communities)),
      pi_(Matrix::Zero(communities, communities)),
      hyper_(hyper),
      include_diagonal_(include_diagonal) {
  if (actors <= 0 || communities <= 0) {
    throw DomainError("block model dimensions must be positive");
  }
  check_hyper(hyper);
}

double MmsbModel::rate(Index i, Index j) const {
  return theta_.row(i) * pi_ * theta_.row(j).transpose();
}

Matrix MmsbModel::rate_matrix() const {
  return theta_ * pi_ * theta_.transpose();
}

void MmsbModel::init_from_prior(Rng& rng) {
  for (Index i = 0; i < theta_.rows(); ++i) {
    for (Index c = 0; c < theta_.cols(); ++c) {
      theta_(i, c) = positive_gamma(hyper_.a0, hyper_.b0, rng);
    }
  }
  for (Index c = 0; c < pi_.rows(); ++c) {
    for (Index d = 0; d < pi_.cols(); ++d) {
      pi_(c, d) = positive_gamma(hyper_.a0, hyper_.b0, rng);
    }
  }
}

Allocation MmsbModel::allocate_counts(const CountGrid& counts,
                                      const MaskSpec* mask, Rng& rng) const {
  if (counts.rows() != data_rows() || counts.cols() != data_cols()) {
    throw DomainError("allocation: count grid does not match model dims");
  }
  const Index C = theta_.cols();
  Allocation allocation;
  std::vector<double> weights(static_cast<std::size_t>(C * C));
  std::vector<double> log_weights(static_cast<std::size_t>(C * C));
  for (Index i = 0; i < counts.rows(); ++i) {
    for (Index j = 0; j < counts.cols(); ++j) {
      if (i == j && !include_diagonal_) continue;
      const long long y = counts(i, j);
      if (y == 0) continue;
      if (y < 0) throw DomainError("allocation: negative count");
      if (mask && mask->contains(i, j)) continue;
      for (Index c = 0; c < C; ++c) {
        for (Index d = 0; d < C; ++d) {
          const std::size_t idx = static_cast<std::size_t>(c * C + d);
          weights[idx] = theta_(i, c) * theta_(j, d) * pi_(c, d);
          log_weights[idx] = std::log(theta_(i, c)) + std::log(theta_(j, d)) +
                             std::log(pi_(c, d));
        }
      }
      allocation.push_back({i, j, split_count(y, weights, log_weights, rng)});
    }
  }
  return allocation;
}

void MmsbModel::update_factors(const Allocation& allocation,
                               const MaskSpec* mask, Rng& rng) {
  const Index V = theta_.rows();
  const Index C = theta_.cols();

  // send(i, c) = sum_{j,d} y_ijcd; recv(j, d) = sum_{i,c} y_ijcd;
  // diag_cc(i, c) = y_iicc (counted in both send and recv).
  Matrix send = Matrix::Zero(V, C);
  Matrix recv = Matrix::Zero(V, C);
  Matrix diag_cc = Matrix::Zero(V, C);
  Matrix pair_counts = Matrix::Zero(C, C);
  for (const CellAllocation& cell : allocation) {
    for (Index c = 0; c < C; ++c) {
      for (Index d = 0; d < C; ++d) {
        const double y =
            static_cast<double>(cell.parts[static_cast<std::size_t>(c * C + d)]);
        send(cell.row, c) += y;
        recv(cell.col, d) += y;
        pair_counts(c, d) += y;
        if (cell.row == cell.col && c == d) diag_cc(cell.row, c) += y;
      }
    }
  }

  auto masked = [&](Index i, Index j) { return mask && mask->contains(i, j); };

  // Sequential theta update; exposures always read the current theta.
  for (Index i = 0; i < V; ++i) {
    for (Index c = 0; c < C; ++c) {
      double shape = hyper_.a0 + send(i, c) + recv(i, c) - diag_cc(i, c);
      double exposure = hyper_.b0;
      for (Index j = 0; j < V; ++j) {
        if (j == i) continue;
        const bool out_ok = !masked(i, j);
        const bool in_ok = !masked(j, i);
        if (!out_ok && !in_ok) continue;
        for (Index d = 0; d < C; ++d) {
          double w = 0.0;
          if (out_ok) w += pi_(c, d);
          if (in_ok) w += pi_(d, c);
          exposure += theta_(j, d) * w;
        }
      }
      if (include_diagonal_ && !masked(i, i)) {
        for (Index d = 0; d < C; ++d) {
          if (d == c) continue;
          exposure += theta_(i, d) * (pi_(c, d) + pi_(d, c));
        }
        exposure += theta_(i, c) * pi_(c, c);
      }
      theta_(i, c) = positive_gamma(shape, exposure, rng);
    }
  }

  // pi | theta, allocation (exactly conjugate).
  for (Index c = 0; c < C; ++c) {
    for (Index d = 0; d < C; ++d) {
      double exposure = hyper_.b0;
      for (Index i = 0; i < V; ++i) {
        for (Index j = 0; j < V; ++j) {
          if (i == j && !include_diagonal_) continue;
          if (masked(i, j)) continue;
          exposure += theta_(i, c) * theta_(j, d);
        }
      }
      pi_(c, d) = positive_gamma(hyper_.a0 + pair_counts(c, d), exposure, rng);
    }
  }
}

CountGrid MmsbModel::sample_counts(Rng& rng) const {
  const Index V = data_rows();
  CountGrid counts = CountGrid::Zero(V, V);
  const Matrix rates = rate_matrix();
  for (Index i = 0; i < V; ++i) {
    for (Index j = 0; j < V; ++j) {
      if (i == j && !include_diagonal_) continue;
      counts(i, j) = poisson_sample(rates(i, j), rng);
    }
  }
  return counts;
}

double MmsbModel::log_prior() const {
  double lp = 0.0;
  for (Index i = 0; i < theta_.rows(); ++i) {
    for (Index c = 0; c < theta_.cols(); ++c) {
      lp += gamma_log_pdf(theta_(i, c), hyper_.a0, hyper_.b0);
    }
  }
  for (Index c = 0; c < pi_.rows(); ++c) {
    for (Index d = 0; d < pi_.cols(); ++d) {
      lp += gamma_log_pdf(pi_(c, d), hyper_.a0, hyper_.b0);
    }
  }
  return lp;
}

FactorSample MmsbModel::snapshot() const { return {theta_, pi_}; }

void MmsbModel::restore(const FactorSample& sample) {
  if (sample.theta.rows() != theta_.rows() ||
      sample.theta.cols() != theta_.cols() ||
      sample.second.rows() != pi_.rows() ||
      sample.second.cols() != pi_.cols()) {
    throw DomainError("restore: factor sample dims do not match model");
  }
  theta_ = sample.theta;
  pi_ = sample.second;
}

// ---------------------------------------------------------------------------

std::unique_ptr<FactorModel> make_model(const ModelConfig& config, Index rows,
                                        Index cols) {
  switch (config.kind) {
    case ModelKind::topic:
      return std::make_unique<TopicModel>(rows, cols, config.factors,
                                          config.hyper);
    case ModelKind::mmsb:
      if (rows != cols) {
        throw DomainError("block model requires a square count matrix");
      }
      return std::make_unique<MmsbModel>(rows, config.factors, config.hyper,
                                         config.include_diagonal);
  }
  throw DomainError("unknown model kind");
}

Matrix rate_matrix_from(ModelKind kind, const FactorSample& sample) {
  switch (kind) {
    case ModelKind::topic:
      return sample.theta * sample.second;
    case ModelKind::mmsb:
      return sample.theta * sample.second * sample.theta.transpose();
  }
  throw DomainError("unknown model kind");
}

SyntheticData generate_synthetic(const ModelConfig& config, Index rows,
                                 Index cols, Rng& rng) {
  std::unique_ptr<FactorModel> model = make_model(config, rows, cols);
  model->init_from_prior(rng);
  SyntheticData out;
  out.factors = model->snapshot();
  out.counts = count_matrix_from_dense(model->sample_counts(rng));
  return out;
}

}  // namespace lppf
