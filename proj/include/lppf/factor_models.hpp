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

#ifndef LPPF_FACTOR_MODELS_HPP_
#define LPPF_FACTOR_MODELS_HPP_

#include <memory>
#include <utility>
#include <vector>

#include "lppf/count_matrix.hpp"
#include "lppf/rng.hpp"

namespace lppf {

enum class ModelKind { topic, mmsb };

struct GammaHyper {
  double a0 = 0.1;  // shape
  double b0 = 1.0;  // rate
};

// Held-out cells, excluded from all allocation and update sums.
struct MaskSpec {
  Index rows = 0;
  Index cols = 0;
  std::vector<std::pair<Index, Index>> cells;  // sorted, unique

  static MaskSpec from_cells(Index rows, Index cols,
                             std::vector<std::pair<Index, Index>> cells);
  bool contains(Index i, Index j) const {
    return !bits_.empty() && bits_[static_cast<std::size_t>(i * cols + j)] != 0;
  }
  bool empty() const { return cells.empty(); }

 private:
  std::vector<std::uint8_t> bits_;
};

// Latent sub-counts for one cell; parts sum to the cell count exactly.
// Length K for the topic model, C*C (sender-major) for the block model.
struct CellAllocation {
  Index row = 0;
  Index col = 0;
  std::vector<long long> parts;
};
using Allocation = std::vector<CellAllocation>;

// One saved draw of the latent factors: theta plus phi (topic) or pi (mmsb).
struct FactorSample {
  Matrix theta;
  Matrix second;
};

struct ModelConfig {
  ModelKind kind = ModelKind::topic;
  int factors = 10;  // K topics or C communities
  GammaHyper hyper;
  bool include_diagonal = true;  // block model only
};

class FactorModel {
 public:
  virtual ~FactorModel() = default;

  virtual ModelKind kind() const = 0;
  virtual Index data_rows() const = 0;
  virtual Index data_cols() const = 0;

  virtual double rate(Index i, Index j) const = 0;
  virtual Matrix rate_matrix() const = 0;

  virtual void init_from_prior(Rng& rng) = 0;

  // Splits each positive unmasked count into latent parts via a multinomial
  // proportional to the rate components.
  virtual Allocation allocate_counts(const CountGrid& counts,
                                     const MaskSpec* mask, Rng& rng) const = 0;

  // Gamma conjugate updates given the allocation.
  virtual void update_factors(const Allocation& allocation,
                              const MaskSpec* mask, Rng& rng) = 0;

  void resample(const CountGrid& counts, const MaskSpec* mask, Rng& rng) {
    update_factors(allocate_counts(counts, mask, rng), mask, rng);
  }

  // Forward data generation y_ij ~ Pois(rate(i, j)).
  virtual CountGrid sample_counts(Rng& rng) const = 0;

  virtual double log_prior() const = 0;

  virtual FactorSample snapshot() const = 0;
  virtual void restore(const FactorSample& sample) = 0;

  virtual const Matrix& theta() const = 0;
  virtual const Matrix& second() const = 0;
};

// Gamma-Poisson topic model: rate(d, v) = sum_k theta(d,k) phi(k,v).
class TopicModel : public FactorModel {
 public:
  TopicModel(Index docs, Index vocab, int topics, GammaHyper hyper);

  ModelKind kind() const override { return ModelKind::topic; }
  Index data_rows() const override { return theta_.rows(); }
  Index data_cols() const override { return phi_.cols(); }
  double rate(Index d, Index v) const override;
  Matrix rate_matrix() const override;
  void init_from_prior(Rng& rng) override;
  Allocation allocate_counts(const CountGrid& counts, const MaskSpec* mask,
                             Rng& rng) const override;
  void update_factors(const Allocation& allocation, const MaskSpec* mask,
                      Rng& rng) override;
  CountGrid sample_counts(Rng& rng) const override;
  double log_prior() const override;
  FactorSample snapshot() const override;
  void restore(const FactorSample& sample) override;
  const Matrix& theta() const override { return theta_; }
  const Matrix& second() const override { return phi_; }

 private:
  Matrix theta_;  // D x K
  Matrix phi_;    // K x V
  GammaHyper hyper_;
};

// Mixed-membership stochastic block model:
// rate(i, j) = sum_{c,d} theta(i,c) theta(j,d) pi(c,d).
//
// With the diagonal excluded every conditional is exactly conjugate.  With
// the diagonal included, the theta update linearizes the i=j, c=d term by
// holding the opposite-side factor fixed: the (i,i) cell contributes its
// (c,c) allocation once and exposure theta(i,c) pi(c,c); this is a
// documented approximation, not exact Gibbs.
class MmsbModel : public FactorModel {
 public:
  MmsbModel(Index actors, int communities, GammaHyper hyper,
            bool include_diagonal);

  ModelKind kind() const override { return ModelKind::mmsb; }
  Index data_rows() const override { return theta_.rows(); }
  Index data_cols() const override { return theta_.rows(); }
  double rate(Index i, Index j) const override;
  Matrix rate_matrix() const override;
  void init_from_prior(Rng& rng) override;
  Allocation allocate_counts(const CountGrid& counts, const MaskSpec* mask,
                             Rng& rng) const override;
  void update_factors(const Allocation& allocation, const MaskSpec* mask,
                      Rng& rng) override;
  CountGrid sample_counts(Rng& rng) const override;
  double log_prior() const override;
  FactorSample snapshot() const override;
  void restore(const FactorSample& sample) override;
  const Matrix& theta() const override { return theta_; }
  const Matrix& second() const override { return pi_; }
  bool include_diagonal() const { return include_diagonal_; }

 private:
  Matrix theta_;  // V x C
  Matrix pi_;     // C x C
  GammaHyper hyper_;
  bool include_diagonal_;
};

// rows/cols are the data dimensions; the block model requires rows == cols.
std::unique_ptr<FactorModel> make_model(const ModelConfig& config, Index rows,
                                        Index cols);

// Rates implied by a stored factor sample, without a model object.
Matrix rate_matrix_from(ModelKind kind, const FactorSample& sample);

struct SyntheticData {
  FactorSample factors;
  CountMatrix counts;
};

// Draws true factors from the prior, then counts from the model.
SyntheticData generate_synthetic(const ModelConfig& config, Index rows,
                                 Index cols, Rng& rng);

}  // namespace lppf

#endif  // LPPF_FACTOR_MODELS_HPP_
