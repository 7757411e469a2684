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

#ifndef LPPF_EVALUATION_HPP_
#define LPPF_EVALUATION_HPP_

#include <utility>
#include <vector>

#include "lppf/count_matrix.hpp"
#include "lppf/factor_models.hpp"
#include "lppf/mcmc_engine.hpp"

namespace lppf {

// Per topic, the indices of the `top` highest-weight words from one sampled
// topic vector; ties break toward the lower index.
struct TopicTopWords {
  std::vector<std::vector<Index>> words;  // one list per topic
};

TopicTopWords top_words(const Matrix& phi, int top = 10);

// Mean absolute error of the rate estimate over the given cells.
double mae(const Matrix& mu_hat, const CountMatrix& y_true,
           const std::vector<std::pair<Index, Index>>& cells);
double mae_all_cells(const Matrix& mu_hat, const CountMatrix& y_true);

// Document-frequency statistics of a reference corpus (documents = rows).
class DocumentFrequencies {
 public:
  explicit DocumentFrequencies(const CountMatrix& reference);
  Index n_docs() const { return n_docs_; }
  long long doc_freq(Index word) const;
  long long joint_doc_freq(Index v, Index w) const;

 private:
  Index n_docs_;
  Index n_words_;
  std::vector<std::vector<std::uint64_t>> bits_;  // per word, packed doc set
  std::vector<long long> counts_;
};

// Normalized pointwise mutual information over the word pairs of each
// topic's top list, averaged over pairs.  Probabilities are document-level
// with add-one smoothing, p(x) = (D(x)+1)/(D+1), so missing reference words
// never yield NaN.
std::vector<double> npmi_per_topic(const TopicTopWords& tops,
                                   const DocumentFrequencies& reference);
double npmi(const TopicTopWords& tops, const DocumentFrequencies& reference);

// Mimno-style coherence: sum over ordered pairs of
// log((D(v_m, v_l)+1)/D(v_l)) with words in descending-weight order.  Words
// absent from the reference are skipped.
std::vector<double> coherence_per_topic(const TopicTopWords& tops,
                                        const DocumentFrequencies& reference);
double coherence(const TopicTopWords& tops,
                 const DocumentFrequencies& reference);

// Metric of a trace against a reference corpus: per saved sample, extract
// top words and score per topic; values are averaged across samples, then
// the mean is taken across topics.
struct TopicMetricReport {
  std::vector<double> per_topic;
  double mean = 0.0;
};
TopicMetricReport npmi_of_trace(const SampleTrace& trace,
                                const CountMatrix& reference, int top = 10);
TopicMetricReport coherence_of_trace(const SampleTrace& trace,
                                     const CountMatrix& reference,
                                     int top = 10);

// Cells (i, j) where i is among the top_k row sums or j among the top_k
// column sums; ties break toward the lower index.
MaskSpec heldout_mask_top_senders(const CountMatrix& counts, int top_k);

}  // namespace lppf

#endif  // LPPF_EVALUATION_HPP_
