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

#include "lppf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lppf/errors.hpp"

namespace lppf {

TopicTopWords top_words(const Matrix& phi, int top) {
  if (top < 1) throw DomainError("top must be >= 1");
  if (phi.cols() < top) {
    throw DomainError("vocabulary smaller than the requested top " +
                      std::to_string(top));
  }
  TopicTopWords out;
  out.words.reserve(static_cast<std::size_t>(phi.rows()));
  std::vector<Index> order(static_cast<std::size_t>(phi.cols()));
  for (Index k = 0; k < phi.rows(); ++k) {
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      if (phi(k, a) != phi(k, b)) return phi(k, a) > phi(k, b);
      return a < b;
    });
    out.words.emplace_back(order.begin(), order.begin() + top);
  }
  return out;
}

double mae(const Matrix& mu_hat, const CountMatrix& y_true,
           const std::vector<std::pair<Index, Index>>& cells) {
  if (cells.empty()) throw DomainError("MAE over an empty cell set");
  if (mu_hat.rows() != y_true.n_rows || mu_hat.cols() != y_true.n_cols) {
    throw DomainError("MAE: estimate and reference dimensions differ");
  }
  const CountGrid dense = y_true.to_dense();
  double total = 0.0;
  for (const auto& [i, j] : cells) {
    if (i < 0 || i >= mu_hat.rows() || j < 0 || j >= mu_hat.cols()) {
      throw DomainError("MAE: cell out of bounds");
    }
    total += std::abs(mu_hat(i, j) - static_cast<double>(dense(i, j)));
  }
  return total / static_cast<double>(cells.size());
}

double mae_all_cells(const Matrix& mu_hat, const CountMatrix& y_true) {
  std::vector<std::pair<Index, Index>> cells;
  cells.reserve(static_cast<std::size_t>(y_true.n_rows * y_true.n_cols));
  for (Index i = 0; i < y_true.n_rows; ++i) {
    for (Index j = 0; j < y_true.n_cols; ++j) cells.emplace_back(i, j);
  }
  return mae(mu_hat, y_true, cells);
}

DocumentFrequencies::DocumentFrequencies(const CountMatrix& reference)
    : n_docs_(reference.n_rows), n_words_(reference.n_cols) {
  const std::size_t words = static_cast<std::size_t>(n_words_);
  const std::size_t blocks = static_cast<std::size_t>((n_docs_ + 63) / 64);
  bits_.assign(words, std::vector<std::uint64_t>(blocks, 0));
  counts_.assign(words, 0);
  for (const CountEntry& e : reference.entries) {
    if (e.count <= 0) continue;
    std::vector<std::uint64_t>& b = bits_[static_cast<std::size_t>(e.col)];
    const std::size_t block = static_cast<std::size_t>(e.row) / 64;
    const std::uint64_t bit = 1ULL << (static_cast<std::size_t>(e.row) % 64);
    if (!(b[block] & bit)) {
      b[block] |= bit;
      ++counts_[static_cast<std::size_t>(e.col)];
    }
  }
}

long long DocumentFrequencies::doc_freq(Index word) const {
  if (word < 0 || word >= n_words_) throw DomainError("word index out of range");
  return counts_[static_cast<std::size_t>(word)];
}

long long DocumentFrequencies::joint_doc_freq(Index v, Index w) const {
  if (v < 0 || v >= n_words_ || w < 0 || w >= n_words_) {
    throw DomainError("word index out of range");
  }
  const auto& a = bits_[static_cast<std::size_t>(v)];
  const auto& b = bits_[static_cast<std::size_t>(w)];
  long long joint = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint += __builtin_popcountll(a[i] & b[i]);
  }
  return joint;
}

std::vector<double> npmi_per_topic(const TopicTopWords& tops,
                                   const DocumentFrequencies& reference) {
  if (tops.words.empty()) throw DomainError("NPMI of an empty topic set");
  const double denom = static_cast<double>(reference.n_docs()) + 1.0;
  std::vector<double> out;
  out.reserve(tops.words.size());
  for (const std::vector<Index>& words : tops.words) {
    double pair_sum = 0.0;
    long long pairs = 0;
    for (std::size_t m = 1; m < words.size(); ++m) {
      for (std::size_t l = 0; l < m; ++l) {
        const double p_v =
            (static_cast<double>(reference.doc_freq(words[m])) + 1.0) / denom;
        const double p_w =
            (static_cast<double>(reference.doc_freq(words[l])) + 1.0) / denom;
        const double p_vw =
            (static_cast<double>(reference.joint_doc_freq(words[m], words[l])) +
             1.0) / denom;
        ++pairs;
        if (p_vw >= 1.0) continue;  // both words in every document: limit 0
        pair_sum += std::log(p_vw / (p_v * p_w)) / (-std::log(p_vw));
      }
    }
    out.push_back(pair_sum / static_cast<double>(pairs));
  }
  return out;
}

double npmi(const TopicTopWords& tops, const DocumentFrequencies& reference) {
  const std::vector<double> per_topic = npmi_per_topic(tops, reference);
  double total = 0.0;
  for (double v : per_topic) total += v;
  return total / static_cast<double>(per_topic.size());
}

std::vector<double> coherence_per_topic(const TopicTopWords& tops,
                                        const DocumentFrequencies& reference) {
  if (tops.words.empty()) throw DomainError("coherence of an empty topic set");
  std::vector<double> out;
  out.reserve(tops.words.size());
  for (const std::vector<Index>& words : tops.words) {
    double score = 0.0;
    for (std::size_t m = 1; m < words.size(); ++m) {
      for (std::size_t l = 0; l < m; ++l) {
        const long long df = reference.doc_freq(words[l]);
        if (df == 0) continue;  // word absent from the reference
        const long long joint = reference.joint_doc_freq(words[m], words[l]);
        score += std::log((static_cast<double>(joint) + 1.0) /
                          static_cast<double>(df));
      }
    }
    out.push_back(score);
  }
  return out;
}

double coherence(const TopicTopWords& tops,
                 const DocumentFrequencies& reference) {
  const std::vector<double> per_topic = coherence_per_topic(tops, reference);
  double total = 0.0;
  for (double v : per_topic) total += v;
  return total / static_cast<double>(per_topic.size());
}

namespace {

TopicMetricReport trace_topic_metric(const SampleTrace& trace,
                                     const CountMatrix& reference, int top,
                                     bool use_npmi) {
  if (trace.model_kind != ModelKind::topic) {
    throw ConfigError("topic metrics require a topic-model trace");
  }
  if (trace.samples.empty()) throw DomainError("empty trace");
  if (reference.n_cols != trace.data_cols) {
    throw DomainError("reference vocabulary does not match the trace");
  }
  const DocumentFrequencies freqs(reference);
  TopicMetricReport report;
  report.per_topic.assign(static_cast<std::size_t>(trace.factors), 0.0);
  for (const FactorSample& sample : trace.samples) {
    const TopicTopWords tops = top_words(sample.second, top);
    const std::vector<double> vals = use_npmi ? npmi_per_topic(tops, freqs)
                                              : coherence_per_topic(tops, freqs);
    for (std::size_t k = 0; k < vals.size(); ++k) report.per_topic[k] += vals[k];
  }
  double total = 0.0;
  for (double& v : report.per_topic) {
    v /= static_cast<double>(trace.samples.size());
    total += v;
  }
  report.mean = total / static_cast<double>(report.per_topic.size());
  return report;
}

}  // namespace

TopicMetricReport npmi_of_trace(const SampleTrace& trace,
                                const CountMatrix& reference, int top) {
  return trace_topic_metric(trace, reference, top, true);
}

TopicMetricReport coherence_of_trace(const SampleTrace& trace,
                                     const CountMatrix& reference, int top) {
  return trace_topic_metric(trace, reference, top, false);
}

MaskSpec heldout_mask_top_senders(const CountMatrix& counts, int top_k) {
  if (top_k < 0) throw DomainError("top_k must be >= 0");
  if (top_k > counts.n_rows || top_k > counts.n_cols) {
    throw DomainError("top_k exceeds the matrix dimensions");
  }
  std::vector<long long> row_sums(static_cast<std::size_t>(counts.n_rows), 0);
  std::vector<long long> col_sums(static_cast<std::size_t>(counts.n_cols), 0);
  for (const CountEntry& e : counts.entries) {
    row_sums[static_cast<std::size_t>(e.row)] += e.count;
    col_sums[static_cast<std::size_t>(e.col)] += e.count;
  }
  auto top_indices = [&](const std::vector<long long>& sums) {
    std::vector<Index> order(sums.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      const long long sa = sums[static_cast<std::size_t>(a)];
      const long long sb = sums[static_cast<std::size_t>(b)];
      if (sa != sb) return sa > sb;
      return a < b;
    });
    order.resize(static_cast<std::size_t>(top_k));
    return order;
  };
  const std::vector<Index> top_rows = top_indices(row_sums);
  const std::vector<Index> top_cols = top_indices(col_sums);

  std::vector<std::pair<Index, Index>> cells;
  for (Index i : top_rows) {
    for (Index j = 0; j < counts.n_cols; ++j) cells.emplace_back(i, j);
  }
  for (Index j : top_cols) {
    for (Index i = 0; i < counts.n_rows; ++i) cells.emplace_back(i, j);
  }
  return MaskSpec::from_cells(counts.n_rows, counts.n_cols, std::move(cells));
}

}  // namespace lppf
