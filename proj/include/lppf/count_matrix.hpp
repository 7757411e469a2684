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

#ifndef LPPF_COUNT_MATRIX_HPP_
#define LPPF_COUNT_MATRIX_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace lppf {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
// Dense signed-count grid; row-major to match the on-disk layout.
using CountGrid =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct CountEntry {
  Index row;
  Index col;
  std::int64_t count;
};

// Sparse nonnegative count matrix with optional axis labels; the true data.
struct CountMatrix {
  Index n_rows = 0;
  Index n_cols = 0;
  std::vector<CountEntry> entries;  // unique (row, col) keys, counts >= 0
  std::vector<std::string> row_labels;  // optional, in-memory only
  std::vector<std::string> col_labels;  // optional, in-memory only

  // Throws DomainError on out-of-bounds indices, negative counts, or
  // duplicate keys; sorts entries by (row, col).
  void validate_and_normalize();

  std::int64_t total() const;
  double mean() const;  // total / (n_rows * n_cols)
  CountGrid to_dense() const;
};

CountMatrix count_matrix_from_dense(const CountGrid& dense);

}  // namespace lppf

#endif  // LPPF_COUNT_MATRIX_HPP_
