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

#include "lppf/count_matrix.hpp"

#include <algorithm>
#include <string>

#include "lppf/errors.hpp"

namespace lppf {

void CountMatrix::validate_and_normalize() {
  if (n_rows <= 0 || n_cols <= 0) {
    throw DomainError("count matrix dimensions must be positive");
  }
  std::sort(entries.begin(), entries.end(),
            [](const CountEntry& a, const CountEntry& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const CountEntry& e = entries[i];
    if (e.row < 0 || e.row >= n_rows || e.col < 0 || e.col >= n_cols) {
      throw DomainError("count entry (" + std::to_string(e.row) + "," +
                        std::to_string(e.col) + ") out of bounds");
    }
    if (e.count < 0) {
      throw DomainError("count entry (" + std::to_string(e.row) + "," +
                        std::to_string(e.col) + ") is negative");
    }
    if (i > 0 && entries[i - 1].row == e.row && entries[i - 1].col == e.col) {
      throw DomainError("duplicate count entry at (" + std::to_string(e.row) +
                        "," + std::to_string(e.col) + ")");
    }
  }
}

std::int64_t CountMatrix::total() const {
  std::int64_t t = 0;
  for (const CountEntry& e : entries) t += e.count;
  return t;
}

double CountMatrix::mean() const {
  return static_cast<double>(total()) /
         (static_cast<double>(n_rows) * static_cast<double>(n_cols));
}

CountGrid CountMatrix::to_dense() const {
  CountGrid dense = CountGrid::Zero(n_rows, n_cols);
  for (const CountEntry& e : entries) dense(e.row, e.col) = e.count;
  return dense;
}

CountMatrix count_matrix_from_dense(const CountGrid& dense) {
  CountMatrix out;
  out.n_rows = dense.rows();
  out.n_cols = dense.cols();
  for (Index i = 0; i < dense.rows(); ++i) {
    for (Index j = 0; j < dense.cols(); ++j) {
      if (dense(i, j) != 0) out.entries.push_back({i, j, dense(i, j)});
    }
  }
  out.validate_and_normalize();
  return out;
}

}  // namespace lppf
