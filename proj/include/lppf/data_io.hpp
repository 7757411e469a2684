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

#ifndef LPPF_DATA_IO_HPP_
#define LPPF_DATA_IO_HPP_

#include <string>

#include "lppf/count_matrix.hpp"
#include "lppf/factor_models.hpp"
#include "lppf/mcmc_engine.hpp"
#include "lppf/privacy.hpp"

namespace lppf {

// Text triplet format: optional '#' comment lines, a header "rows cols nnz",
// then nnz lines "row col count", 0-indexed, whitespace-delimited.
CountMatrix read_sparse_counts(const std::string& path);
void write_sparse_counts(const std::string& path, const CountMatrix& counts);

// Dense little-endian binary with a small header (dims, N, epsilon, alpha,
// truncated flag, seed); payload is row-major int64.  Round-trips exactly.
void write_privatized(const std::string& path, const PrivatizedMatrix& matrix);
PrivatizedMatrix read_privatized(const std::string& path);

// Per-sample factor blocks, the posterior-mean rates, and the per-iteration
// log-joint; doubles stored at full precision, round-trips bit-exactly.
void write_trace(const std::string& path, const SampleTrace& trace);
SampleTrace read_trace(const std::string& path);

struct StoredFactors {
  ModelKind kind = ModelKind::topic;
  Index data_rows = 0;
  Index data_cols = 0;
  FactorSample sample;
};

// Ground-truth factors from synthetic generation.
void write_factors(const std::string& path, const StoredFactors& factors);
StoredFactors read_factors(const std::string& path);

}  // namespace lppf

#endif  // LPPF_DATA_IO_HPP_
