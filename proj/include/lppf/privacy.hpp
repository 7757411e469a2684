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

#ifndef LPPF_PRIVACY_HPP_
#define LPPF_PRIVACY_HPP_

#include <cstdint>
#include <string>

#include "lppf/count_matrix.hpp"
#include "lppf/rng.hpp"

namespace lppf {

// epsilon = N * ln(1/alpha); any two of (N, epsilon, alpha) fix the third.
double alpha_from_budget(long long precision_n, double epsilon);
double epsilon_from_alpha(long long precision_n, double alpha);

struct PrivacyParams {
  long long precision_n = 1;
  double epsilon = 0.0;
  double alpha = 0.0;
  // Accounting interpretation only (e.g. "document-row" or "cell"); has no
  // computational effect.
  std::string observation_granularity;

  static PrivacyParams from_precision_epsilon(long long n, double epsilon);
  static PrivacyParams from_precision_alpha(long long n, double alpha);
  // Throws DomainError unless epsilon = N ln(1/alpha) within 1e-12.
  void check() const;
};

// Dense privatized counts together with the parameters that produced them.
struct PrivatizedMatrix {
  CountGrid values;
  PrivacyParams params;
  bool truncated = false;
  std::uint64_t seed = 0;
};

// Adds independent 2Geo(alpha) noise to every cell, including the sparse
// input's structural zeros; output is dense.  Refuses to materialize more
// than max_cells cells.
PrivatizedMatrix privatize(const CountMatrix& data, const PrivacyParams& params,
                           Rng& rng, std::int64_t max_cells = 100000000LL);

// Entrywise max(y, 0); used only by the naive baseline.
PrivatizedMatrix truncate(const PrivatizedMatrix& data);

// Enumerates all scalar pairs y, y' in [0, value_bound] with |y - y'| <= N
// and every output t in [window_lo, window_hi]; returns the maximal
// |log P(t|y) - log P(t|y')|.  Budget contract: result <= epsilon + 1e-9.
// Throws CoverageError when the window captures < 1 - 1e-9 of the output
// mass for some input.
double verify_privacy_ratio(const PrivacyParams& params,
                            long long value_bound, long long window_lo,
                            long long window_hi);

// Window wide enough for the coverage precondition at the given parameters.
std::pair<long long, long long> default_ratio_window(
    const PrivacyParams& params, long long value_bound);

}  // namespace lppf

#endif  // LPPF_PRIVACY_HPP_
