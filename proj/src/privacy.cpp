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

#include "lppf/privacy.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "lppf/distributions.hpp"
#include "lppf/errors.hpp"

namespace lppf {

double alpha_from_budget(long long precision_n, double epsilon) {
  if (precision_n < 1) throw DomainError("precision N must be >= 1");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("epsilon must be finite and > 0");
  }
  return std::exp(-epsilon / static_cast<double>(precision_n));
}

double epsilon_from_alpha(long long precision_n, double alpha) {
  if (precision_n < 1) throw DomainError("precision N must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must lie strictly in (0,1)");
  }
  return static_cast<double>(precision_n) * std::log(1.0 / alpha);
}

PrivacyParams PrivacyParams::from_precision_epsilon(long long n,
                                                    double epsilon) {
  PrivacyParams p;
  p.precision_n = n;
  p.epsilon = epsilon;
  p.alpha = alpha_from_budget(n, epsilon);
  p.check();
  return p;
}

PrivacyParams PrivacyParams::from_precision_alpha(long long n, double alpha) {
  PrivacyParams p;
  p.precision_n = n;
  p.alpha = alpha;
  p.epsilon = epsilon_from_alpha(n, alpha);
  p.check();
  return p;
}

void PrivacyParams::check() const {
  if (precision_n < 1) throw DomainError("precision N must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must lie strictly in (0,1)");
  }
  const double implied = epsilon_from_alpha(precision_n, alpha);
  if (std::abs(implied - epsilon) > 1e-12 * std::max(1.0, std::abs(epsilon))) {
    throw DomainError("privacy params violate epsilon = N ln(1/alpha): eps=" +
                      std::to_string(epsilon) + " vs implied " +
                      std::to_string(implied));
  }
}

PrivatizedMatrix privatize(const CountMatrix& data, const PrivacyParams& params,
                           Rng& rng, std::int64_t max_cells) {
  params.check();
  const std::int64_t cells =
      static_cast<std::int64_t>(data.n_rows) * static_cast<std::int64_t>(data.n_cols);
  if (cells > max_cells) {
    throw CapacityError(
        "privatized matrix would materialize " + std::to_string(cells) +
        " dense cells (budget " + std::to_string(max_cells) +
        "); raise the cell budget or privatize in row chunks");
  }
  PrivatizedMatrix out;
  out.params = params;
  out.truncated = false;
  out.values = data.to_dense();
  const TwoSidedGeometricParam noise{params.alpha};
  for (Index i = 0; i < out.values.rows(); ++i) {
    for (Index j = 0; j < out.values.cols(); ++j) {
      out.values(i, j) += two_sided_geometric_sample(noise, rng);
    }
  }
  return out;
}

PrivatizedMatrix truncate(const PrivatizedMatrix& data) {
  PrivatizedMatrix out = data;
  out.values = out.values.cwiseMax(std::int64_t{0});
  out.truncated = true;
  return out;
}

std::pair<long long, long long> default_ratio_window(
    const PrivacyParams& params, long long value_bound) {
  // 2Geo tail: P(|tau| > w) = 2 alpha^(w+1) / (1 + alpha); pick w so the
  // per-input miss is below 1e-10, well inside the 1e-9 coverage bound.
  const double alpha = params.alpha;
  const long long w = static_cast<long long>(std::ceil(
                          std::log(1e-10 * (1.0 + alpha) / 2.0) /
                          std::log(alpha))) + 2;
  return {-w, value_bound + w};
}

double verify_privacy_ratio(const PrivacyParams& params, long long value_bound,
                            long long window_lo, long long window_hi) {
  params.check();
  if (value_bound < 1) throw DomainError("value bound must be >= 1");
  if (window_hi <= window_lo) throw DomainError("empty output window");

  const TwoSidedGeometricParam noise{params.alpha};
  // log P(t | y) for y in [0, bound], t in the window.
  const long long width = window_hi - window_lo + 1;
  std::vector<std::vector<double>> log_p(
      static_cast<std::size_t>(value_bound + 1),
      std::vector<double>(static_cast<std::size_t>(width)));
  for (long long y = 0; y <= value_bound; ++y) {
    double mass = 0.0;
    for (long long t = window_lo; t <= window_hi; ++t) {
      const double lp = two_sided_geometric_log_pmf(t - y, noise);
      log_p[static_cast<std::size_t>(y)][static_cast<std::size_t>(t - window_lo)] = lp;
      mass += std::exp(lp);
    }
    if (mass < 1.0 - 1e-9) {
      throw CoverageError("output window [" + std::to_string(window_lo) + "," +
                          std::to_string(window_hi) + "] captures only " +
                          std::to_string(mass) + " of the mass for y=" +
                          std::to_string(y));
    }
  }

  double max_ratio = 0.0;
  for (long long y = 0; y <= value_bound; ++y) {
    for (long long y2 = y + 1; y2 <= std::min(value_bound, y + params.precision_n);
         ++y2) {
      for (long long t = 0; t < width; ++t) {
        const double d = std::abs(log_p[static_cast<std::size_t>(y)][static_cast<std::size_t>(t)] -
                                  log_p[static_cast<std::size_t>(y2)][static_cast<std::size_t>(t)]);
        if (d > max_ratio) max_ratio = d;
      }
    }
  }
  return max_ratio;
}

}  // namespace lppf
