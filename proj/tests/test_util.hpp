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
//
// Shared statistical helpers for the test and acceptance suites.  Everything
// here is independent of the library's sampling code paths.

#ifndef LPPF_TESTS_TEST_UTIL_HPP_
#define LPPF_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace lppf_test {

// Regularized lower incomplete gamma P(a, x) via the series (x < a+1) or the
// continued fraction (otherwise).
inline double reg_lower_gamma(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("reg_lower_gamma");
  if (x == 0.0) return 0.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  // Lentz continued fraction for Q(a, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  const double q = std::exp(-x + a * std::log(x) - gln) * h;
  return 1.0 - q;
}

// Survival function of the chi-square distribution.
inline double chi_square_sf(double statistic, double dof) {
  return 1.0 - reg_lower_gamma(dof / 2.0, statistic / 2.0);
}

// One-sample chi-square goodness of fit for integer draws.  `log_pmf` must
// be the exact distribution; bins with expected count < 5 merge into their
// neighbor toward the tails.
inline double chi_square_gof_pvalue(
    const std::vector<long long>& draws,
    const std::function<double(long long)>& log_pmf, long long support_lo,
    long long support_hi) {
  const double n = static_cast<double>(draws.size());
  std::map<long long, long long> histogram;
  for (long long d : draws) {
    ++histogram[std::clamp(d, support_lo, support_hi)];
  }
  std::vector<double> expected;
  std::vector<double> observed;
  double exp_acc = 0.0, obs_acc = 0.0, covered = 0.0;
  for (long long v = support_lo; v <= support_hi; ++v) {
    double e = n * std::exp(log_pmf(v));
    // Tail clamping: probability outside the window folds into the edges.
    if (v == support_lo || v == support_hi) {
      double tail = 0.0;
      for (long long t = 1; t <= 400; ++t) {
        const double p =
            std::exp(log_pmf(v == support_lo ? support_lo - t : support_hi + t));
        tail += p;
        if (p < 1e-14) break;
      }
      e += n * tail;
    }
    covered += e;
    exp_acc += e;
    obs_acc += static_cast<double>(histogram.count(v) ? histogram[v] : 0);
    if (exp_acc >= 5.0) {
      expected.push_back(exp_acc);
      observed.push_back(obs_acc);
      exp_acc = obs_acc = 0.0;
    }
  }
  if (exp_acc > 0.0 || obs_acc > 0.0) {
    if (expected.empty()) {
      expected.push_back(exp_acc);
      observed.push_back(obs_acc);
    } else {
      expected.back() += exp_acc;
      observed.back() += obs_acc;
    }
  }
  if (covered < 0.999 * n) {
    throw std::invalid_argument("GOF support window misses too much mass");
  }
  if (expected.size() < 2) throw std::invalid_argument("GOF needs >= 2 bins");
  double statistic = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const double diff = observed[i] - expected[i];
    statistic += diff * diff / expected[i];
  }
  return chi_square_sf(statistic, static_cast<double>(expected.size() - 1));
}

// Two-sample chi-square homogeneity test for integer draws.
inline double chi_square_two_sample_pvalue(const std::vector<long long>& a,
                                           const std::vector<long long>& b) {
  std::map<long long, std::pair<double, double>> cells;
  for (long long v : a) cells[v].first += 1.0;
  for (long long v : b) cells[v].second += 1.0;
  // Merge sparse cells in value order until both expected margins are >= 5.
  std::vector<std::pair<double, double>> merged;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double ca = 0.0, cb = 0.0;
  for (const auto& [value, counts] : cells) {
    (void)value;
    ca += counts.first;
    cb += counts.second;
    const double tot = ca + cb;
    if (tot * na / (na + nb) >= 5.0 && tot * nb / (na + nb) >= 5.0) {
      merged.emplace_back(ca, cb);
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0.0) {
    if (merged.empty()) merged.emplace_back(ca, cb);
    else {
      merged.back().first += ca;
      merged.back().second += cb;
    }
  }
  if (merged.size() < 2) throw std::invalid_argument("two-sample: < 2 bins");
  double statistic = 0.0;
  for (const auto& [oa, ob] : merged) {
    const double tot = oa + ob;
    const double ea = tot * na / (na + nb);
    const double eb = tot * nb / (na + nb);
    statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  return chi_square_sf(statistic, static_cast<double>(merged.size() - 1));
}

// Two-sample chi-square on real-valued samples, binned by pooled quantiles.
inline double binned_two_sample_pvalue(std::vector<double> a,
                                       std::vector<double> b, int bins = 8) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> edges;
  for (int q = 1; q < bins; ++q) {
    edges.push_back(pooled[pooled.size() * static_cast<std::size_t>(q) /
                           static_cast<std::size_t>(bins)]);
  }
  auto bin_of = [&](double x) {
    return static_cast<long long>(
        std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
  };
  std::vector<long long> ba, bb;
  ba.reserve(a.size());
  bb.reserve(b.size());
  for (double x : a) ba.push_back(bin_of(x));
  for (double x : b) bb.push_back(bin_of(x));
  return chi_square_two_sample_pvalue(ba, bb);
}

// Slope of the least-squares line through the PP points (F_a(t), F_b(t))
// evaluated over the pooled sample grid; ~1 when the distributions agree.
inline double pp_slope(std::vector<double> a, std::vector<double> b) {
  std::vector<double> grid = a;
  grid.insert(grid.end(), b.begin(), b.end());
  std::sort(grid.begin(), grid.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  auto ecdf = [](const std::vector<double>& xs, double t) {
    return static_cast<double>(std::upper_bound(xs.begin(), xs.end(), t) -
                               xs.begin()) /
           static_cast<double>(xs.size());
  };
  double sxx = 0.0, sxy = 0.0, sx = 0.0, sy = 0.0;
  const double n = static_cast<double>(grid.size());
  for (double t : grid) {
    const double x = ecdf(a, t);
    const double y = ecdf(b, t);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline double stderr_of(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / (static_cast<double>(xs.size()) *
                         (static_cast<double>(xs.size()) - 1.0)));
}

}  // namespace lppf_test

#endif  // LPPF_TESTS_TEST_UTIL_HPP_
