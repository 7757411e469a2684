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

#include "lppf/distributions.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>

#include "lppf/errors.hpp"

namespace lppf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Switch point between the series and the normalized backward recurrence.
constexpr double kBesselISwitch = 40.0;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("two-sided geometric alpha must lie strictly in (0,1), got " +
                      std::to_string(alpha));
  }
}

void check_skellam(const SkellamParam& p) {
  if (!(p.rate_plus >= 0.0) || !(p.rate_minus >= 0.0) ||
      !std::isfinite(p.rate_plus) || !std::isfinite(p.rate_minus)) {
    throw DomainError("Skellam rates must be finite and >= 0");
  }
}

void check_bessel(const BesselParam& p) {
  if (p.order < 0) {
    throw DomainError("Bessel order must be a nonnegative integer");
  }
  if (!(p.scale >= 0.0) || !std::isfinite(p.scale)) {
    throw DomainError("Bessel scale must be finite and >= 0");
  }
}

}  // namespace

namespace detail {

void LogSumExp::add(double log_term) {
  if (log_term == kNegInf) return;
  if (acc_ == kNegInf) {
    acc_ = log_term;
  } else if (log_term > acc_) {
    acc_ = log_term + std::log1p(std::exp(acc_ - log_term));
  } else {
    acc_ += std::log1p(std::exp(log_term - acc_));
  }
}

// Ascending series I_v(a) = sum_m (a/2)^(2m+v) / (m! (m+v)!), summed in log
// space.  All terms are positive so there is no cancellation; the term peak
// sits near m* = (sqrt(v^2+a^2) - v)/2 and the tail beyond it decays faster
// than geometrically.
double log_bessel_i_series(long long order, double scale) {
  if (scale == 0.0) return order == 0 ? 0.0 : kNegInf;
  const double l = std::log(scale / 2.0);
  const double v = static_cast<double>(order);
  const double peak = 0.5 * (std::hypot(v, scale) - v);
  LogSumExp lse;
  double log_term = v * l - std::lgamma(v + 1.0);
  lse.add(log_term);
  for (long long m = 1;; ++m) {
    const double md = static_cast<double>(m);
    log_term += 2.0 * l - std::log(md) - std::log(md + v);
    lse.add(log_term);
    if (md > peak && log_term < lse.value() - 60.0) break;
  }
  return lse.value();
}

// Backward (Miller) recurrence I_{k-1} = I_{k+1} + (2k/a) I_k starting from
// a high order, normalized with I_0(a) + 2 sum_{k>=1} I_k(a) = e^a.
// Stable for all orders once the start sits safely past max(v, a).
double log_bessel_i_recurrence(long long order, double scale) {
  if (scale == 0.0) return order == 0 ? 0.0 : kNegInf;
  const double a = scale;
  const long long start =
      std::max(order, static_cast<long long>(std::ceil(a))) +
      static_cast<long long>(12.0 * std::sqrt(a + 1.0)) + 30;

  constexpr double kRescaleAt = 1e250;
  constexpr double kLogRescale = 575.646273248511421;  // log(1e250)

  double f_hi = 0.0;   // f_{k+1}
  double f_k = 1.0;    // f_k, arbitrary scale
  double log_scale = 0.0;
  double norm = 0.0;   // accumulates eps_k * f_k at the current scale
  double log_f_v = kNegInf;

  for (long long k = start; k >= 1; --k) {
    if (k == order) log_f_v = std::log(f_k) + log_scale;
    norm += 2.0 * f_k;
    const double f_lo = f_hi + (2.0 * static_cast<double>(k) / a) * f_k;
    f_hi = f_k;
    f_k = f_lo;
    if (f_k > kRescaleAt) {
      f_k /= kRescaleAt;
      f_hi /= kRescaleAt;
      norm /= kRescaleAt;
      log_scale += kLogRescale;
    }
  }
  if (order == 0) log_f_v = std::log(f_k) + log_scale;
  norm += f_k;  // eps_0 = 1
  return a + log_f_v - (std::log(norm) + log_scale);
}

}  // namespace detail

double log_bessel_i(long long order, double scale) {
  if (order < 0) throw DomainError("log_bessel_i: order must be >= 0");
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw DomainError("log_bessel_i: scale must be finite and >= 0");
  }
  if (scale < kBesselISwitch) return detail::log_bessel_i_series(order, scale);
  return detail::log_bessel_i_recurrence(order, scale);
}

double two_sided_geometric_log_pmf(long long tau, TwoSidedGeometricParam p) {
  check_alpha(p.alpha);
  const double la = std::log(p.alpha);
  return std::log1p(-p.alpha) - std::log1p(p.alpha) +
         static_cast<double>(tau < 0 ? -tau : tau) * la;
}

long long two_sided_geometric_sample(TwoSidedGeometricParam p, Rng& rng) {
  check_alpha(p.alpha);
  // Difference of two geometric(1-alpha) counts is exactly 2Geo(alpha).
  std::geometric_distribution<long long> geo(1.0 - p.alpha);
  return geo(rng) - geo(rng);
}

double skellam_log_pmf(long long tau, SkellamParam p) {
  check_skellam(p);
  const double lp = p.rate_plus;
  const double lm = p.rate_minus;
  if (lm == 0.0) return poisson_log_pmf(tau, lp);
  if (lp == 0.0) return poisson_log_pmf(-tau, lm);
  const long long abs_tau = tau < 0 ? -tau : tau;
  return -(lp + lm) + 0.5 * static_cast<double>(tau) * std::log(lp / lm) +
         log_bessel_i(abs_tau, 2.0 * std::sqrt(lp * lm));
}

long long skellam_sample(SkellamParam p, Rng& rng) {
  check_skellam(p);
  return poisson_sample(p.rate_plus, rng) - poisson_sample(p.rate_minus, rng);
}

double bessel_log_pmf(long long m, BesselParam p) {
  check_bessel(p);
  if (m < 0) return kNegInf;
  if (p.scale == 0.0) return m == 0 ? 0.0 : kNegInf;
  const double v = static_cast<double>(p.order);
  const double md = static_cast<double>(m);
  return (2.0 * md + v) * std::log(p.scale / 2.0) -
         log_bessel_i(p.order, p.scale) - std::lgamma(md + 1.0) -
         std::lgamma(md + v + 1.0);
}

long long bessel_mode(BesselParam p) {
  check_bessel(p);
  if (p.scale == 0.0) return 0;
  const double v = static_cast<double>(p.order);
  // Largest m with m(m+v) <= (a/2)^2; pmf ratios are monotone so a local
  // adjustment fixes any floating-point slop.
  const double half_sq = 0.25 * p.scale * p.scale;
  long long m = static_cast<long long>(
      std::max(0.0, std::floor(0.5 * (std::sqrt(v * v + 4.0 * half_sq) - v))));
  auto ascends = [&](long long at) {
    // p_{at+1} >= p_{at}
    const double d = static_cast<double>(at);
    return half_sq >= (d + 1.0) * (d + 1.0 + v);
  };
  while (ascends(m)) ++m;
  while (m > 0 && !ascends(m - 1)) --m;
  return m;
}

namespace {

long long bessel_sample_inverse_cdf(const BesselParam& p, Rng& rng) {
  const double log_norm = log_bessel_i(p.order, p.scale);
  const double v = static_cast<double>(p.order);
  const double two_log_half = 2.0 * std::log(p.scale / 2.0);
  const long long mode = bessel_mode(p);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double log_p = v * std::log(p.scale / 2.0) - log_norm - std::lgamma(v + 1.0);
  double cum = std::exp(log_p);
  long long m = 0;
  while (cum < u) {
    const double md = static_cast<double>(m);
    log_p += two_log_half - std::log(md + 1.0) - std::log(md + 1.0 + v);
    ++m;
    cum += std::exp(log_p);
    // u beyond the representable CDF mass: the remaining tail has already
    // underflowed, so the current point carries it.
    if (m > mode && log_p < -745.0) break;
  }
  return m;
}

// Rejection from the universal envelope for discrete log-concave
// distributions: pmf(mode + k) <= pmf(mode) * min(1, e^(1 - pmf(mode)|k|)).
long long bessel_sample_rejection(const BesselParam& p, Rng& rng) {
  const long long mode = bessel_mode(p);
  const double log_norm = log_bessel_i(p.order, p.scale);
  const double v = static_cast<double>(p.order);
  const double log_half = std::log(p.scale / 2.0);
  auto log_pmf = [&](long long m) {
    const double md = static_cast<double>(m);
    return (2.0 * md + v) * log_half - log_norm - std::lgamma(md + 1.0) -
           std::lgamma(md + v + 1.0);
  };
  const double log_pm = log_pmf(mode);
  const double pm = std::exp(log_pm);
  const long long flat_halfwidth = static_cast<long long>(std::floor(1.0 / pm));
  const double flat_mass =
      pm * static_cast<double>(2 * flat_halfwidth + 1);
  const double tail_success = -std::expm1(-pm);  // 1 - e^{-pm}
  const double tail_mass = pm *
      std::exp(1.0 - pm * static_cast<double>(flat_halfwidth + 1)) /
      tail_success;
  const double total = flat_mass + 2.0 * tail_mass;

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<long long> flat(-flat_halfwidth,
                                                flat_halfwidth);
  std::geometric_distribution<long long> geo(tail_success);
  for (;;) {
    const double pick = unif(rng) * total;
    long long k;
    double log_envelope;
    if (pick < flat_mass) {
      k = flat(rng);
      log_envelope = log_pm;
    } else {
      const double side = (pick < flat_mass + tail_mass) ? 1.0 : -1.0;
      const long long mag = flat_halfwidth + 1 + geo(rng);
      k = static_cast<long long>(side) * mag;
      log_envelope = log_pm + 1.0 - pm * static_cast<double>(mag);
    }
    const long long candidate = mode + k;
    if (candidate < 0) continue;
    const double log_accept = log_pmf(candidate) - log_envelope;
    assert(log_accept <= 1e-9);
    if (std::log(unif(rng)) <= log_accept) return candidate;
  }
}

}  // namespace

long long bessel_sample(BesselParam p, Rng& rng) {
  check_bessel(p);
  if (p.scale == 0.0) return 0;
  if (p.scale < 20.0) return bessel_sample_inverse_cdf(p, rng);
  return bessel_sample_rejection(p, rng);
}

double poisson_log_pmf(long long k, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw DomainError("Poisson mean must be finite and >= 0");
  }
  if (k < 0) return kNegInf;
  if (mean == 0.0) return k == 0 ? 0.0 : kNegInf;
  const double kd = static_cast<double>(k);
  return kd * std::log(mean) - mean - std::lgamma(kd + 1.0);
}

long long poisson_sample(double mean, Rng& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw DomainError("Poisson mean must be finite and >= 0");
  }
  if (mean == 0.0) return 0;
  std::poisson_distribution<long long> pois(mean);
  return pois(rng);
}

double binomial_log_pmf(long long k, long long n, double p) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw DomainError("binomial requires n >= 0 and p in [0,1]");
  }
  if (k < 0 || k > n) return kNegInf;
  if (p == 0.0) return k == 0 ? 0.0 : kNegInf;
  if (p == 1.0) return k == n ? 0.0 : kNegInf;
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) -
         std::lgamma(nd - kd + 1.0) + kd * std::log(p) +
         (nd - kd) * std::log1p(-p);
}

long long binomial_sample(long long n, double p, Rng& rng) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw DomainError("binomial requires n >= 0 and p in [0,1]");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  std::binomial_distribution<long long> binom(n, p);
  return binom(rng);
}

double gamma_log_pdf(double x, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw DomainError("gamma requires shape > 0 and rate > 0");
  }
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

double gamma_sample(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw DomainError("gamma requires shape > 0 and rate > 0");
  }
  std::gamma_distribution<double> gamma(shape, 1.0 / rate);
  return gamma(rng);
}

double exponential_log_pdf(double x, double rate) {
  if (!(rate > 0.0)) throw DomainError("exponential rate must be > 0");
  if (!(x >= 0.0)) return kNegInf;
  return std::log(rate) - rate * x;
}

double exponential_sample(double rate, Rng& rng) {
  if (!(rate > 0.0)) throw DomainError("exponential rate must be > 0");
  std::exponential_distribution<double> expo(rate);
  return expo(rng);
}

std::vector<long long> multinomial_sample(long long total,
                                          std::span<const double> weights,
                                          Rng& rng) {
  if (total < 0) throw DomainError("multinomial total must be >= 0");
  if (weights.empty()) throw DomainError("multinomial needs >= 1 category");
  double weight_sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw DomainError("multinomial weights must be finite and >= 0");
    }
    weight_sum += w;
  }
  std::vector<long long> counts(weights.size(), 0);
  if (total == 0) return counts;
  if (weight_sum <= 0.0) {
    throw DomainError("multinomial weights sum to zero with positive total");
  }
  long long remaining = total;
  double remaining_weight = weight_sum;
  for (std::size_t i = 0; i + 1 < weights.size() && remaining > 0; ++i) {
    const double p =
        remaining_weight > 0.0
            ? std::min(1.0, std::max(0.0, weights[i] / remaining_weight))
            : 0.0;
    const long long draw = binomial_sample(remaining, p, rng);
    counts[i] = draw;
    remaining -= draw;
    remaining_weight -= weights[i];
  }
  counts.back() += remaining;
  return counts;
}

}  // namespace lppf
