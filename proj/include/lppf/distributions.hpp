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

#ifndef LPPF_DISTRIBUTIONS_HPP_
#define LPPF_DISTRIBUTIONS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "lppf/rng.hpp"

namespace lppf {

// Two-sided geometric distribution over the integers,
//   P(tau) = (1 - alpha) / (1 + alpha) * alpha^|tau|,  0 < alpha < 1.
struct TwoSidedGeometricParam {
  double alpha;
};

// Difference of two independent Poisson counts with the given rates.
struct SkellamParam {
  double rate_plus;
  double rate_minus;
};

// Minimum of two Poisson counts conditioned on their difference; support
// m in {0, 1, 2, ...}, normalizer is the modified Bessel function I_v.
struct BesselParam {
  long long order;  // v >= 0
  double scale;     // a >= 0
};

// log I_v(a) for integer order v >= 0, a >= 0, valid across the full range
// (internally an ascending series for small a, a normalized backward
// recurrence for large a).
double log_bessel_i(long long order, double scale);

namespace detail {
// The two evaluation routes, exposed for the switchover cross-check.
double log_bessel_i_series(long long order, double scale);
double log_bessel_i_recurrence(long long order, double scale);
// Streaming log-sum-exp accumulator.
class LogSumExp {
 public:
  void add(double log_term);
  double value() const { return acc_; }

 private:
  double acc_ = -1.0 / 0.0;
};
}  // namespace detail

double two_sided_geometric_log_pmf(long long tau, TwoSidedGeometricParam p);
long long two_sided_geometric_sample(TwoSidedGeometricParam p, Rng& rng);

double skellam_log_pmf(long long tau, SkellamParam p);
long long skellam_sample(SkellamParam p, Rng& rng);

double bessel_log_pmf(long long m, BesselParam p);
long long bessel_mode(BesselParam p);
long long bessel_sample(BesselParam p, Rng& rng);

// Standard distributions in the parameterizations used throughout:
// gamma is shape-rate, exponential takes a rate.
double poisson_log_pmf(long long k, double mean);
long long poisson_sample(double mean, Rng& rng);

double binomial_log_pmf(long long k, long long n, double p);
long long binomial_sample(long long n, double p, Rng& rng);

double gamma_log_pdf(double x, double shape, double rate);
double gamma_sample(double shape, double rate, Rng& rng);

double exponential_log_pdf(double x, double rate);
double exponential_sample(double rate, Rng& rng);

// Count vector over the categories; sums to `total` exactly.  `weights`
// need not be normalized.
std::vector<long long> multinomial_sample(long long total,
                                          std::span<const double> weights,
                                          Rng& rng);

}  // namespace lppf

#endif  // LPPF_DISTRIBUTIONS_HPP_
