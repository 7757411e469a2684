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

#include "lppf/noise_inversion.hpp"

#include <cmath>

#include "lppf/distributions.hpp"
#include "lppf/errors.hpp"

namespace lppf {

double lambda_prior_rate(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must lie strictly in (0,1)");
  }
  return (1.0 - alpha) / alpha;
}

EntryAuxState init_entry_aux(double alpha, Rng& rng) {
  const double rate = lambda_prior_rate(alpha);
  EntryAuxState aux;
  aux.lambda_plus = exponential_sample(rate, rng);
  aux.lambda_minus = exponential_sample(rate, rng);
  return aux;
}

long long sample_bessel_min(long long y_tilde, double mu,
                            const EntryAuxState& aux, Rng& rng) {
  const long long order = y_tilde < 0 ? -y_tilde : y_tilde;
  const double scale =
      2.0 * std::sqrt((aux.lambda_plus + mu) * aux.lambda_minus);
  return bessel_sample(BesselParam{order, scale}, rng);
}

std::pair<long long, long long> split_observation(long long y_tilde,
                                                  long long m) {
  if (m < 0) throw DomainError("Bessel minimum must be >= 0");
  if (y_tilde <= 0) return {m, m - y_tilde};
  return {m + y_tilde, m};
}

long long thin_true_count(long long y_tilde_plus, double mu,
                          double lambda_plus, Rng& rng) {
  if (y_tilde_plus == 0) return 0;
  const double denom = mu + lambda_plus;
  const double p = denom > 0.0 ? mu / denom : 0.0;
  return binomial_sample(y_tilde_plus, p, rng);
}

std::pair<double, double> resample_lambdas(long long g_plus, long long g_minus,
                                           double alpha, Rng& rng) {
  const double rate = lambda_prior_rate(alpha) + 1.0;
  const double lp = gamma_sample(1.0 + static_cast<double>(g_plus), rate, rng);
  const double lm = gamma_sample(1.0 + static_cast<double>(g_minus), rate, rng);
  return {lp, lm};
}

EntryAuxState entry_gibbs_sweep(long long y_tilde, double mu,
                                const EntryAuxState& aux, double alpha,
                                Rng& rng) {
  EntryAuxState next;
  const long long m = sample_bessel_min(y_tilde, mu, aux, rng);
  const auto [y_tilde_plus, g_minus] = split_observation(y_tilde, m);
  next.y_tilde_plus = y_tilde_plus;
  next.g_minus = g_minus;
  next.y_true = thin_true_count(y_tilde_plus, mu, aux.lambda_plus, rng);
  next.g_plus = y_tilde_plus - next.y_true;
  const auto [lp, lm] = resample_lambdas(next.g_plus, next.g_minus, alpha, rng);
  next.lambda_plus = lp;
  next.lambda_minus = lm;
  return next;
}

}  // namespace lppf
