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

#ifndef LPPF_NOISE_INVERSION_HPP_
#define LPPF_NOISE_INVERSION_HPP_

#include <cstdint>
#include <utility>

#include "lppf/rng.hpp"

namespace lppf {

// Per-entry auxiliary state for inverting the geometric-mechanism noise.
// Invariants after every sweep: y_tilde_plus - g_minus equals the observed
// value, y_true + g_plus = y_tilde_plus, all counts >= 0.
struct EntryAuxState {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  long long g_plus = 0;
  long long g_minus = 0;
  long long y_true = 0;
  long long y_tilde_plus = 0;
};

// Rate of the exponential prior on the noise rates lambda(+/-).  Chosen so
// that marginalizing the Poisson pair over it yields exactly 2Geo(alpha)
// noise: lambda ~ Exp(rate (1-alpha)/alpha), i.e. mean alpha/(1-alpha).
double lambda_prior_rate(double alpha);

EntryAuxState init_entry_aux(double alpha, Rng& rng);

// min{y_tilde_plus, g_minus} ~ Bes(|y_tilde|, 2 sqrt((lambda+ + mu) lambda-)).
long long sample_bessel_min(long long y_tilde, double mu,
                            const EntryAuxState& aux, Rng& rng);

// Recovers the two latent Poisson counts from the observation and their
// minimum: returns (y_tilde_plus, g_minus) with
// y_tilde_plus - g_minus = y_tilde and min(y_tilde_plus, g_minus) = m.
std::pair<long long, long long> split_observation(long long y_tilde,
                                                  long long m);

// y ~ Binom(y_tilde_plus, mu / (mu + lambda_plus)).
long long thin_true_count(long long y_tilde_plus, double mu,
                          double lambda_plus, Rng& rng);

// lambda(*) ~ Gamma(1 + g(*), (1-alpha)/alpha + 1) for * in {+,-}.
std::pair<double, double> resample_lambdas(long long g_plus,
                                           long long g_minus, double alpha,
                                           Rng& rng);

// One full conditional sweep for a single entry: Bessel minimum, count
// recovery, binomial thinning, gamma rate update.  Never sees the true
// count; only the observation, the model rate, and auxiliary state.
EntryAuxState entry_gibbs_sweep(long long y_tilde, double mu,
                                const EntryAuxState& aux, double alpha,
                                Rng& rng);

}  // namespace lppf

#endif  // LPPF_NOISE_INVERSION_HPP_
