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

#ifndef LPPF_RNG_HPP_
#define LPPF_RNG_HPP_

#include <cstdint>
#include <random>

namespace lppf {

// All samplers take an explicit generator; nothing in the library keeps
// hidden random state.
using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive well-mixed substream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic substream derivation: the stream for (seed, a, b) does not
// depend on how many draws other streams consumed.  Used to keep chunked
// (per-row) sampling reproducible independent of the thread count.
inline Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return Rng(mix64(mix64(seed ^ 0x5851f42d4c957f2dULL) + mix64(a) * 3 + b));
}

}  // namespace lppf

#endif  // LPPF_RNG_HPP_
