// Copyright 2026 The crowdauction Authors
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

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace crowdauction {

/// Seeded pseudo-random stream with an explicitly specified uniform mapping,
/// so that two runs with the same seed produce identical draws regardless of
/// standard-library internals. Simulations derive one stream per (unit of
/// work) and never share streams across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform draw in the open interval (0, 1): 53 mantissa bits, shifted off
  /// zero so quantile transforms never see an endpoint.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 gen_;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Derives an independent substream seed from a master seed, a textual label
/// and up to three indices. Documented so that implementations in other
/// languages can reproduce the stream structure:
///   state = splitmix64(master)
///   state = splitmix64(state ^ fnv1a64(label))
///   state = splitmix64(state ^ index_j)  for each index in order
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                 std::uint64_t i0 = 0, std::uint64_t i1 = 0,
                                 std::uint64_t i2 = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the label bytes
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::uint64_t s = detail::splitmix64(master);
  s = detail::splitmix64(s ^ h);
  s = detail::splitmix64(s ^ i0);
  s = detail::splitmix64(s ^ i1);
  s = detail::splitmix64(s ^ i2);
  return s;
}

}  // namespace crowdauction
