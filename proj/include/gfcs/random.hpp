/*
 * Copyright 2026 The gfcs Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gfcs {

// Seeded pseudo-random source used for every random draw in the project.
//
// The generator is xoshiro256** (Blackman & Vigna) with its 256-bit state
// expanded from the 64-bit seed by SplitMix64. All derived draws (uniform
// reals, bounded integers, normals, shuffles) are implemented here rather
// than through <random> distributions, whose output is implementation
// defined; a seed therefore yields the same sequence on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi);

  // Uniform integer on [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller (both variates used).
  double normal();

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // A new independent stream whose seed is derived from this stream's seed
  // and `key`, without consuming from this stream.
  RandomStream child(std::uint64_t key) const;

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

// Stateless mixing of two 64-bit values; used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key);

}  // namespace gfcs
