// Copyright 2026 The Obverter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seed derivation. Every random stream in a run is keyed by the master seed
// plus a path of integers (purpose tag, round, game, ...), so streams are
// independent of the order in which they are created.

#ifndef OBVERTER_RANDOM_H_
#define OBVERTER_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace obverter {

constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t DeriveSeed(std::uint64_t master,
                                   std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = SplitMix64(master);
  for (std::uint64_t p : path) s = SplitMix64(s ^ SplitMix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

// Stream purpose tags.
enum class Stream : std::uint64_t {
  kInit = 1,
  kGameBatch = 2,
  kProbe = 3,
  kEval = 4,
  kPopulation = 5,
  kEmbedding = 6,
  kDataset = 7,
};

constexpr std::uint64_t Tag(Stream s) { return static_cast<std::uint64_t>(s); }

using Rng = std::mt19937_64;

inline Rng MakeRng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Rng(DeriveSeed(master, path));
}

// Uniform integer in [0, n).
inline int UniformIndex(Rng& rng, int n) {
  return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

inline double UniformReal(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace obverter

#endif  // OBVERTER_RANDOM_H_
