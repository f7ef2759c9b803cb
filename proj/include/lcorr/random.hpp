// Copyright 2026 The lcorr Authors
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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <utility>

namespace lcorr {

// SplitMix64 finalizer. Used both as the generator step and as the keyed hash
// behind seed derivation and procedural noise.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed splitting rule: derive(seed, {a, b, ...}) folds each label in with
// mix64(h ^ mix64(label + 1)). Trial t of a run with master seed m uses
// derive(m, {t}); every random stream inside a trial hangs off that value.
constexpr std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) {
  std::uint64_t h = mix64(seed);
  for (auto label : labels) h = mix64(h ^ mix64(label + 1));
  return h;
}

// Purpose labels for derive(); kept in one place so streams never collide.
namespace stream {
inline constexpr std::uint64_t kCore = 0x10;
inline constexpr std::uint64_t kSigma = 0x11;
inline constexpr std::uint64_t kNoise = 0x12;
inline constexpr std::uint64_t kPoint = 0x13;
inline constexpr std::uint64_t kCorrector = 0x14;
inline constexpr std::uint64_t kPartition = 0x20;
inline constexpr std::uint64_t kWorkspace = 0x21;
inline constexpr std::uint64_t kSubsets = 0x22;
inline constexpr std::uint64_t kRounds = 0x23;
inline constexpr std::uint64_t kSamples = 0x24;
inline constexpr std::uint64_t kTypicality = 0x25;
}  // namespace stream

// SplitMix64 stream; models UniformRandomBitGenerator. All distributions below
// are implemented here so results do not depend on the standard library's
// unspecified distribution algorithms.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Rng(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound), bound > 0 (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  bool bit() { return ((*this)() >> 63) != 0; }

  // Unbiased Fisher-Yates.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Fills words with uniform bits, clearing everything past bit n.
  void fill_bits(std::span<std::uint64_t> words, std::size_t n) {
    for (auto& w : words) w = (*this)();
    if (n % 64 != 0 && !words.empty()) words.back() &= (std::uint64_t{1} << (n % 64)) - 1;
  }

 private:
  std::uint64_t state_;
};

}  // namespace lcorr
