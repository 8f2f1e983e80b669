// Copyright 2026 The robustpd Authors
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

#include <cstddef>
#include <cstdint>

namespace robustpd {

// Counter-based generator built from the SplitMix64 finalizer: every draw is
// a pure function of (seed, stream, counter), so realizations can be computed
// in any order and on any thread with identical results.
struct CounterRng {
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t bits(std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t counter) noexcept {
    std::uint64_t h = mix(seed);
    h = mix(h ^ mix(stream + 0x632BE59BD9B4E019ULL));
    return mix(h ^ mix(counter + 0x85157AF5ULL));
  }

  // Uniform double in [0, 1) with 53 random bits.
  static constexpr double unit(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t counter) noexcept {
    return static_cast<double>(bits(seed, stream, counter) >> 11) * 0x1.0p-53;
  }
};

// Sequential view of one counter-based stream.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : seed_(seed), stream_(stream) {}

  std::uint64_t next() noexcept { return CounterRng::bits(seed_, stream_, counter_++); }
  double uniform() noexcept { return CounterRng::unit(seed_, stream_, counter_++); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n), n > 0.
  std::size_t below(std::size_t n) noexcept {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }
  // Uniform integer in [lo, hi].
  std::size_t between(std::size_t lo, std::size_t hi) noexcept {
    return lo + below(hi - lo + 1);
  }
  bool coin(double prob_true = 0.5) noexcept { return uniform() < prob_true; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace robustpd
