/* Copyright 2026 The advseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef ADVSEG_RANDOM_H_
#define ADVSEG_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace advseg {

// One splitmix64 finalization round.
std::uint64_t SplitMix64(std::uint64_t x);

// Derives an independent sub-seed for the stream called `name`:
//   SplitMix64(master ^ SplitMix64(fnv1a64(name)))
// Each consumer (init, shuffle, synth, split, ...) owns one name, so adding
// a consumer never shifts the values seen by another.
std::uint64_t DeriveSeed(std::uint64_t master, std::string_view name);

// Seeded generator with distribution code written out explicitly. The
// std:: distributions are implementation-defined, which would make results
// depend on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Unbiased integer in [0, n). n must be > 0.
  std::uint64_t UniformInt(std::uint64_t n);

  // Standard normal via Box-Muller; the second variate is cached.
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }

  template <typename It>
  void Shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const std::uint64_t j = UniformInt(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace advseg

#endif  // ADVSEG_RANDOM_H_
