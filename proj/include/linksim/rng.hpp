/*
 Copyright 2026 emi-linksim contributors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#ifndef LINKSIM_RNG_HPP
#define LINKSIM_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace linksim {

/// Deterministic generator handle. Algorithm is pinned: mt19937_64 for the bit
/// stream, Box-Muller over its uniforms for Gaussian draws (std distributions
/// are not used because their output is implementation defined). Identical
/// seeds reproduce identical streams. A handle must not be shared across
/// threads; derive one per concurrent context instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_bits() { return gen_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal N(0, 1).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Circular complex Gaussian with E|z|^2 = 1 (variance 0.5 per component).
  std::complex<double> complex_gaussian() {
    const double s = 1.0 / std::sqrt(2.0);
    return {s * gaussian(), s * gaussian()};
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// FNV-1a hash of a stream tag, for deriving independent sub-seeds.
constexpr std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : tag) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

/// splitmix64 finalizer; decorrelates nearby seed values.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Sub-seed for a named stream (payload, pilots, noise, ...) of a trial seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view stream) {
  return mix64(base ^ hash_tag(stream));
}

}  // namespace linksim

#endif  // LINKSIM_RNG_HPP
