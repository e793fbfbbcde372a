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
#include "linksim/qam.hpp"

#include <cmath>

namespace linksim {

namespace {

unsigned gray_encode(unsigned g) { return g ^ (g >> 1); }

unsigned gray_decode(unsigned b) {
  unsigned g = 0;
  for (; b; b >>= 1) g ^= b;
  return g;
}

// level index g in [0, levels) -> amplitude, index 0 at the positive edge
double level_amplitude(unsigned g, unsigned levels, double scale) {
  return static_cast<double>(static_cast<int>(levels) - 1 - 2 * static_cast<int>(g)) * scale;
}

// nearest level index for one axis, spec tie-break toward the smaller codeword
unsigned decide_level(double x, unsigned levels, double scale) {
  const double f = (static_cast<double>(levels - 1) - x / scale) / 2.0;
  if (f <= 0.0) return 0;
  if (f >= static_cast<double>(levels - 1)) return levels - 1;
  const double lo = std::floor(f);
  const unsigned g0 = static_cast<unsigned>(lo);
  const double frac = f - lo;
  if (frac < 0.5) return g0;
  if (frac > 0.5) return g0 + 1;
  return gray_encode(g0) < gray_encode(g0 + 1) ? g0 : g0 + 1;
}

}  // namespace

std::size_t bits_per_symbol(Modulation mod) {
  switch (mod) {
    case Modulation::qpsk: return 2;
    case Modulation::qam16: return 4;
    case Modulation::qam64: return 6;
  }
  throw validation_error("unknown modulation");
}

double constellation_scale(Modulation mod) {
  switch (mod) {
    case Modulation::qpsk: return 1.0 / std::sqrt(2.0);
    case Modulation::qam16: return 1.0 / std::sqrt(10.0);
    case Modulation::qam64: return 1.0 / std::sqrt(42.0);
  }
  throw validation_error("unknown modulation");
}

std::string modulation_name(Modulation mod) {
  switch (mod) {
    case Modulation::qpsk: return "qpsk";
    case Modulation::qam16: return "qam16";
    case Modulation::qam64: return "qam64";
  }
  return "?";
}

Modulation modulation_from_name(const std::string& name) {
  if (name == "qpsk") return Modulation::qpsk;
  if (name == "qam16") return Modulation::qam16;
  if (name == "qam64") return Modulation::qam64;
  throw validation_error("unknown modulation '" + name + "' (expected qpsk|qam16|qam64)");
}

std::vector<ComplexSample> qam_map(const BitPayload& payload, Modulation mod) {
  const std::size_t m = bits_per_symbol(mod);
  if (payload.size() % m != 0) {
    throw validation_error("qam_map: bit count " + std::to_string(payload.size()) +
                           " not divisible by bits per symbol " + std::to_string(m));
  }
  const std::size_t half = m / 2;
  const unsigned levels = 1u << half;
  const double scale = constellation_scale(mod);

  std::vector<ComplexSample> out;
  out.reserve(payload.size() / m);
  for (std::size_t i = 0; i < payload.size(); i += m) {
    unsigned bi = 0, bq = 0;
    for (std::size_t j = 0; j < half; ++j) bi = (bi << 1) | payload.bits[i + j];
    for (std::size_t j = half; j < m; ++j) bq = (bq << 1) | payload.bits[i + j];
    out.emplace_back(level_amplitude(gray_decode(bi), levels, scale),
                     level_amplitude(gray_decode(bq), levels, scale));
  }
  return out;
}

BitPayload qam_demap(const std::vector<ComplexSample>& symbols, Modulation mod) {
  const std::size_t m = bits_per_symbol(mod);
  const std::size_t half = m / 2;
  const unsigned levels = 1u << half;
  const double scale = constellation_scale(mod);

  BitPayload out;
  out.bits.reserve(symbols.size() * m);
  for (const auto& s : symbols) {
    const unsigned bi = gray_encode(decide_level(s.real(), levels, scale));
    const unsigned bq = gray_encode(decide_level(s.imag(), levels, scale));
    for (std::size_t j = 0; j < half; ++j) {
      out.bits.push_back(static_cast<std::uint8_t>((bi >> (half - 1 - j)) & 1u));
    }
    for (std::size_t j = 0; j < half; ++j) {
      out.bits.push_back(static_cast<std::uint8_t>((bq >> (half - 1 - j)) & 1u));
    }
  }
  return out;
}

}  // namespace linksim
