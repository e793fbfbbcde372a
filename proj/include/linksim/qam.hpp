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
#ifndef LINKSIM_QAM_HPP
#define LINKSIM_QAM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "linksim/iq.hpp"

namespace linksim {

enum class Modulation { qpsk, qam16, qam64 };

/// Payload bits, one per element, values 0/1.
struct BitPayload {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
};

std::size_t bits_per_symbol(Modulation mod);
/// Amplitude normalization to unit mean symbol power: 1/sqrt(2), 1/sqrt(10), 1/sqrt(42).
double constellation_scale(Modulation mod);
std::string modulation_name(Modulation mod);
Modulation modulation_from_name(const std::string& name);

/// Gray-coded square constellation, unit mean power. The first half of each
/// bit group selects the I level (MSB first), the second half the Q level;
/// the all-zero group maps to the most positive corner, so QPSK 00 maps to
/// (1+i)/sqrt(2).
std::vector<ComplexSample> qam_map(const BitPayload& bits, Modulation mod);

/// Hard minimum-distance decision. Ties on a decision boundary resolve to
/// the lexicographically smaller bit pattern.
BitPayload qam_demap(const std::vector<ComplexSample>& symbols, Modulation mod);

}  // namespace linksim

#endif  // LINKSIM_QAM_HPP
