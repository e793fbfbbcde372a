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
#ifndef LINKSIM_CHANNEL_HPP
#define LINKSIM_CHANNEL_HPP

#include <cstdint>
#include <optional>

#include "linksim/iq.hpp"

namespace linksim {

/// Realized component powers of one received window. p_interference and
/// p_noise come from the channel's own bookkeeping; a receiver never sees
/// this split, so it is carried alongside results as oracle data.
struct PowerTriple {
  double p_signal = 0.0;
  double p_interference = 0.0;
  double p_noise = 0.0;
};

/// Flat single-tap channel with AWGN, oscillator offset and one RF-offset
/// interferer. Disabled stages use empty optionals, never infinities.
struct ChannelConfig {
  std::optional<double> snr_db;              // nullopt: noiseless
  double cfo_hz = 0.0;
  ComplexSample flat_gain{1.0, 0.0};
  double interferer_offset_hz = 0.0;
  std::optional<double> interferer_gain_db;  // nullopt: interferer disabled
  std::uint64_t seed = 0;
};

struct AwgnResult {
  IqBuffer buf;
  double noise_power = 0.0;  // realized, for KPI ground truth
};

/// Adds circular complex Gaussian noise with power mean_power(buf)/10^(snr/10).
/// A disabled SNR (nullopt) returns the input unchanged.
AwgnResult add_awgn(const IqBuffer& buf, std::optional<double> snr_db, std::uint64_t seed);

/// Oscillator error: same rotation as frequency_shift, metadata untouched.
IqBuffer apply_cfo(const IqBuffer& buf, double cfo_hz);

struct CombineResult {
  IqBuffer received;
  PowerTriple ground_truth;
};

/// received = flat_gain * apply_cfo(desired) + shifted, gain-scaled interferer
/// + AWGN. The interferer is trimmed or cyclically extended to the desired
/// length; sample rates must match. Ground truth carries the realized powers
/// measured over the combined window.
CombineResult combine(const IqBuffer& desired, const IqBuffer& interferer,
                      const ChannelConfig& cfg);

}  // namespace linksim

#endif  // LINKSIM_CHANNEL_HPP
