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
#ifndef LINKSIM_INTERFERENCE_HPP
#define LINKSIM_INTERFERENCE_HPP

#include <cstdint>
#include <string>

#include "linksim/iq.hpp"

namespace linksim {

/// Two readings of the transient interferer:
///  - literal:    s(t) = A0 + exp(-t/tau_rise) + exp(-t/tau_hold)
///                      + sin(2 pi fc t) + u(t), evaluated exactly as written
///                 (additive, non-decaying; kept for fidelity checks).
///  - canonical:  s(t) = A0 * (exp(-t/tau_hold) - exp(-t/tau_rise))
///                      * sin(2 pi fc t) * u(t), the conventional decaying
///                 double-exponential burst. Default for experiments.
/// fc is a baseband offset tone. fc = 0 in canonical mode means an unmodulated
/// envelope burst (RF placement is done downstream by frequency_shift).
enum class PulseMode { literal, canonical };

struct TransientPulseParams {
  double a0 = 1.0;
  double tau_rise_s = 2e-9;
  double tau_hold_s = 30e-9;
  double carrier_freq_hz = 0.0;
  PulseMode mode = PulseMode::canonical;

  void validate() const;
};

PulseMode pulse_mode_from_name(const std::string& name);
std::string pulse_mode_name(PulseMode mode);

/// Single pulse value at time t >= 0 relative to onset, u(0) = 1.
double pulse_value(const TransientPulseParams& p, double t);

/// One pulse starting at t = 0, real-valued in the I component.
/// duration_s must cover at least 10 hold times.
IqBuffer transient_pulse(const TransientPulseParams& p, double sample_rate_hz, double duration_s);

/// Repetition schedule for a pulse train. Arrival m sits at
/// m * period * (1 + jitter * u_m) with u_m uniform in [-1, 1] from the seed.
struct BurstSchedule {
  double pulse_period_s = 25e-6;
  double jitter_fraction = 0.2;
  double duration_s = 1e-3;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Superposition of pulse copies at the scheduled arrivals; exact zeros
/// before each onset. Deterministic per seed.
IqBuffer burst_train(const TransientPulseParams& p, const BurstSchedule& sched,
                     double sample_rate_hz);

/// Complex exponential amplitude * exp(i*2*pi*freq_hz*t), the comparison jammer.
IqBuffer cw_tone(double freq_hz, double amplitude, double sample_rate_hz, double duration_s);

}  // namespace linksim

#endif  // LINKSIM_INTERFERENCE_HPP
