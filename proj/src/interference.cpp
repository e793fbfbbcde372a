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
#include "linksim/interference.hpp"

#include <cmath>
#include <vector>

#include "linksim/rng.hpp"

namespace linksim {

namespace {

// canonical pulses are truncated once the envelope has decayed to ~1e-13
double canonical_support_s(const TransientPulseParams& p) { return 30.0 * p.tau_hold_s; }

void check_carrier(const TransientPulseParams& p, double sample_rate_hz) {
  if (p.carrier_freq_hz != 0.0 && !(std::abs(p.carrier_freq_hz) < sample_rate_hz / 2.0)) {
    throw validation_error("transient_pulse: carrier " + std::to_string(p.carrier_freq_hz) +
                           " Hz is at or beyond Nyquist for rate " +
                           std::to_string(sample_rate_hz) + " Hz");
  }
}

}  // namespace

void TransientPulseParams::validate() const {
  if (!(tau_rise_s > 0.0) || !(tau_rise_s < tau_hold_s)) {
    throw validation_error("transient pulse: need 0 < tau_rise < tau_hold, got rise " +
                           std::to_string(tau_rise_s) + " s, hold " + std::to_string(tau_hold_s) +
                           " s");
  }
  if (!std::isfinite(a0)) throw validation_error("transient pulse: a0 must be finite");
}

PulseMode pulse_mode_from_name(const std::string& name) {
  if (name == "literal") return PulseMode::literal;
  if (name == "canonical") return PulseMode::canonical;
  throw validation_error("unknown pulse mode '" + name + "' (expected literal|canonical)");
}

std::string pulse_mode_name(PulseMode mode) {
  return mode == PulseMode::literal ? "literal" : "canonical";
}

double pulse_value(const TransientPulseParams& p, double t) {
  if (t < 0.0) return 0.0;
  if (p.mode == PulseMode::literal) {
    // additive form as written; the trailing term is the unit step, u(0) = 1
    return p.a0 + std::exp(-t / p.tau_rise_s) + std::exp(-t / p.tau_hold_s) +
           std::sin(2.0 * M_PI * p.carrier_freq_hz * t) + 1.0;
  }
  const double envelope = std::exp(-t / p.tau_hold_s) - std::exp(-t / p.tau_rise_s);
  if (p.carrier_freq_hz == 0.0) return p.a0 * envelope;
  return p.a0 * envelope * std::sin(2.0 * M_PI * p.carrier_freq_hz * t);
}

IqBuffer transient_pulse(const TransientPulseParams& p, double sample_rate_hz, double duration_s) {
  p.validate();
  if (!(sample_rate_hz > 0.0)) throw validation_error("transient_pulse: sample rate must be > 0");
  check_carrier(p, sample_rate_hz);
  if (duration_s < 10.0 * p.tau_hold_s) {
    throw validation_error("transient_pulse: duration " + std::to_string(duration_s) +
                           " s must cover at least 10 hold times (" +
                           std::to_string(10.0 * p.tau_hold_s) + " s)");
  }
  const auto count = static_cast<std::size_t>(duration_s * sample_rate_hz);
  IqBuffer out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples.resize(count);
  for (std::size_t n = 0; n < count; ++n) {
    out.samples[n] = ComplexSample(pulse_value(p, static_cast<double>(n) / sample_rate_hz), 0.0);
  }
  return out;
}

void BurstSchedule::validate() const {
  if (!(pulse_period_s > 0.0)) throw validation_error("burst schedule: period must be > 0");
  if (!(jitter_fraction >= 0.0 && jitter_fraction < 1.0)) {
    throw validation_error("burst schedule: jitter must be in [0, 1)");
  }
  if (!(duration_s > 0.0)) throw validation_error("burst schedule: duration must be > 0");
}

IqBuffer burst_train(const TransientPulseParams& p, const BurstSchedule& sched,
                     double sample_rate_hz) {
  p.validate();
  sched.validate();
  check_carrier(p, sample_rate_hz);

  const auto count = static_cast<std::size_t>(sched.duration_s * sample_rate_hz);
  IqBuffer out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples.assign(count, ComplexSample{0.0, 0.0});

  Rng rng(sched.seed);
  // enumerate enough nominal arrivals that jittered ones cannot be missed
  const double reach = sched.duration_s / (1.0 - sched.jitter_fraction);
  const auto max_m = static_cast<std::size_t>(reach / sched.pulse_period_s) + 1;
  const bool literal = p.mode == PulseMode::literal;
  const double support = canonical_support_s(p);

  for (std::size_t m = 0; m <= max_m; ++m) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double t_m = static_cast<double>(m) * sched.pulse_period_s *
                       (1.0 + sched.jitter_fraction * u);
    if (t_m >= sched.duration_s) continue;
    const auto first = static_cast<std::size_t>(std::ceil(t_m * sample_rate_hz));
    // literal pulses never decay, so they run to the end of the window
    std::size_t last = count;
    if (!literal) {
      last = std::min(count,
                      static_cast<std::size_t>(std::ceil((t_m + support) * sample_rate_hz)));
    }
    for (std::size_t n = first; n < last; ++n) {
      const double t = static_cast<double>(n) / sample_rate_hz - t_m;
      out.samples[n] += ComplexSample(pulse_value(p, t), 0.0);
    }
  }
  return out;
}

IqBuffer cw_tone(double freq_hz, double amplitude, double sample_rate_hz, double duration_s) {
  if (!(sample_rate_hz > 0.0)) throw validation_error("cw_tone: sample rate must be > 0");
  if (!(std::abs(freq_hz) < sample_rate_hz / 2.0)) {
    throw validation_error("cw_tone: frequency " + std::to_string(freq_hz) +
                           " Hz would alias at rate " + std::to_string(sample_rate_hz) + " Hz");
  }
  const auto count = static_cast<std::size_t>(duration_s * sample_rate_hz);
  IqBuffer out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples.resize(count);
  const double step = 2.0 * M_PI * freq_hz / sample_rate_hz;
  for (std::size_t n = 0; n < count; ++n) {
    out.samples[n] = std::polar(amplitude, step * static_cast<double>(n));
  }
  return out;
}

}  // namespace linksim
