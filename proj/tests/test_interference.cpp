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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linksim/dsp.hpp"
#include "linksim/interference.hpp"

using namespace linksim;

namespace {
constexpr double kRate = 15.36e6;

TransientPulseParams defaults(PulseMode mode) {
  TransientPulseParams p;
  p.mode = mode;
  return p;  // a0 1, rise 2 ns, hold 30 ns, fc 0
}
}  // namespace

TEST_CASE("literal pulse at t=0 sums every printed term") {
  TransientPulseParams p = defaults(PulseMode::literal);
  CHECK(pulse_value(p, 0.0) == doctest::Approx(4.0).epsilon(1e-15));  // 1 + 1 + 1 + 0 + 1
}

TEST_CASE("literal mode reproduces the additive form pointwise") {
  TransientPulseParams p = defaults(PulseMode::literal);
  p.a0 = 1.7;
  p.carrier_freq_hz = 3e6;
  const IqBuffer buf = transient_pulse(p, kRate, 2e-6);
  for (std::size_t n = 0; n < buf.size(); ++n) {
    const double t = static_cast<double>(n) / kRate;
    // independent re-evaluation of the additive expression with u(t >= 0) = 1
    const double expected = p.a0 + std::exp(-t / p.tau_rise_s) + std::exp(-t / p.tau_hold_s) +
                            std::sin(2.0 * M_PI * p.carrier_freq_hz * t) + 1.0;
    REQUIRE(std::abs(buf.samples[n].real() - expected) < 1e-12);
    REQUIRE(buf.samples[n].imag() == 0.0);
  }
}

TEST_CASE("canonical pulse vanishes at onset") {
  TransientPulseParams p = defaults(PulseMode::canonical);
  CHECK(pulse_value(p, 0.0) == 0.0);
}

TEST_CASE("canonical envelope peaks at the closed-form time") {
  TransientPulseParams p = defaults(PulseMode::canonical);
  const double rate = 1e9;
  const IqBuffer buf = transient_pulse(p, rate, 400e-9);
  std::size_t best = 0;
  for (std::size_t n = 1; n < buf.size(); ++n) {
    if (buf.samples[n].real() > buf.samples[best].real()) best = n;
  }
  const double t_star = p.tau_rise_s * p.tau_hold_s / (p.tau_hold_s - p.tau_rise_s) *
                        std::log(p.tau_hold_s / p.tau_rise_s);
  CHECK(std::abs(static_cast<double>(best) / rate - t_star) <= 1.0 / rate);
}

TEST_CASE("canonical envelope is nonnegative and pulse energy scales as a0 squared") {
  TransientPulseParams p = defaults(PulseMode::canonical);
  const IqBuffer one = transient_pulse(p, 1e9, 400e-9);
  for (const auto& s : one.samples) CHECK(s.real() >= 0.0);

  p.a0 = 2.0;
  const IqBuffer two = transient_pulse(p, 1e9, 400e-9);
  double e1 = 0.0, e2 = 0.0;
  for (const auto& s : one.samples) e1 += std::norm(s);
  for (const auto& s : two.samples) e2 += std::norm(s);
  CHECK(std::abs(e2 - 4.0 * e1) / (4.0 * e1) < 1e-9);
}

TEST_CASE("pulse parameter validation") {
  TransientPulseParams p = defaults(PulseMode::canonical);
  p.tau_rise_s = 30e-9;
  p.tau_hold_s = 2e-9;
  CHECK_THROWS_AS((void)transient_pulse(p, kRate, 1e-3), validation_error);

  TransientPulseParams q = defaults(PulseMode::canonical);
  q.carrier_freq_hz = 8e6;  // beyond Nyquist at 15.36 MHz
  CHECK_THROWS_AS((void)transient_pulse(q, kRate, 1e-3), validation_error);

  TransientPulseParams r = defaults(PulseMode::canonical);
  CHECK_THROWS_AS((void)transient_pulse(r, kRate, 1e-7), validation_error);  // < 10 hold times
}

TEST_CASE("burst train places pulses at exact multiples of the period") {
  TransientPulseParams p = defaults(PulseMode::canonical);
  BurstSchedule sched;
  sched.pulse_period_s = 384.0 / kRate;  // integer sample period
  sched.jitter_fraction = 0.0;
  sched.duration_s = 10.0 * sched.pulse_period_s;
  sched.seed = 1;
  const IqBuffer train = burst_train(p, sched, kRate);

  // expected: ten identical copies, non-overlapping, zeros between them
  std::size_t onsets = 0;
  for (std::size_t m = 0; m < 12; ++m) {
    const std::size_t base = m * 384;
    if (base >= train.size()) break;
    if (std::abs(train.samples[base + 1].real()) > 0.0) ++onsets;
    for (std::size_t j = 0; j < 384 && base + j < train.size(); ++j) {
      const double expected = pulse_value(p, static_cast<double>(j) / kRate);
      if (j > 20) {
        CHECK(train.samples[base + j].real() == 0.0);  // exact zeros in the gaps
      } else {
        CHECK(std::abs(train.samples[base + j].real() - expected) < 1e-12);
      }
    }
  }
  CHECK(onsets == 10);
}

TEST_CASE("burst train is deterministic per seed") {
  TransientPulseParams p = defaults(PulseMode::canonical);
  BurstSchedule sched;
  sched.pulse_period_s = 25e-6;
  sched.jitter_fraction = 0.4;
  sched.duration_s = 1e-3;
  sched.seed = 77;
  const IqBuffer a = burst_train(p, sched, kRate);
  const IqBuffer b = burst_train(p, sched, kRate);
  CHECK(a.samples == b.samples);
  sched.seed = 78;
  const IqBuffer c = burst_train(p, sched, kRate);
  CHECK(a.samples != c.samples);
}

TEST_CASE("burst train mean power matches the energy bookkeeping oracle") {
  TransientPulseParams p = defaults(PulseMode::canonical);
  BurstSchedule sched;
  sched.pulse_period_s = 384.0 / kRate;
  sched.jitter_fraction = 0.0;
  sched.duration_s = 100.0 * sched.pulse_period_s;
  sched.seed = 0;
  const IqBuffer train = burst_train(p, sched, kRate);

  double pulse_energy = 0.0;  // independent direct evaluation over one support
  for (std::size_t n = 0; n < 384; ++n) {
    const double v = pulse_value(p, static_cast<double>(n) / kRate);
    pulse_energy += v * v;
  }
  const double expected = pulse_energy / 384.0;
  CHECK(dsp::mean_power(train) == doctest::Approx(expected).epsilon(0.10));
}

TEST_CASE("zero-jitter train is periodic: circular autocorrelation peaks at the period") {
  TransientPulseParams p = defaults(PulseMode::canonical);
  BurstSchedule sched;
  sched.pulse_period_s = 64.0 / kRate;
  sched.jitter_fraction = 0.0;
  sched.duration_s = 10.0 * sched.pulse_period_s;
  sched.seed = 0;
  const IqBuffer train = burst_train(p, sched, kRate);
  const std::size_t n = train.size();

  auto circ = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += train.samples[i].real() * train.samples[(i + lag) % n].real();
    }
    return acc;
  };
  const double at_period = circ(64);
  for (std::size_t lag = 1; lag < n; ++lag) {
    CHECK(circ(lag) <= at_period + 1e-9);
  }
}

TEST_CASE("cw tone power, DC case and alias rejection") {
  const IqBuffer t = cw_tone(1e6, 1.0, kRate, 1e-3);
  CHECK(std::abs(dsp::mean_power(t) - 1.0) < 1e-12);

  const IqBuffer dc = cw_tone(0.0, 0.7, kRate, 1e-4);
  for (const auto& s : dc.samples) CHECK(std::abs(s - ComplexSample{0.7, 0.0}) < 1e-12);

  CHECK_THROWS_AS((void)cw_tone(7.7e6, 1.0, kRate, 1e-3), validation_error);
}

TEST_CASE("cw tone lands in the right PSD bin") {
  const IqBuffer t = cw_tone(2.4e6, 1.0, kRate, 2048.0 / kRate);
  const auto trace = dsp::welch_psd(t, 512, 0.5);
  std::size_t best = 0;
  for (std::size_t i = 1; i < trace.power_db.size(); ++i) {
    if (trace.power_db[i] > trace.power_db[best]) best = i;
  }
  CHECK(std::abs(trace.freq_hz[best] - 2.4e6) <= kRate / 512.0);
}
