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
#include "linksim/channel.hpp"

#include <cmath>

#include "linksim/dsp.hpp"
#include "linksim/rng.hpp"

namespace linksim {

AwgnResult add_awgn(const IqBuffer& buf, std::optional<double> snr_db, std::uint64_t seed) {
  if (buf.empty()) throw validation_error("add_awgn: empty buffer");
  if (!snr_db) return {buf, 0.0};

  const double target = dsp::mean_power(buf) / std::pow(10.0, *snr_db / 10.0);
  const double sigma = std::sqrt(target);
  Rng rng(seed);
  AwgnResult res;
  res.buf = buf;
  double realized = 0.0;
  for (auto& s : res.buf.samples) {
    const ComplexSample n = sigma * rng.complex_gaussian();
    realized += std::norm(n);
    s += n;
  }
  res.noise_power = realized / static_cast<double>(buf.size());
  return res;
}

IqBuffer apply_cfo(const IqBuffer& buf, double cfo_hz) {
  if (cfo_hz == 0.0) return buf;
  return dsp::rotate_only(buf, cfo_hz);
}

CombineResult combine(const IqBuffer& desired, const IqBuffer& interferer,
                      const ChannelConfig& cfg) {
  if (desired.empty()) throw validation_error("combine: empty desired buffer");
  if (cfg.interferer_gain_db && !interferer.empty() &&
      interferer.sample_rate_hz != desired.sample_rate_hz) {
    throw validation_error("combine: sample rate mismatch (desired " +
                           std::to_string(desired.sample_rate_hz) + " Hz, interferer " +
                           std::to_string(interferer.sample_rate_hz) + " Hz)");
  }
  const std::size_t len = desired.size();

  IqBuffer sig = apply_cfo(desired, cfg.cfo_hz);
  for (auto& s : sig.samples) s *= cfg.flat_gain;

  CombineResult res;
  res.ground_truth.p_signal = dsp::mean_power(sig);
  res.received = std::move(sig);

  if (cfg.interferer_gain_db) {
    if (interferer.empty()) throw validation_error("combine: interferer enabled but empty");
    IqBuffer jam;
    jam.sample_rate_hz = interferer.sample_rate_hz;
    jam.center_freq_hz = interferer.center_freq_hz;
    jam.samples.resize(len);
    for (std::size_t n = 0; n < len; ++n) {
      jam.samples[n] = interferer.samples[n % interferer.size()];  // trim or extend cyclically
    }
    jam = dsp::apply_gain(jam, DbGain(*cfg.interferer_gain_db));
    jam = dsp::frequency_shift(jam, cfg.interferer_offset_hz);
    res.ground_truth.p_interference = dsp::mean_power(jam);
    for (std::size_t n = 0; n < len; ++n) res.received.samples[n] += jam.samples[n];
  }

  if (cfg.snr_db) {
    // SNR is defined against the desired signal at the receiver reference plane
    const double target =
        res.ground_truth.p_signal / std::pow(10.0, *cfg.snr_db / 10.0);
    const double sigma = std::sqrt(target);
    Rng rng(cfg.seed);
    double realized = 0.0;
    for (auto& s : res.received.samples) {
      const ComplexSample n = sigma * rng.complex_gaussian();
      realized += std::norm(n);
      s += n;
    }
    res.ground_truth.p_noise = realized / static_cast<double>(len);
  }
  return res;
}

}  // namespace linksim
