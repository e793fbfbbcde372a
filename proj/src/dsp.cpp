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
#include "linksim/dsp.hpp"

#include <algorithm>
#include <cmath>

namespace linksim::dsp {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<ComplexSample> rotated(const std::vector<ComplexSample>& in, double offset_hz,
                                   double sample_rate_hz) {
  // std::polar per sample instead of a phasor recurrence: no accumulated drift,
  // and shift(+f) followed by shift(-f) cancels to machine precision.
  std::vector<ComplexSample> out(in.size());
  const double step = 2.0 * M_PI * offset_hz / sample_rate_hz;
  for (std::size_t n = 0; n < in.size(); ++n) {
    out[n] = in[n] * std::polar(1.0, step * static_cast<double>(n));
  }
  return out;
}

void check_shift_range(const IqBuffer& buf, double offset_hz, const char* what) {
  if (!(std::abs(offset_hz) < buf.sample_rate_hz / 2.0)) {
    throw validation_error(std::string(what) + ": offset " + std::to_string(offset_hz) +
                           " Hz is at or beyond Nyquist (" +
                           std::to_string(buf.sample_rate_hz / 2.0) + " Hz)");
  }
}

}  // namespace

IqBuffer frequency_shift(const IqBuffer& buf, double offset_hz) {
  check_shift_range(buf, offset_hz, "frequency_shift");
  IqBuffer out(rotated(buf.samples, offset_hz, buf.sample_rate_hz), buf.sample_rate_hz,
               buf.center_freq_hz + offset_hz);
  return out;
}

IqBuffer rotate_only(const IqBuffer& buf, double offset_hz) {
  check_shift_range(buf, offset_hz, "apply_cfo");
  return IqBuffer(rotated(buf.samples, offset_hz, buf.sample_rate_hz), buf.sample_rate_hz,
                  buf.center_freq_hz);
}

IqBuffer apply_gain(const IqBuffer& buf, DbGain gain) {
  IqBuffer out = buf;
  const double a = gain.linear_amplitude();
  for (auto& s : out.samples) s *= a;
  return out;
}

double mean_power(const std::vector<ComplexSample>& samples) {
  if (samples.empty()) throw validation_error("mean_power: empty buffer");
  double acc = 0.0;
  for (const auto& s : samples) acc += std::norm(s);
  return acc / static_cast<double>(samples.size());
}

double mean_power(const IqBuffer& buf) { return mean_power(buf.samples); }

void fft_inplace(std::vector<ComplexSample>& x, bool inverse) {
  const std::size_t n = x.size();
  if (!is_pow2(n)) {
    throw validation_error("dft: size " + std::to_string(n) +
                           " unsupported; supported sizes are powers of two");
  }
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  // one twiddle table for the largest stage, strided for the smaller ones
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<ComplexSample> tw(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    tw[j] = std::polar(1.0, sign * 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n));
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t base = 0; base < n; base += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const ComplexSample w = tw[j * stride];
        const ComplexSample u = x[base + j];
        const ComplexSample v = x[base + j + half] * w;
        x[base + j] = u + v;
        x[base + j + half] = u - v;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : x) v *= scale;
}

IqBuffer dft(const IqBuffer& buf, bool inverse) {
  IqBuffer out = buf;
  fft_inplace(out.samples, inverse);
  return out;
}

double PsdTrace::integrated_power() const {
  double acc = 0.0;
  for (double db : power_db) acc += std::pow(10.0, db / 10.0);
  return acc;
}

PsdTrace welch_psd(const IqBuffer& buf, std::size_t segment_len, double overlap) {
  if (segment_len == 0 || segment_len > buf.size()) {
    throw validation_error("welch_psd: segment length " + std::to_string(segment_len) +
                           " exceeds buffer length " + std::to_string(buf.size()));
  }
  if (!(overlap >= 0.0 && overlap < 1.0)) {
    throw validation_error("welch_psd: overlap must be in [0, 1)");
  }
  const std::size_t L = segment_len;
  std::size_t hop = L - static_cast<std::size_t>(std::llround(overlap * static_cast<double>(L)));
  hop = std::max<std::size_t>(hop, 1);

  std::vector<double> window(L);
  double win_sq = 0.0;
  for (std::size_t n = 0; n < L; ++n) {
    window[n] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(n) / static_cast<double>(L)));
    win_sq += window[n] * window[n];
  }

  std::vector<double> accum(L, 0.0);
  std::vector<ComplexSample> seg(L);
  std::size_t num_segments = 0;
  for (std::size_t start = 0; start + L <= buf.size(); start += hop) {
    for (std::size_t n = 0; n < L; ++n) seg[n] = buf.samples[start + n] * window[n];
    fft_inplace(seg, false);
    // unitary forward transform: sum over bins equals windowed segment energy
    for (std::size_t k = 0; k < L; ++k) accum[k] += std::norm(seg[k]);
    ++num_segments;
  }

  PsdTrace trace;
  trace.freq_hz.resize(L);
  trace.power_db.resize(L);
  const double norm = 1.0 / (static_cast<double>(num_segments) * win_sq);
  const double bin_hz = buf.sample_rate_hz / static_cast<double>(L);
  const double floor_lin = std::pow(10.0, kPsdFloorDb / 10.0);
  for (std::size_t i = 0; i < L; ++i) {
    const long m = static_cast<long>(i) - static_cast<long>(L / 2);  // fftshift order
    const std::size_t k = static_cast<std::size_t>((m + static_cast<long>(L)) % static_cast<long>(L));
    trace.freq_hz[i] = static_cast<double>(m) * bin_hz;
    trace.power_db[i] = 10.0 * std::log10(std::max(accum[k] * norm, floor_lin));
  }
  return trace;
}

}  // namespace linksim::dsp
