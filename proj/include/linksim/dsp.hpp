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
#ifndef LINKSIM_DSP_HPP
#define LINKSIM_DSP_HPP

#include <cstddef>
#include <vector>

#include "linksim/iq.hpp"

namespace linksim::dsp {

/// Mixes the buffer with exp(i*2*pi*offset_hz*n/fs) and bumps the
/// center frequency metadata by offset_hz. |offset_hz| must be below Nyquist.
IqBuffer frequency_shift(const IqBuffer& buf, double offset_hz);

/// Same rotation as frequency_shift but leaves center_freq_hz untouched
/// (models an oscillator error rather than retuning).
IqBuffer rotate_only(const IqBuffer& buf, double offset_hz);

/// Scales every sample by 10^(dB/20); mean power scales by 10^(dB/10).
IqBuffer apply_gain(const IqBuffer& buf, DbGain gain);

/// (1/N) * sum |x[n]|^2. Errors on an empty buffer.
double mean_power(const IqBuffer& buf);
double mean_power(const std::vector<ComplexSample>& samples);

/// Unitary in-place FFT (1/sqrt(N) both directions). Power-of-two sizes only.
void fft_inplace(std::vector<ComplexSample>& x, bool inverse);

/// Unitary DFT of a whole buffer; metadata passes through. inverse(dft(x)) == x.
IqBuffer dft(const IqBuffer& buf, bool inverse);

/// Averaged periodogram, frequencies as offsets from center_freq_hz.
struct PsdTrace {
  std::vector<double> freq_hz;    // ascending, -fs/2 .. +fs/2 (exclusive)
  std::vector<double> power_db;   // per-bin power, clamped at the dB floor
  /// Sum of per-bin linear power; approximately the buffer's mean power.
  double integrated_power() const;
};

inline constexpr double kPsdFloorDb = -200.0;

/// Welch estimate: Hann window, overlapping segments, window-compensated so
/// the bins sum to the mean power. segment_len must be a supported DFT size.
PsdTrace welch_psd(const IqBuffer& buf, std::size_t segment_len, double overlap);

}  // namespace linksim::dsp

#endif  // LINKSIM_DSP_HPP
