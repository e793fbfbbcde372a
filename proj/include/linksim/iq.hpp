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
#ifndef LINKSIM_IQ_HPP
#define LINKSIM_IQ_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace linksim {

using ComplexSample = std::complex<double>;

/// Bad parameters, malformed configs, contract violations. CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File system and serialization failures. CLI maps this to exit code 3.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown by synchronize() when no frame is found above the correlation threshold.
class sync_failure : public std::runtime_error {
 public:
  explicit sync_failure(const std::string& msg) : std::runtime_error(msg) {}
};

/// A finite block of complex baseband samples plus capture metadata.
/// center_freq_hz is the nominal RF center; it never enters sample arithmetic.
struct IqBuffer {
  std::vector<ComplexSample> samples;
  double sample_rate_hz = 1.0;
  double center_freq_hz = 0.0;

  IqBuffer() = default;
  IqBuffer(std::vector<ComplexSample> s, double rate, double center = 0.0)
      : samples(std::move(s)), sample_rate_hz(rate), center_freq_hz(center) {}

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }

  /// Checks rate positivity and sample finiteness; throws validation_error.
  void validate() const {
    if (!(sample_rate_hz > 0.0)) {
      throw validation_error("IqBuffer: sample rate must be > 0, got " +
                             std::to_string(sample_rate_hz));
    }
    for (std::size_t n = 0; n < samples.size(); ++n) {
      if (!std::isfinite(samples[n].real()) || !std::isfinite(samples[n].imag())) {
        throw validation_error("IqBuffer: non-finite sample at index " + std::to_string(n));
      }
    }
  }
};

/// Gain in decibels, power convention: linear power factor 10^(dB/10),
/// amplitude factor 10^(dB/20).
struct DbGain {
  double value_db = 0.0;

  constexpr DbGain() = default;
  constexpr explicit DbGain(double db) : value_db(db) {}

  double linear_power() const { return std::pow(10.0, value_db / 10.0); }
  double linear_amplitude() const { return std::pow(10.0, value_db / 20.0); }
};

}  // namespace linksim

#endif  // LINKSIM_IQ_HPP
