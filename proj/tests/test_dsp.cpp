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
#include <complex>

#include "linksim/dsp.hpp"
#include "linksim/rng.hpp"

using namespace linksim;

namespace {

IqBuffer tone(double freq_hz, double rate, std::size_t count, double amp = 1.0) {
  IqBuffer buf;
  buf.sample_rate_hz = rate;
  buf.samples.resize(count);
  for (std::size_t n = 0; n < count; ++n) {
    buf.samples[n] = std::polar(amp, 2.0 * M_PI * freq_hz / rate * static_cast<double>(n));
  }
  return buf;
}

IqBuffer random_buffer(std::size_t count, std::uint64_t seed, double rate = 1e6) {
  Rng rng(seed);
  IqBuffer buf;
  buf.sample_rate_hz = rate;
  buf.samples.resize(count);
  for (auto& s : buf.samples) s = rng.complex_gaussian();
  return buf;
}

// independent direct DFT, the oracle for transform and periodogram checks
std::vector<ComplexSample> naive_dft(const std::vector<ComplexSample>& x) {
  const std::size_t n = x.size();
  std::vector<ComplexSample> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    ComplexSample acc{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
      acc += x[t] * std::polar(1.0, -2.0 * M_PI * static_cast<double>(k * t) / static_cast<double>(n));
    }
    out[k] = acc / std::sqrt(static_cast<double>(n));
  }
  return out;
}

double naive_periodogram_peak_hz(const IqBuffer& buf) {
  const auto spec = naive_dft(buf.samples);
  std::size_t best = 0;
  for (std::size_t k = 1; k < spec.size(); ++k) {
    if (std::norm(spec[k]) > std::norm(spec[best])) best = k;
  }
  const double bin = buf.sample_rate_hz / static_cast<double>(spec.size());
  const long m = best <= spec.size() / 2 ? static_cast<long>(best)
                                         : static_cast<long>(best) - static_cast<long>(spec.size());
  return static_cast<double>(m) * bin;
}

}  // namespace

TEST_CASE("frequency_shift inverse composition returns the original buffer") {
  const IqBuffer buf = random_buffer(4096, 7);
  const IqBuffer back = dsp::frequency_shift(dsp::frequency_shift(buf, 123456.0), -123456.0);
  for (std::size_t n = 0; n < buf.size(); ++n) {
    CHECK(std::abs(back.samples[n] - buf.samples[n]) < 1e-12);
  }
  CHECK(back.center_freq_hz == doctest::Approx(buf.center_freq_hz).epsilon(1e-12));
}

TEST_CASE("frequency_shift by zero is exact identity") {
  const IqBuffer buf = random_buffer(256, 9);
  const IqBuffer out = dsp::frequency_shift(buf, 0.0);
  for (std::size_t n = 0; n < buf.size(); ++n) CHECK(out.samples[n] == buf.samples[n]);
}

TEST_CASE("frequency_shift moves a tone where the direct-DFT oracle says") {
  const double rate = 8e6;
  IqBuffer buf = tone(1e6, rate, 512);
  const IqBuffer shifted = dsp::frequency_shift(buf, 2e6);
  const double peak = naive_periodogram_peak_hz(shifted);
  CHECK(peak == doctest::Approx(3e6).epsilon(1e-6));
}

TEST_CASE("frequency_shift preserves power and rejects offsets beyond Nyquist") {
  const IqBuffer buf = random_buffer(2048, 21, 15.36e6);
  const double before = dsp::mean_power(buf);
  const double after = dsp::mean_power(dsp::frequency_shift(buf, 4.5e6));
  CHECK(std::abs(after - before) / before < 1e-12);
  CHECK_THROWS_AS((void)dsp::frequency_shift(buf, 7.69e6), validation_error);
  CHECK_THROWS_AS((void)dsp::frequency_shift(buf, -7.68e6), validation_error);
}

TEST_CASE("apply_gain matches the dB power convention") {
  const IqBuffer buf = random_buffer(4096, 3);
  const double p0 = dsp::mean_power(buf);

  SUBCASE("0 dB is an identity") {
    const IqBuffer out = dsp::apply_gain(buf, DbGain(0.0));
    for (std::size_t n = 0; n < buf.size(); ++n) CHECK(out.samples[n] == buf.samples[n]);
  }
  SUBCASE("18 dB scales power by 10^1.8") {
    const double factor = dsp::mean_power(dsp::apply_gain(buf, DbGain(18.0))) / p0;
    CHECK(std::abs(factor - std::pow(10.0, 1.8)) < 1e-9);
  }
  SUBCASE("-3.0103 dB halves power") {
    const double factor = dsp::mean_power(dsp::apply_gain(buf, DbGain(-3.0103))) / p0;
    CHECK(std::abs(factor - std::pow(10.0, -0.30103)) < 1e-12);
    CHECK(std::abs(factor - 0.5) < 1e-7);  // 3.0103 is log10(2) rounded to 5 digits
  }
  SUBCASE("gains compose additively") {
    const IqBuffer once = dsp::apply_gain(dsp::apply_gain(buf, DbGain(5.5)), DbGain(-2.25));
    const IqBuffer both = dsp::apply_gain(buf, DbGain(3.25));
    for (std::size_t n = 0; n < buf.size(); ++n) {
      CHECK(std::abs(once.samples[n] - both.samples[n]) < 1e-9);
    }
  }
}

TEST_CASE("mean_power closed-form cases") {
  IqBuffer ones;
  ones.sample_rate_hz = 1.0;
  ones.samples.assign(17, ComplexSample{1.0, 0.0});
  CHECK(dsp::mean_power(ones) == doctest::Approx(1.0).epsilon(1e-15));

  IqBuffer quad;
  quad.sample_rate_hz = 1.0;
  quad.samples = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  CHECK(dsp::mean_power(quad) == doctest::Approx(1.0).epsilon(1e-15));

  IqBuffer empty;
  empty.sample_rate_hz = 1.0;
  CHECK_THROWS_AS((void)dsp::mean_power(empty), validation_error);
}

TEST_CASE("mean_power of unit-variance complex Gaussian draws is 1 within 2%") {
  const IqBuffer buf = random_buffer(100000, 42);
  CHECK(dsp::mean_power(buf) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("dft of an impulse is flat with unitary scaling") {
  IqBuffer buf;
  buf.sample_rate_hz = 1.0;
  buf.samples = {{1, 0}, {0, 0}, {0, 0}, {0, 0}};
  const IqBuffer spec = dsp::dft(buf, false);
  for (const auto& v : spec.samples) {
    CHECK(v.real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(v.imag()) < 1e-12);
  }
}

TEST_CASE("dft round trip and Parseval hold to 1e-9") {
  const IqBuffer buf = random_buffer(1024, 5);
  const IqBuffer spec = dsp::dft(buf, false);
  const IqBuffer back = dsp::dft(spec, true);
  double max_err = 0.0;
  for (std::size_t n = 0; n < buf.size(); ++n) {
    max_err = std::max(max_err, std::abs(back.samples[n] - buf.samples[n]));
  }
  CHECK(max_err < 1e-9);

  double et = 0.0, ef = 0.0;
  for (const auto& v : buf.samples) et += std::norm(v);
  for (const auto& v : spec.samples) ef += std::norm(v);
  CHECK(std::abs(et - ef) / et < 1e-9);
}

TEST_CASE("dft matches the independent direct transform") {
  const IqBuffer buf = random_buffer(64, 11);
  const IqBuffer fast = dsp::dft(buf, false);
  const auto slow = naive_dft(buf.samples);
  for (std::size_t k = 0; k < slow.size(); ++k) {
    CHECK(std::abs(fast.samples[k] - slow[k]) < 1e-9);
  }
}

TEST_CASE("dft rejects non power-of-two sizes naming the supported family") {
  const IqBuffer buf = random_buffer(1000, 2);
  CHECK_THROWS_WITH_AS((void)dsp::dft(buf, false),
                       doctest::Contains("powers of two"), validation_error);
}

TEST_CASE("welch_psd locates a tone at +4.5 MHz") {
  const double rate = 15.36e6;
  const IqBuffer buf = tone(4.5e6, rate, 16384);
  const auto trace = dsp::welch_psd(buf, 1024, 0.5);
  std::size_t best = 0;
  for (std::size_t i = 1; i < trace.power_db.size(); ++i) {
    if (trace.power_db[i] > trace.power_db[best]) best = i;
  }
  const double bin = rate / 1024.0;
  CHECK(std::abs(trace.freq_hz[best] - 4.5e6) <= bin);
  CHECK(trace.integrated_power() == doctest::Approx(dsp::mean_power(buf)).epsilon(0.05));
}

TEST_CASE("welch_psd of white noise is flat within 3 dB over 100 segments") {
  IqBuffer buf = random_buffer(3200, 77);
  const auto trace = dsp::welch_psd(buf, 32, 0.0);  // 100 non-overlapping segments
  double lo = trace.power_db.front(), hi = trace.power_db.front();
  for (double v : trace.power_db) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo < 3.0);
}

TEST_CASE("welch_psd clamps zero buffers at the dB floor and validates inputs") {
  IqBuffer buf;
  buf.sample_rate_hz = 1e6;
  buf.samples.assign(256, ComplexSample{0.0, 0.0});
  const auto trace = dsp::welch_psd(buf, 64, 0.5);
  for (double v : trace.power_db) CHECK(v == doctest::Approx(dsp::kPsdFloorDb));
  CHECK_THROWS_AS((void)dsp::welch_psd(buf, 512, 0.5), validation_error);
  CHECK_THROWS_AS((void)dsp::welch_psd(buf, 64, 1.0), validation_error);
}

TEST_CASE("welch_psd integrated power tracks mean power for a noisy mix") {
  IqBuffer buf = random_buffer(8192, 13, 15.36e6);
  const IqBuffer t = tone(2e6, 15.36e6, 8192, 2.0);
  for (std::size_t n = 0; n < buf.size(); ++n) buf.samples[n] += t.samples[n];
  const auto trace = dsp::welch_psd(buf, 512, 0.5);
  CHECK(trace.integrated_power() == doctest::Approx(dsp::mean_power(buf)).epsilon(0.05));
}

TEST_CASE("identical seeds reproduce identical draws") {
  Rng a(1234), b(1234);
  for (int i = 0; i < 10000; ++i) REQUIRE(a.next_bits() == b.next_bits());
}

TEST_CASE("adjacent seeds diverge within the first draws") {
  Rng a(1000), b(1001);
  bool differ = false;
  for (int i = 0; i < 16 && !differ; ++i) differ = a.next_bits() != b.next_bits();
  CHECK(differ);
}

TEST_CASE("complex Gaussian moments: zero mean, 0.5 variance per component") {
  Rng rng(99);
  const std::size_t n = 1000000;
  double mr = 0.0, mi = 0.0, vr = 0.0, vi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = rng.complex_gaussian();
    mr += z.real();
    mi += z.imag();
    vr += z.real() * z.real();
    vi += z.imag() * z.imag();
  }
  mr /= n; mi /= n; vr /= n; vi /= n;
  CHECK(std::abs(mr) < 0.01);
  CHECK(std::abs(mi) < 0.01);
  CHECK(std::abs(vr - 0.5) < 0.01);
  CHECK(std::abs(vi - 0.5) < 0.01);
}
