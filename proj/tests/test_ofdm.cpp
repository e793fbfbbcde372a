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

#include "linksim/channel.hpp"
#include "linksim/harness.hpp"
#include "linksim/kpi.hpp"
#include "linksim/ofdm.hpp"
#include "linksim/rng.hpp"

using namespace linksim;

namespace {

BitPayload bits_from_string(const std::string& s) {
  BitPayload p;
  for (char c : s) p.bits.push_back(c == '1');
  return p;
}

LinkConfig toy_config(std::size_t fft, std::size_t k, std::size_t symbols, std::size_t dk,
                      std::size_t dl) {
  LinkConfig cfg;
  cfg.label = "toy";
  cfg.fft_size = fft;
  cfg.num_subcarriers = k;
  cfg.subcarrier_spacing_hz = 15e3;
  cfg.cp_len = fft / 16;
  cfg.num_symbols_per_frame = symbols;
  cfg.modulation = Modulation::qpsk;
  cfg.pilot_spacing_freq = dk;
  cfg.pilot_spacing_time = dl;
  cfg.sample_rate_hz = static_cast<double>(fft) * cfg.subcarrier_spacing_hz;
  cfg.validate();
  return cfg;
}

}  // namespace

TEST_CASE("qpsk map anchors 00 at the positive corner") {
  const auto symbols = qam_map(bits_from_string("00"), Modulation::qpsk);
  REQUIRE(symbols.size() == 1);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(symbols[0].real() == doctest::Approx(s).epsilon(1e-15));
  CHECK(symbols[0].imag() == doctest::Approx(s).epsilon(1e-15));
}

TEST_CASE("qam64 constellation has unit mean power") {
  double acc = 0.0;
  for (unsigned v = 0; v < 64; ++v) {
    BitPayload p;
    for (int j = 5; j >= 0; --j) p.bits.push_back((v >> j) & 1u);
    acc += std::norm(qam_map(p, Modulation::qam64)[0]);
  }
  CHECK(std::abs(acc / 64.0 - 1.0) < 1e-12);
}

TEST_CASE("qam round trip over every constellation point") {
  for (Modulation mod : {Modulation::qpsk, Modulation::qam16, Modulation::qam64}) {
    const std::size_t m = bits_per_symbol(mod);
    for (unsigned v = 0; v < (1u << m); ++v) {
      BitPayload p;
      for (int j = static_cast<int>(m) - 1; j >= 0; --j) p.bits.push_back((v >> j) & 1u);
      const auto rx = qam_demap(qam_map(p, mod), mod);
      REQUIRE(rx.bits == p.bits);
    }
  }
}

TEST_CASE("qam_demap tie at the origin resolves to the all-zero pattern") {
  const auto bits = qam_demap({ComplexSample{0.0, 0.0}}, Modulation::qpsk);
  CHECK(bits.bits == std::vector<std::uint8_t>{0, 0});
}

TEST_CASE("qam64 survives sigma 0.01 per-component noise with zero errors") {
  Rng rng(4242);
  BitPayload tx;
  for (std::size_t i = 0; i < 60000; ++i) tx.bits.push_back(rng.next_bits() & 1u);
  auto symbols = qam_map(tx, Modulation::qam64);
  for (auto& s : symbols) s += ComplexSample(0.01 * rng.gaussian(), 0.01 * rng.gaussian());
  CHECK(kpi::ber(tx, qam_demap(symbols, Modulation::qam64)) == 0.0);
}

TEST_CASE("qam_map rejects bit counts not divisible by bits per symbol") {
  CHECK_THROWS_AS((void)qam_map(bits_from_string("00000"), Modulation::qam64), validation_error);
}

TEST_CASE("pilot cell count follows the lattice formula") {
  const LinkConfig toy = toy_config(16, 10, 5, 3, 2);
  // ceil(10/3) * ceil(5/2)
  CHECK(toy.pilot_count() == 4 * 3);

  const LinkConfig lte = link_preset("lte-a-like");
  CHECK(lte.pilot_count() == 100 * 14);
  CHECK(lte.data_cell_count() == 600 * 14 - 1400);

  const LinkConfig nr = link_preset("nr-like");
  CHECK(nr.pilot_count() == 48 * 14);
}

TEST_CASE("presets satisfy the numerology constraints") {
  const LinkConfig lte = link_preset("lte-a-like");
  CHECK(lte.sample_rate_hz == doctest::Approx(15.36e6));
  CHECK(lte.fft_size == 1024);
  const LinkConfig nr = link_preset("nr-like");
  CHECK(nr.sample_rate_hz == doctest::Approx(15.36e6));
  CHECK(nr.num_subcarriers == 288);
  CHECK_THROWS_AS((void)link_preset("wimax"), validation_error);
}

TEST_CASE("build_grid is deterministic and round-trips the payload") {
  const LinkConfig cfg = link_preset("nr-like");
  const BitPayload payload = random_payload(cfg.payload_bits(), 31);
  const ResourceGrid a = build_grid(payload, cfg, 7);
  const ResourceGrid b = build_grid(payload, cfg, 7);
  CHECK(a.cells == b.cells);

  const auto rx = qam_demap(a.cells_with_role(CellRole::data), cfg.modulation);
  CHECK(rx.bits == payload.bits);

  for (std::size_t l = 0; l < a.num_l(); ++l) {
    for (std::size_t k = 0; k < a.num_k(); ++k) {
      if (a.role(k, l) == CellRole::pilot) {
        CHECK(std::abs(std::abs(a.at(k, l)) - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("build_grid reports capacity mismatches with both counts") {
  const LinkConfig cfg = link_preset("nr-like");
  BitPayload bad;
  bad.bits.assign(100, 0);
  CHECK_THROWS_WITH_AS((void)build_grid(bad, cfg, 1), doctest::Contains("100"), validation_error);
}

TEST_CASE("ofdm_modulate of an all-zero grid is exactly zero") {
  const LinkConfig cfg = toy_config(64, 8, 2, 4, 1);
  ResourceGrid grid(cfg);  // all cells zero, including pilots
  const IqBuffer buf = ofdm_modulate(grid);
  CHECK(buf.size() == cfg.frame_samples());
  for (const auto& s : buf.samples) CHECK(std::abs(s) == 0.0);
}

TEST_CASE("ofdm_modulate output length follows the construction") {
  const LinkConfig cfg = link_preset("lte-a-like");
  const ResourceGrid grid = build_grid(random_payload(cfg.payload_bits(), 2), cfg, 3);
  CHECK(ofdm_modulate(grid).size() == 14 * (1024 + 72));
}

TEST_CASE("a single unit pilot produces the closed-form complex exponential") {
  const LinkConfig cfg = toy_config(64, 8, 1, 12, 1);
  ResourceGrid grid(cfg);
  const std::size_t k0 = 6;  // maps to bin offset +3
  grid.at(k0, 0) = ComplexSample{1.0, 0.0};
  const IqBuffer buf = ofdm_modulate(grid);
  const double amp = 1.0 / std::sqrt(64.0);
  for (std::size_t n = 0; n < 64; ++n) {
    const ComplexSample expected =
        amp * std::polar(1.0, 2.0 * M_PI * 3.0 * static_cast<double>(n) / 64.0);
    CHECK(std::abs(buf.samples[cfg.cp_len + n] - expected) < 1e-9);
  }
}

TEST_CASE("synchronize finds a clean frame exactly and reads near-zero CFO") {
  const LinkConfig cfg = link_preset("nr-like");
  const ResourceGrid grid = build_grid(random_payload(cfg.payload_bits(), 5), cfg, 11);
  const IqBuffer frame = ofdm_modulate(grid);

  Rng rng(8);
  IqBuffer buf;
  buf.sample_rate_hz = cfg.sample_rate_hz;
  const std::size_t lead = 700;
  buf.samples.assign(lead + frame.size() + 300, ComplexSample{0.0, 0.0});
  for (auto& s : buf.samples) s = 1e-4 * rng.complex_gaussian();
  for (std::size_t n = 0; n < frame.size(); ++n) buf.samples[lead + n] += frame.samples[n];

  const SyncEstimate est = synchronize(buf, cfg);
  CHECK(est.frame_start == lead);
  CHECK(std::abs(est.cfo_hz) < 5.0);
}

TEST_CASE("synchronize recovers an injected 1500 Hz CFO at 20 dB SNR") {
  const LinkConfig cfg = link_preset("nr-like");
  const ResourceGrid grid = build_grid(random_payload(cfg.payload_bits(), 6), cfg, 12);
  IqBuffer buf = apply_cfo(ofdm_modulate(grid), 1500.0);
  buf = add_awgn(buf, 20.0, 99).buf;
  const SyncEstimate est = synchronize(buf, cfg);
  CHECK(std::abs(est.cfo_hz - 1500.0) < 50.0);
}

TEST_CASE("CFO estimate is unbiased over 100 trials at 20 dB SNR") {
  const LinkConfig cfg = link_preset("nr-like");
  double err_acc = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const ResourceGrid grid =
        build_grid(random_payload(cfg.payload_bits(), derive_seed(t, "p")), cfg, t);
    IqBuffer buf = apply_cfo(ofdm_modulate(grid), 1500.0);
    buf = add_awgn(buf, 20.0, derive_seed(t, "n")).buf;
    err_acc += estimate_sync(buf, cfg).cfo_hz - 1500.0;
  }
  CHECK(std::abs(err_acc / 100.0) < 10.0);
}

TEST_CASE("synchronize on pure noise raises a sync failure") {
  const LinkConfig cfg = link_preset("nr-like");
  Rng rng(123);
  IqBuffer buf;
  buf.sample_rate_hz = cfg.sample_rate_hz;
  buf.samples.resize(cfg.frame_samples());
  for (auto& s : buf.samples) s = rng.complex_gaussian();
  CHECK_THROWS_AS((void)synchronize(buf, cfg), sync_failure);
}

TEST_CASE("ofdm_demodulate inverts ofdm_modulate over a clean channel") {
  const LinkConfig cfg = link_preset("nr-like");
  const ResourceGrid grid = build_grid(random_payload(cfg.payload_bits(), 17), cfg, 23);
  const ResourceGrid back = ofdm_demodulate(ofdm_modulate(grid), cfg, 0);
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    CHECK(std::abs(back.cells[i] - grid.cells[i]) < 1e-9);
  }
}

TEST_CASE("an early demodulation start turns into a pure per-cell phase ramp") {
  const LinkConfig cfg = toy_config(64, 8, 3, 4, 1);
  ResourceGrid grid(cfg);
  Rng rng(5);
  for (auto& c : grid.cells) c = std::polar(1.0, 2.0 * M_PI * rng.uniform());
  const IqBuffer frame = ofdm_modulate(grid);

  const std::size_t delta = cfg.cp_len / 2;
  IqBuffer padded;
  padded.sample_rate_hz = cfg.sample_rate_hz;
  padded.samples.assign(delta, ComplexSample{0.0, 0.0});
  padded.samples.insert(padded.samples.end(), frame.samples.begin(), frame.samples.end());

  // demodulating delta samples early circularly shifts each symbol
  const ResourceGrid shifted = ofdm_demodulate(padded, cfg, 0);
  for (std::size_t l = 0; l < grid.num_l(); ++l) {
    for (std::size_t k = 0; k < grid.num_k(); ++k) {
      const ComplexSample ratio = shifted.at(k, l) / grid.at(k, l);
      CHECK(std::abs(std::abs(ratio) - 1.0) < 1e-9);
    }
    // same-symbol ratios must agree with the DFT shift theorem: the phase is
    // linear in the bin index, so ratios of adjacent subcarriers are constant
    const ComplexSample r0 = shifted.at(1, l) / grid.at(1, l) / (shifted.at(0, l) / grid.at(0, l));
    const ComplexSample r1 = shifted.at(2, l) / grid.at(2, l) / (shifted.at(1, l) / grid.at(1, l));
    CHECK(std::abs(r0 - r1) < 1e-9);
  }
}

TEST_CASE("a flat channel gain passes straight through demodulation") {
  const LinkConfig cfg = link_preset("nr-like");
  const ResourceGrid grid = build_grid(random_payload(cfg.payload_bits(), 3), cfg, 4);
  IqBuffer buf = ofdm_modulate(grid);
  const ComplexSample g{0.8, -0.6};
  for (auto& s : buf.samples) s *= g;
  const ResourceGrid back = ofdm_demodulate(buf, cfg, 0);
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    CHECK(std::abs(back.cells[i] - g * grid.cells[i]) < 1e-9);
  }
}

TEST_CASE("ofdm_demodulate rejects truncated frames") {
  const LinkConfig cfg = link_preset("nr-like");
  const ResourceGrid grid = build_grid(random_payload(cfg.payload_bits(), 3), cfg, 4);
  IqBuffer buf = ofdm_modulate(grid);
  buf.samples.resize(buf.size() - 10);
  CHECK_THROWS_AS((void)ofdm_demodulate(buf, cfg, 0), validation_error);
}

TEST_CASE("estimate_channel reproduces a unit channel exactly") {
  const LinkConfig cfg = link_preset("nr-like");
  const ResourceGrid grid = build_grid(random_payload(cfg.payload_bits(), 8), cfg, 9);
  const ResourceGrid raw = ofdm_demodulate(ofdm_modulate(grid), cfg, 0);
  const ResourceGrid h = estimate_channel(raw, grid);
  for (const auto& c : h.cells) CHECK(std::abs(c - ComplexSample{1.0, 0.0}) < 1e-9);
}

TEST_CASE("estimate_channel tracks a shallow linear phase ramp across frequency") {
  const LinkConfig cfg = link_preset("lte-a-like");
  const ResourceGrid grid = build_grid(random_payload(cfg.payload_bits(), 8), cfg, 9);
  ResourceGrid raw = ofdm_demodulate(ofdm_modulate(grid), cfg, 0);
  const double slope = 2e-4;  // radians per subcarrier
  for (std::size_t l = 0; l < raw.num_l(); ++l) {
    for (std::size_t k = 0; k < raw.num_k(); ++k) {
      raw.at(k, l) *= std::polar(1.0, slope * static_cast<double>(k));
    }
  }
  const ResourceGrid h = estimate_channel(raw, grid);
  for (std::size_t l = 0; l < raw.num_l(); ++l) {
    for (std::size_t k = 0; k < 594; ++k) {  // interior: inside the pilot span
      const ComplexSample expected = std::polar(1.0, slope * static_cast<double>(k));
      REQUIRE(std::abs(h.at(k, l) - expected) < 1e-6);
    }
  }
}

TEST_CASE("a constant gain estimate cancels in equalization") {
  const LinkConfig cfg = link_preset("nr-like");
  const ResourceGrid grid = build_grid(random_payload(cfg.payload_bits(), 2), cfg, 2);
  IqBuffer buf = ofdm_modulate(grid);
  for (auto& s : buf.samples) s *= 2.0;
  const ResourceGrid raw = ofdm_demodulate(buf, cfg, 0);
  const ResourceGrid eq = equalize(raw, estimate_channel(raw, grid));
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    CHECK(std::abs(eq.cells[i] - grid.cells[i]) < 1e-9);
  }
}

TEST_CASE("estimate_channel requires pilots") {
  const LinkConfig cfg = toy_config(64, 8, 2, 4, 1);
  ResourceGrid grid(cfg);
  std::fill(grid.roles.begin(), grid.roles.end(), CellRole::data);
  for (auto& c : grid.cells) c = ComplexSample{1.0, 0.0};
  CHECK_THROWS_AS((void)estimate_channel(grid, grid), validation_error);
}

TEST_CASE("equalize is exact inversion and flags deep fades") {
  const LinkConfig cfg = toy_config(64, 8, 2, 4, 1);
  ResourceGrid grid(cfg);
  Rng rng(77);
  for (auto& c : grid.cells) c = rng.complex_gaussian();
  ResourceGrid h(cfg);
  for (auto& c : h.cells) c = ComplexSample(0.5 + 1.5 * rng.uniform(), 0.3 * rng.uniform());
  ResourceGrid raw = grid;
  for (std::size_t i = 0; i < raw.cells.size(); ++i) raw.cells[i] *= h.cells[i];
  const ResourceGrid eq = equalize(raw, h);
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    CHECK(std::abs(eq.cells[i] - grid.cells[i]) < 1e-9);
  }

  h.at(3, 1) = ComplexSample{0.0, 0.0};
  CHECK_THROWS_WITH_AS((void)equalize(raw, h), doctest::Contains("subcarrier 3"),
                       validation_error);
}

TEST_CASE("end-to-end loopback with random flat channels decodes cleanly") {
  const LinkConfig cfg = link_preset("nr-like");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(derive_seed(seed, "chan"));
    const double mag = 0.5 + 1.5 * rng.uniform();
    const ComplexSample g = std::polar(mag, 2.0 * M_PI * rng.uniform());

    const BitPayload payload = random_payload(cfg.payload_bits(), derive_seed(seed, "bits"));
    const ResourceGrid grid = build_grid(payload, cfg, derive_seed(seed, "grid"));
    IqBuffer buf = ofdm_modulate(grid);
    for (auto& s : buf.samples) s *= g;

    const ResourceGrid raw = ofdm_demodulate(buf, cfg, estimate_sync(buf, cfg).frame_start);
    const ResourceGrid eq = equalize(raw, estimate_channel(raw, grid));
    const auto rx = qam_demap(eq.cells_with_role(CellRole::data), cfg.modulation);
    REQUIRE(kpi::ber(payload, rx) == 0.0);
  }
}

TEST_CASE("modulated mean power is stable across seeds") {
  const LinkConfig cfg = link_preset("lte-a-like");
  std::vector<double> powers;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ResourceGrid grid =
        build_grid(random_payload(cfg.payload_bits(), derive_seed(seed, "b")), cfg, seed);
    powers.push_back(dsp::mean_power(ofdm_modulate(grid)));
  }
  double mean = 0.0;
  for (double p : powers) mean += p;
  mean /= static_cast<double>(powers.size());
  for (double p : powers) CHECK(std::abs(p - mean) / mean < 0.05);
}
