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
#include "linksim/ofdm.hpp"

#include <cmath>

#include "linksim/dsp.hpp"
#include "linksim/rng.hpp"

namespace linksim {

namespace {

// active subcarrier k -> FFT bin, symmetric around a nulled DC
std::size_t bin_for_subcarrier(std::size_t k, std::size_t num_sc, std::size_t fft_size) {
  const long half = static_cast<long>(num_sc) / 2;
  const long m = (static_cast<long>(k) < half) ? static_cast<long>(k) - half
                                               : static_cast<long>(k) - half + 1;
  return static_cast<std::size_t>((m + static_cast<long>(fft_size)) % static_cast<long>(fft_size));
}

}  // namespace

std::size_t LinkConfig::pilot_count() const {
  const auto ceil_div = [](std::size_t a, std::size_t b) { return (a + b - 1) / b; };
  return ceil_div(num_subcarriers, pilot_spacing_freq) *
         ceil_div(num_symbols_per_frame, pilot_spacing_time);
}

std::size_t LinkConfig::data_cell_count() const {
  return num_subcarriers * num_symbols_per_frame - pilot_count();
}

void LinkConfig::validate() const {
  if (fft_size == 0 || (fft_size & (fft_size - 1)) != 0) {
    throw validation_error("LinkConfig: fft_size must be a power of two");
  }
  if (num_subcarriers == 0 || num_subcarriers % 2 != 0 || num_subcarriers >= fft_size) {
    throw validation_error("LinkConfig: num_subcarriers must be even and below fft_size");
  }
  if (cp_len >= fft_size) throw validation_error("LinkConfig: cp_len must be below fft_size");
  if (num_symbols_per_frame == 0) throw validation_error("LinkConfig: empty frame");
  if (pilot_spacing_freq == 0 || pilot_spacing_time == 0) {
    throw validation_error("LinkConfig: pilot spacings must be >= 1");
  }
  if (!(subcarrier_spacing_hz > 0.0)) {
    throw validation_error("LinkConfig: subcarrier spacing must be > 0");
  }
  const double expected = static_cast<double>(fft_size) * subcarrier_spacing_hz;
  if (std::abs(sample_rate_hz - expected) > 1e-6 * expected) {
    throw validation_error("LinkConfig: sample_rate_hz must equal fft_size * subcarrier_spacing");
  }
}

LinkConfig link_preset(const std::string& name) {
  LinkConfig cfg;
  cfg.label = name;
  cfg.modulation = Modulation::qam64;
  cfg.pilot_spacing_freq = 6;
  cfg.pilot_spacing_time = 1;
  cfg.num_symbols_per_frame = 14;
  if (name == "lte-a-like") {
    cfg.fft_size = 1024;
    cfg.num_subcarriers = 600;
    cfg.subcarrier_spacing_hz = 15e3;
    cfg.cp_len = 72;
  } else if (name == "nr-like") {
    cfg.fft_size = 512;
    cfg.num_subcarriers = 288;  // 24 resource blocks
    cfg.subcarrier_spacing_hz = 30e3;
    cfg.cp_len = 36;
  } else {
    throw validation_error("unknown link preset '" + name + "' (expected lte-a-like|nr-like)");
  }
  cfg.sample_rate_hz = static_cast<double>(cfg.fft_size) * cfg.subcarrier_spacing_hz;
  cfg.validate();
  return cfg;
}

ResourceGrid::ResourceGrid(const LinkConfig& cfg)
    : config(cfg),
      cells(cfg.num_subcarriers * cfg.num_symbols_per_frame, ComplexSample{0.0, 0.0}),
      roles(cfg.num_subcarriers * cfg.num_symbols_per_frame, CellRole::data) {
  for (std::size_t l = 0; l < num_l(); ++l) {
    for (std::size_t k = 0; k < num_k(); ++k) {
      if (cfg.is_pilot(k, l)) roles[l * num_k() + k] = CellRole::pilot;
    }
  }
}

std::vector<ComplexSample> ResourceGrid::cells_with_role(CellRole r) const {
  std::vector<ComplexSample> out;
  for (std::size_t l = 0; l < num_l(); ++l) {
    for (std::size_t k = 0; k < num_k(); ++k) {
      if (role(k, l) == r) out.push_back(at(k, l));
    }
  }
  return out;
}

ResourceGrid build_grid(const BitPayload& payload, const LinkConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (payload.size() != cfg.payload_bits()) {
    throw validation_error("build_grid: payload has " + std::to_string(payload.size()) +
                           " bits, capacity is " + std::to_string(cfg.payload_bits()));
  }
  ResourceGrid grid(cfg);
  const auto data_symbols = qam_map(payload, cfg.modulation);

  Rng pilot_rng(seed);
  const double s = 1.0 / std::sqrt(2.0);
  std::size_t next_data = 0;
  for (std::size_t l = 0; l < grid.num_l(); ++l) {
    for (std::size_t k = 0; k < grid.num_k(); ++k) {
      if (grid.role(k, l) == CellRole::pilot) {
        const std::uint64_t b = pilot_rng.next_bits();
        grid.at(k, l) = ComplexSample((b & 1u) ? -s : s, (b & 2u) ? -s : s);
      } else {
        grid.at(k, l) = data_symbols[next_data++];
      }
    }
  }
  return grid;
}

IqBuffer ofdm_modulate(const ResourceGrid& grid) {
  const LinkConfig& cfg = grid.config;
  const std::size_t n = cfg.fft_size;
  IqBuffer out;
  out.sample_rate_hz = cfg.sample_rate_hz;
  out.samples.reserve(cfg.frame_samples());

  std::vector<ComplexSample> bins(n);
  for (std::size_t l = 0; l < grid.num_l(); ++l) {
    std::fill(bins.begin(), bins.end(), ComplexSample{0.0, 0.0});
    for (std::size_t k = 0; k < grid.num_k(); ++k) {
      bins[bin_for_subcarrier(k, grid.num_k(), n)] = grid.at(k, l);
    }
    dsp::fft_inplace(bins, true);
    // cyclic prefix, then the symbol body
    out.samples.insert(out.samples.end(), bins.end() - static_cast<long>(cfg.cp_len), bins.end());
    out.samples.insert(out.samples.end(), bins.begin(), bins.end());
  }
  return out;
}

SyncEstimate estimate_sync(const IqBuffer& buf, const LinkConfig& cfg) {
  const std::size_t frame = cfg.frame_samples();
  if (buf.size() < frame) {
    throw validation_error("synchronize: buffer shorter than one frame");
  }
  const std::size_t n = cfg.fft_size;
  const std::size_t sym = cfg.samples_per_symbol();

  SyncEstimate best;
  ComplexSample best_corr{0.0, 0.0};
  double best_mag = -1.0;
  for (std::size_t s = 0; s + frame <= buf.size(); ++s) {
    ComplexSample corr{0.0, 0.0};
    double energy = 0.0;
    for (std::size_t l = 0; l < cfg.num_symbols_per_frame; ++l) {
      const std::size_t base = s + l * sym;
      for (std::size_t i = 0; i < cfg.cp_len; ++i) {
        const ComplexSample a = buf.samples[base + i];
        const ComplexSample b = buf.samples[base + i + n];
        corr += std::conj(a) * b;
        energy += 0.5 * (std::norm(a) + std::norm(b));
      }
    }
    const double mag = std::abs(corr);
    if (mag > best_mag) {
      best_mag = mag;
      best_corr = corr;
      best.frame_start = s;
      best.quality = energy > 0.0 ? mag / energy : 0.0;
    }
  }
  best.cfo_hz = std::arg(best_corr) / (2.0 * M_PI) * cfg.subcarrier_spacing_hz;
  return best;
}

SyncEstimate synchronize(const IqBuffer& buf, const LinkConfig& cfg) {
  SyncEstimate est = estimate_sync(buf, cfg);
  if (est.quality < kSyncQualityThreshold) {
    throw sync_failure("sync failure: correlation quality " + std::to_string(est.quality) +
                       " below threshold " + std::to_string(kSyncQualityThreshold));
  }
  return est;
}

ResourceGrid ofdm_demodulate(const IqBuffer& buf, const LinkConfig& cfg, std::size_t frame_start) {
  if (frame_start + cfg.frame_samples() > buf.size()) {
    throw validation_error("ofdm_demodulate: frame truncated (start " +
                           std::to_string(frame_start) + ", need " +
                           std::to_string(cfg.frame_samples()) + " of " +
                           std::to_string(buf.size()) + " samples)");
  }
  ResourceGrid grid(cfg);
  std::vector<ComplexSample> bins(cfg.fft_size);
  for (std::size_t l = 0; l < grid.num_l(); ++l) {
    const std::size_t base = frame_start + l * cfg.samples_per_symbol() + cfg.cp_len;
    std::copy(buf.samples.begin() + static_cast<long>(base),
              buf.samples.begin() + static_cast<long>(base + cfg.fft_size), bins.begin());
    dsp::fft_inplace(bins, false);
    for (std::size_t k = 0; k < grid.num_k(); ++k) {
      grid.at(k, l) = bins[bin_for_subcarrier(k, grid.num_k(), cfg.fft_size)];
    }
  }
  return grid;
}

ResourceGrid estimate_channel(const ResourceGrid& raw, const ResourceGrid& reference) {
  const LinkConfig& cfg = raw.config;
  if (raw.num_k() != reference.num_k() || raw.num_l() != reference.num_l()) {
    throw validation_error("estimate_channel: grid shapes differ");
  }

  // pilot lattice is taken from the reference grid's role labels
  std::vector<std::size_t> pilot_ks, pilot_ls;
  for (std::size_t l = 0; l < reference.num_l(); ++l) {
    bool any = false;
    for (std::size_t k = 0; k < reference.num_k(); ++k) {
      if (reference.role(k, l) == CellRole::pilot) {
        any = true;
        if (pilot_ls.empty()) pilot_ks.push_back(k);
      }
    }
    if (any) pilot_ls.push_back(l);
  }
  if (pilot_ls.empty() || pilot_ks.empty()) {
    throw validation_error("estimate_channel: grid has no pilots");
  }

  // piecewise-linear weights between bracketing lattice points, nearest at edges
  auto bracket = [](const std::vector<std::size_t>& grid_points, std::size_t pos,
                    std::size_t& lo, std::size_t& hi, double& w) {
    if (pos <= grid_points.front()) {
      lo = hi = 0;
      w = 0.0;
      return;
    }
    if (pos >= grid_points.back()) {
      lo = hi = grid_points.size() - 1;
      w = 0.0;
      return;
    }
    std::size_t i = 0;
    while (grid_points[i + 1] < pos) ++i;
    lo = i;
    hi = i + 1;
    w = static_cast<double>(pos - grid_points[lo]) /
        static_cast<double>(grid_points[hi] - grid_points[lo]);
  };

  ResourceGrid h(cfg);
  // least squares at pilots, linear interpolation across frequency
  std::vector<std::vector<ComplexSample>> rows(pilot_ls.size(),
                                               std::vector<ComplexSample>(raw.num_k()));
  for (std::size_t li = 0; li < pilot_ls.size(); ++li) {
    const std::size_t l = pilot_ls[li];
    std::vector<ComplexSample> hp(pilot_ks.size());
    for (std::size_t i = 0; i < pilot_ks.size(); ++i) {
      const ComplexSample ref = reference.at(pilot_ks[i], l);
      if (std::abs(ref) < 1e-12) {
        throw validation_error("estimate_channel: zero reference pilot");
      }
      hp[i] = raw.at(pilot_ks[i], l) / ref;
    }
    for (std::size_t k = 0; k < raw.num_k(); ++k) {
      std::size_t lo, hi;
      double w;
      bracket(pilot_ks, k, lo, hi, w);
      rows[li][k] = hp[lo] * (1.0 - w) + hp[hi] * w;
    }
  }
  // then across time
  for (std::size_t l = 0; l < raw.num_l(); ++l) {
    std::size_t lo, hi;
    double w;
    bracket(pilot_ls, l, lo, hi, w);
    for (std::size_t k = 0; k < raw.num_k(); ++k) {
      h.at(k, l) = rows[lo][k] * (1.0 - w) + rows[hi][k] * w;
    }
  }
  return h;
}

ResourceGrid equalize(const ResourceGrid& raw, const ResourceGrid& h_hat) {
  if (raw.num_k() != h_hat.num_k() || raw.num_l() != h_hat.num_l()) {
    throw validation_error("equalize: grid shapes differ");
  }
  ResourceGrid out = raw;
  for (std::size_t l = 0; l < raw.num_l(); ++l) {
    for (std::size_t k = 0; k < raw.num_k(); ++k) {
      const ComplexSample h = h_hat.at(k, l);
      if (std::abs(h) <= 1e-12) {
        throw validation_error("equalize: deep fade at subcarrier " + std::to_string(k) +
                               ", symbol " + std::to_string(l));
      }
      out.at(k, l) = raw.at(k, l) / h;
    }
  }
  return out;
}

}  // namespace linksim
