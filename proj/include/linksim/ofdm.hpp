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
#ifndef LINKSIM_OFDM_HPP
#define LINKSIM_OFDM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "linksim/iq.hpp"
#include "linksim/qam.hpp"

namespace linksim {

/// Parameterized CP-OFDM link. The presets approximate 10 MHz LTE-A and
/// 5G-NR numerologies at a 15.36 MHz sample rate; they are engineering
/// reconstructions, not standard-conformant frame structures.
struct LinkConfig {
  std::string label;
  std::size_t fft_size = 0;
  std::size_t num_subcarriers = 0;  // active, even count, centered, DC unused
  double subcarrier_spacing_hz = 0.0;
  std::size_t cp_len = 0;
  std::size_t num_symbols_per_frame = 0;
  Modulation modulation = Modulation::qam64;
  std::size_t pilot_spacing_freq = 6;
  std::size_t pilot_spacing_time = 1;
  double sample_rate_hz = 0.0;

  std::size_t samples_per_symbol() const { return fft_size + cp_len; }
  std::size_t frame_samples() const { return num_symbols_per_frame * samples_per_symbol(); }
  double frame_duration_s() const { return static_cast<double>(frame_samples()) / sample_rate_hz; }
  bool is_pilot(std::size_t k, std::size_t l) const {
    return k % pilot_spacing_freq == 0 && l % pilot_spacing_time == 0;
  }
  std::size_t pilot_count() const;
  std::size_t data_cell_count() const;
  std::size_t payload_bits() const { return data_cell_count() * bits_per_symbol(modulation); }

  /// Enforces the structural invariants (rate = fft * scs, cp < fft, ...).
  void validate() const;
};

/// Named presets: "lte-a-like" and "nr-like".
LinkConfig link_preset(const std::string& name);

enum class CellRole : std::uint8_t { data, pilot, null_cell };

/// Subcarrier-by-symbol matrix of complex cells with role labels.
/// Cell (k, l) lives at cells[l * num_subcarriers + k].
struct ResourceGrid {
  LinkConfig config;
  std::vector<ComplexSample> cells;
  std::vector<CellRole> roles;

  ResourceGrid() = default;
  explicit ResourceGrid(const LinkConfig& cfg);

  std::size_t num_k() const { return config.num_subcarriers; }
  std::size_t num_l() const { return config.num_symbols_per_frame; }
  ComplexSample& at(std::size_t k, std::size_t l) { return cells[l * num_k() + k]; }
  const ComplexSample& at(std::size_t k, std::size_t l) const { return cells[l * num_k() + k]; }
  CellRole role(std::size_t k, std::size_t l) const { return roles[l * num_k() + k]; }

  /// Cells of the given role flattened in (l, k) raster order.
  std::vector<ComplexSample> cells_with_role(CellRole r) const;
};

/// Assembles a frame: seeded unit-modulus QPSK pilots on the
/// (k % pilot_spacing_freq == 0, l % pilot_spacing_time == 0) lattice, mapped
/// payload data in raster order elsewhere. Payload length must match capacity.
ResourceGrid build_grid(const BitPayload& payload, const LinkConfig& cfg, std::uint64_t seed);

/// Per symbol: active subcarriers onto centered FFT bins (DC null), unitary
/// inverse DFT, cyclic prefix prepended. Output rate is cfg.sample_rate_hz.
IqBuffer ofdm_modulate(const ResourceGrid& grid);

struct SyncEstimate {
  std::size_t frame_start = 0;
  double cfo_hz = 0.0;
  /// Cyclic-prefix correlation magnitude normalized by window energy, in [0, ~1].
  double quality = 0.0;
};

/// Peak quality below this is treated as "no frame present".
inline constexpr double kSyncQualityThreshold = 0.12;

/// CP-correlation search over every candidate start. Never throws on a weak
/// peak; callers that require a lock use synchronize().
SyncEstimate estimate_sync(const IqBuffer& buf, const LinkConfig& cfg);

/// Frame start via the CP autocorrelation peak averaged over symbols, plus the
/// fractional CFO from the mean correlation phase (range +-scs/2).
/// Throws sync_failure when the peak quality is below threshold.
SyncEstimate synchronize(const IqBuffer& buf, const LinkConfig& cfg);

/// Inverse of ofdm_modulate over a clean channel: drop CP, forward unitary
/// DFT, extract active bins. Roles are re-labeled from the config lattice.
ResourceGrid ofdm_demodulate(const IqBuffer& buf, const LinkConfig& cfg, std::size_t frame_start);

/// Least-squares estimates at the pilot cells of `reference`, bilinear
/// interpolation across frequency then time, nearest-pilot extension at edges.
ResourceGrid estimate_channel(const ResourceGrid& raw, const ResourceGrid& reference);

/// One-tap zero-forcing division. Throws on |H| below 1e-12, naming the cell.
ResourceGrid equalize(const ResourceGrid& raw, const ResourceGrid& h_hat);

}  // namespace linksim

#endif  // LINKSIM_OFDM_HPP
