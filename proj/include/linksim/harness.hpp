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
#ifndef LINKSIM_HARNESS_HPP
#define LINKSIM_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "linksim/channel.hpp"
#include "linksim/dsp.hpp"
#include "linksim/interference.hpp"
#include "linksim/kpi.hpp"
#include "linksim/ofdm.hpp"

namespace linksim {

enum class JammerKind { transient, cw, none };

JammerKind jammer_from_name(const std::string& name);
std::string jammer_name(JammerKind kind);

/// One experimental condition: link preset, channel impairments, jammer.
///
/// The interferer gain axis is relative: the jammer waveform is normalized so
/// that at `gain_ref_db` its average power over the frame window equals the
/// received desired-signal power. Only orderings and trends on this axis are
/// meaningful.
struct TrialSpec {
  std::string link = "lte-a-like";
  ChannelConfig channel;
  TransientPulseParams pulse;
  BurstSchedule schedule;       // duration_s <= 0 selects one frame
  JammerKind jammer = JammerKind::none;
  double cw_freq_hz = 0.0;      // cw jammer baseband tone, before the RF offset shift
  double time_scale = 1.0;      // stretches pulse time constants, divides its carrier
  double tx_power_scale = 0.8;  // transmit amplitude pre-scale
  double gain_ref_db = 15.0;
  double link_center_hz = 2.2e9;  // metadata only
  std::uint64_t seed = 1;
};

/// Cheap structural checks for fail-fast preflight; throws validation_error.
void validate_trial_spec(const TrialSpec& spec);

/// FNV-1a digest of the canonical spec serialization, for traceability.
std::string config_digest(const TrialSpec& spec);

struct TrialResult {
  kpi::KpiReport kpi;
  PowerTriple ground_truth;
  bool sync_failed = false;
  std::uint64_t seed = 0;
  std::string digest;
};

/// Heavyweight per-trial outputs, filled on request.
struct TrialArtifacts {
  IqBuffer transmitted;
  IqBuffer received;
  ResourceGrid reference;
  ResourceGrid equalized;
};

/// Runs the full pipeline: payload, grid, modulate, jammer synthesis, combine,
/// synchronize, demodulate, estimate, equalize, demap, KPIs. A weak sync peak
/// is a recorded outcome (ber forced to 0.5, sync_failed set), not an error.
/// With keep_evm_grid false the per-cell EVM matrix is left empty.
TrialResult run_trial(const TrialSpec& spec, TrialArtifacts* artifacts = nullptr,
                      bool keep_evm_grid = true);

/// Experiment grid over interferer offsets and gains. Each (offset, seed index)
/// pair reuses one trial seed across every gain, so gain trends can be compared
/// per seed with common randomness: seed = base.seed + offset_idx *
/// seeds_per_point + seed_idx.
struct SweepSpec {
  TrialSpec base;
  std::vector<double> offsets_hz = {-4.5e6, 0.0, 4.5e6};
  std::vector<double> gains_db = {12.0, 15.0, 18.0};
  std::size_t seeds_per_point = 20;
};

struct SweepRow {
  double offset_hz = 0.0;
  double gain_db = 0.0;
  std::uint64_t seed = 0;
  kpi::KpiReport kpi;  // per-cell EVM grid omitted in sweep rows
  PowerTriple ground_truth;
  bool sync_failed = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by (offset, gain, seed)
};

/// Validates every grid point up front, then executes trials on up to
/// `parallelism` threads. Row order and content are independent of the
/// degree of parallelism.
SweepResult run_sweep(const SweepSpec& spec, std::size_t parallelism = 1);

/// CSV with the fixed column set
/// offset_hz,gain_db,seed,evm_peak_pct,evm_rms_pct,ber,sinr_db,cfo_hz,papr_db,sync_failed.
std::string sweep_to_csv(const SweepResult& result);

/// JSON rows carrying the KPI set plus the oracle PowerTriple and its
/// derived sinr_oracle_db.
std::string sweep_to_json(const SweepResult& result);
SweepResult sweep_from_json(const std::string& text);

/// Markdown table aggregating each (offset, gain) cell as mean +- std.
std::string sweep_to_markdown(const SweepResult& result);

/// Flat JSON serialization of one trial's KPI report plus config_digest.
std::string trial_to_json(const TrialResult& result);

/// EVM heatmap dump: header `subcarrier,symbol,evm_percent,role`, null cells skipped.
std::string evm_grid_to_csv(const kpi::EvmGrid& grid);

/// Constellation dump of the equalized data cells: header `i,q`.
std::string constellation_to_csv(const ResourceGrid& equalized);

/// PSD trace dump: header `offset_hz,power_db`.
std::string psd_to_csv(const dsp::PsdTrace& trace);

/// Uniform random payload sized for a link config.
BitPayload random_payload(std::size_t num_bits, std::uint64_t seed);

}  // namespace linksim

#endif  // LINKSIM_HARNESS_HPP
