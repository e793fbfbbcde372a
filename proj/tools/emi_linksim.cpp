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

// emi-linksim: OFDM link-level simulator for transient EMI susceptibility.
// Subcommands: gen-pulse, gen-cw, simulate, sweep, kpi, psd, export-grid.
// Exit codes: 0 ok, 2 validation error, 3 I/O error, 4 sync-failure-only run
// (with --fail-on-sync-loss).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "linksim/harness.hpp"
#include "linksim/io.hpp"

namespace {

using namespace linksim;

// ---------------------------------------------------------------------------
// config file: a small TOML subset matching the documented section layout
// ([link], [channel], [pulse], [schedule], [sweep] plus bare top-level keys).
// CLI flags parsed afterwards override any config value.

using ConfigValue = std::variant<double, std::string, bool, std::vector<double>>;
using ConfigMap = std::map<std::string, ConfigValue>;

ConfigValue parse_config_value(const std::string& raw, const std::string& where) {
  if (raw.empty()) throw validation_error("config: empty value for " + where);
  if (raw.front() == '"' || raw.front() == '\'') {
    if (raw.size() < 2 || raw.back() != raw.front()) {
      throw validation_error("config: unterminated string for " + where);
    }
    return raw.substr(1, raw.size() - 2);
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  if (raw.front() == '[') {
    if (raw.back() != ']') throw validation_error("config: unterminated array for " + where);
    std::vector<double> values;
    std::string body = raw.substr(1, raw.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      if (b == std::string::npos) continue;
      const auto e = item.find_last_not_of(" \t");
      values.push_back(std::stod(item.substr(b, e - b + 1)));
    }
    return values;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw validation_error("config: cannot parse value '" + raw + "' for " + where);
  }
}

ConfigMap load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config '" + path + "'");
  ConfigMap out;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw validation_error("config:" + std::to_string(lineno) + ": malformed section header");
      }
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw validation_error("config:" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = line.substr(0, eq);
    key = key.substr(0, key.find_last_not_of(" \t") + 1);
    std::string value = line.substr(eq + 1);
    const auto vb = value.find_first_not_of(" \t");
    value = vb == std::string::npos ? "" : value.substr(vb);
    const std::string full = section.empty() ? key : section + "." + key;
    out[full] = parse_config_value(value, full);
  }
  return out;
}

// ---------------------------------------------------------------------------
// flag set shared by the trial-running subcommands

struct TrialOptions {
  std::string config_path;
  std::string preset = "lte-a-like";
  double link_center_hz = 2.2e9;
  double tx_power_scale = 0.8;
  std::string jammer = "none";
  std::uint64_t seed = 1;

  double snr_db = 15.12;  // inf disables noise
  double cfo_hz = 0.0;
  double flat_gain_re = 1.0;
  double flat_gain_im = 0.0;
  double offset_hz = 0.0;
  double rf_freq_hz = std::nan("");  // alternative to offset_hz
  double gain_db = 18.0;
  double gain_ref_db = 15.0;
  double cw_freq_hz = 0.0;

  double a0 = 1.0;
  double tau_rise_ns = 2.0;
  double tau_hold_ns = 30.0;
  double fc_hz = 0.0;
  std::string mode = "canonical";
  double time_scale = 1.0;

  double pulse_period_us = 25.0;
  double jitter = 0.2;
  double duration_us = 0.0;  // 0: one frame

  std::vector<double> offsets_hz = {-4.5e6, 0.0, 4.5e6};
  std::vector<double> gains_db = {12.0, 15.0, 18.0};
  std::size_t seeds_per_point = 20;
};

template <typename T>
void config_get(const ConfigMap& cfg, const std::string& key, T& into) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return;
  if constexpr (std::is_same_v<T, double>) {
    if (const auto* v = std::get_if<double>(&it->second)) {
      into = *v;
      return;
    }
    if (const auto* s = std::get_if<std::string>(&it->second)) {
      into = std::stod(*s);  // accepts "inf"
      return;
    }
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (const auto* v = std::get_if<std::string>(&it->second)) {
      into = *v;
      return;
    }
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    if (const auto* v = std::get_if<std::vector<double>>(&it->second)) {
      into = *v;
      return;
    }
  } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
    if (const auto* v = std::get_if<double>(&it->second)) {
      into = static_cast<T>(*v);
      return;
    }
  }
  throw validation_error("config: wrong value type for key '" + key + "'");
}

const std::vector<std::string> kKnownConfigKeys = {
    "jammer", "seed",
    "link.preset", "link.center_hz", "link.tx_power_scale",
    "channel.snr_db", "channel.cfo_hz", "channel.flat_gain_re", "channel.flat_gain_im",
    "channel.interferer_offset_hz", "channel.interferer_gain_db", "channel.gain_ref_db",
    "channel.cw_freq_hz",
    "pulse.a0", "pulse.tau_rise_ns", "pulse.tau_hold_ns", "pulse.fc_hz", "pulse.mode",
    "pulse.time_scale",
    "schedule.pulse_period_us", "schedule.jitter", "schedule.duration_us",
    "sweep.offsets_hz", "sweep.gains_db", "sweep.seeds_per_point",
};

void apply_config(TrialOptions& opt) {
  if (opt.config_path.empty()) return;
  const ConfigMap cfg = load_config(opt.config_path);
  for (const auto& [key, value] : cfg) {
    (void)value;
    bool known = false;
    for (const auto& k : kKnownConfigKeys) known |= (k == key);
    if (!known) throw validation_error("config: unknown key '" + key + "'");
  }
  config_get(cfg, "jammer", opt.jammer);
  config_get(cfg, "seed", opt.seed);
  config_get(cfg, "link.preset", opt.preset);
  config_get(cfg, "link.center_hz", opt.link_center_hz);
  config_get(cfg, "link.tx_power_scale", opt.tx_power_scale);
  config_get(cfg, "channel.snr_db", opt.snr_db);
  config_get(cfg, "channel.cfo_hz", opt.cfo_hz);
  config_get(cfg, "channel.flat_gain_re", opt.flat_gain_re);
  config_get(cfg, "channel.flat_gain_im", opt.flat_gain_im);
  config_get(cfg, "channel.interferer_offset_hz", opt.offset_hz);
  config_get(cfg, "channel.interferer_gain_db", opt.gain_db);
  config_get(cfg, "channel.gain_ref_db", opt.gain_ref_db);
  config_get(cfg, "channel.cw_freq_hz", opt.cw_freq_hz);
  config_get(cfg, "pulse.a0", opt.a0);
  config_get(cfg, "pulse.tau_rise_ns", opt.tau_rise_ns);
  config_get(cfg, "pulse.tau_hold_ns", opt.tau_hold_ns);
  config_get(cfg, "pulse.fc_hz", opt.fc_hz);
  config_get(cfg, "pulse.mode", opt.mode);
  config_get(cfg, "pulse.time_scale", opt.time_scale);
  config_get(cfg, "schedule.pulse_period_us", opt.pulse_period_us);
  config_get(cfg, "schedule.jitter", opt.jitter);
  config_get(cfg, "schedule.duration_us", opt.duration_us);
  config_get(cfg, "sweep.offsets_hz", opt.offsets_hz);
  config_get(cfg, "sweep.gains_db", opt.gains_db);
  config_get(cfg, "sweep.seeds_per_point", opt.seeds_per_point);
}

void warn_pulse_ranges(const TrialOptions& opt) {
  if (opt.tau_rise_ns < 0.1 || opt.tau_rise_ns > 3.0) {
    std::cerr << "warning: tau_rise " << opt.tau_rise_ns
              << " ns is outside the characterized range [0.1, 3] ns\n";
  }
  if (opt.tau_hold_ns < 1.0 || opt.tau_hold_ns > 50.0) {
    std::cerr << "warning: tau_hold " << opt.tau_hold_ns
              << " ns is outside the characterized range [1, 50] ns\n";
  }
}

TransientPulseParams pulse_from(const TrialOptions& opt) {
  TransientPulseParams p;
  p.a0 = opt.a0;
  p.tau_rise_s = opt.tau_rise_ns * 1e-9;
  p.tau_hold_s = opt.tau_hold_ns * 1e-9;
  p.carrier_freq_hz = opt.fc_hz;
  p.mode = pulse_mode_from_name(opt.mode);
  return p;
}

TrialSpec to_spec(const TrialOptions& opt) {
  TrialSpec spec;
  spec.link = opt.preset;
  spec.link_center_hz = opt.link_center_hz;
  spec.tx_power_scale = opt.tx_power_scale;
  spec.jammer = jammer_from_name(opt.jammer);
  spec.seed = opt.seed;
  spec.gain_ref_db = opt.gain_ref_db;
  spec.cw_freq_hz = opt.cw_freq_hz;
  spec.time_scale = opt.time_scale;

  if (std::isfinite(opt.snr_db)) spec.channel.snr_db = opt.snr_db;
  spec.channel.cfo_hz = opt.cfo_hz;
  spec.channel.flat_gain = ComplexSample(opt.flat_gain_re, opt.flat_gain_im);
  spec.channel.interferer_offset_hz =
      std::isfinite(opt.rf_freq_hz) ? opt.rf_freq_hz - opt.link_center_hz : opt.offset_hz;
  if (spec.jammer != JammerKind::none) spec.channel.interferer_gain_db = opt.gain_db;

  spec.pulse = pulse_from(opt);
  spec.schedule.pulse_period_s = opt.pulse_period_us * 1e-6;
  spec.schedule.jitter_fraction = opt.jitter;
  spec.schedule.duration_s = opt.duration_us * 1e-6;
  if (spec.jammer == JammerKind::transient) warn_pulse_ranges(opt);
  return spec;
}

void add_link_options(CLI::App* cmd, TrialOptions& opt) {
  cmd->add_option("--config", opt.config_path, "TOML config file; flags override its keys");
  cmd->add_option("-L,--link", opt.preset, "link preset: lte-a-like | nr-like");
  cmd->add_option("--link-center-hz", opt.link_center_hz, "nominal RF center (metadata)");
  cmd->add_option("--tx-power-scale", opt.tx_power_scale, "transmit amplitude pre-scale");
  cmd->add_option("--seed", opt.seed, "trial seed (sweep base seed)");
}

void add_channel_options(CLI::App* cmd, TrialOptions& opt) {
  cmd->add_option("--snr-db", opt.snr_db, "desired-signal SNR in dB; inf disables noise");
  cmd->add_option("--cfo-hz", opt.cfo_hz, "oscillator offset applied to the desired signal");
  cmd->add_option("--flat-gain-re", opt.flat_gain_re, "flat channel gain, real part");
  cmd->add_option("--flat-gain-im", opt.flat_gain_im, "flat channel gain, imaginary part");
  cmd->add_option("--offset-hz", opt.offset_hz, "interferer offset from the link center");
  cmd->add_option("--rf-freq-hz", opt.rf_freq_hz,
                  "absolute interferer RF center; converted against --link-center-hz");
  cmd->add_option("--gain-db", opt.gain_db, "relative interferer gain in dB");
  cmd->add_option("--gain-ref-db", opt.gain_ref_db,
                  "gain at which jammer power equals the received signal power");
  cmd->add_option("--jammer", opt.jammer, "jammer kind: transient | cw | none");
  cmd->add_option("--cw-freq-hz", opt.cw_freq_hz, "cw jammer baseband tone before the RF shift");
}

void add_pulse_options(CLI::App* cmd, TrialOptions& opt) {
  cmd->add_option("--a0", opt.a0, "pulse amplitude A0");
  cmd->add_option("--tau-rise-ns", opt.tau_rise_ns, "rise time constant in ns");
  cmd->add_option("--tau-hold-ns", opt.tau_hold_ns, "hold time constant in ns");
  cmd->add_option("--fc-hz", opt.fc_hz, "pulse internal tone (baseband offset)");
  cmd->add_option("--mode", opt.mode, "pulse model: literal | canonical");
  cmd->add_option("--time-scale", opt.time_scale,
                  "stretches pulse time constants (and divides its tone) for baseband synthesis");
  cmd->add_option("--pulse-period-us", opt.pulse_period_us, "burst repetition period in us");
  cmd->add_option("--jitter", opt.jitter, "arrival jitter fraction in [0, 1)");
  cmd->add_option("--duration-us", opt.duration_us, "jammer window in us; 0 means one frame");
}

void write_or_print(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw io_error("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// subcommand bodies

int cmd_gen_pulse(const TrialOptions& opt, double sample_rate_hz, bool train, const std::string& out) {
  TransientPulseParams p = pulse_from(opt);
  warn_pulse_ranges(opt);
  p.tau_rise_s *= opt.time_scale;
  p.tau_hold_s *= opt.time_scale;
  p.carrier_freq_hz /= opt.time_scale;
  IqBuffer buf;
  if (train) {
    BurstSchedule sched;
    sched.pulse_period_s = opt.pulse_period_us * 1e-6;
    sched.jitter_fraction = opt.jitter;
    sched.duration_s = opt.duration_us > 0.0 ? opt.duration_us * 1e-6 : 1e-3;
    sched.seed = opt.seed;
    buf = burst_train(p, sched, sample_rate_hz);
  } else {
    const double duration =
        opt.duration_us > 0.0 ? opt.duration_us * 1e-6 : 10.0 * p.tau_hold_s;
    buf = transient_pulse(p, sample_rate_hz, duration);
  }
  export_iq(buf, out);
  std::cerr << "wrote " << buf.size() << " samples (time_scale " << opt.time_scale << ") to "
            << out << "\n";
  return 0;
}

int cmd_gen_cw(double freq_hz, double amplitude, double sample_rate_hz, double duration_us,
               const std::string& out) {
  const IqBuffer buf = cw_tone(freq_hz, amplitude, sample_rate_hz, duration_us * 1e-6);
  export_iq(buf, out);
  std::cerr << "wrote " << buf.size() << " samples to " << out << "\n";
  return 0;
}

struct SimulateOutputs {
  std::string report_path;
  std::string iq_path;
  std::string psd_path;
  std::string constellation_path;
  std::string evm_grid_path;
  bool no_evm_grid = false;
  std::size_t psd_segment = 1024;
  double psd_overlap = 0.5;
};

int cmd_simulate(const TrialOptions& opt, const SimulateOutputs& io, bool fail_on_sync_loss) {
  const TrialSpec spec = to_spec(opt);
  TrialArtifacts art;
  const TrialResult res = run_trial(spec, &art, !io.no_evm_grid);
  write_or_print(io.report_path, trial_to_json(res) + "\n");
  if (!io.iq_path.empty()) export_iq(art.received, io.iq_path);
  if (!io.psd_path.empty()) {
    write_or_print(io.psd_path, psd_to_csv(dsp::welch_psd(art.received, io.psd_segment,
                                                          io.psd_overlap)));
  }
  if (!io.constellation_path.empty()) {
    write_or_print(io.constellation_path, constellation_to_csv(art.equalized));
  }
  if (!io.evm_grid_path.empty() && !io.no_evm_grid) {
    write_or_print(io.evm_grid_path, evm_grid_to_csv(res.kpi.evm_grid));
  }
  if (fail_on_sync_loss && res.sync_failed) return 4;
  return 0;
}

int cmd_sweep(const TrialOptions& opt, std::size_t parallelism, const std::string& out_csv,
              const std::string& out_json, const std::string& out_md, bool fail_on_sync_loss) {
  SweepSpec spec;
  spec.base = to_spec(opt);
  spec.offsets_hz = opt.offsets_hz;
  spec.gains_db = opt.gains_db;
  spec.seeds_per_point = opt.seeds_per_point;
  const SweepResult result = run_sweep(spec, parallelism);

  if (out_csv.empty() && out_json.empty() && out_md.empty()) {
    std::cout << sweep_to_csv(result);
  } else {
    if (!out_csv.empty()) write_or_print(out_csv, sweep_to_csv(result));
    if (!out_json.empty()) write_or_print(out_json, sweep_to_json(result));
    if (!out_md.empty()) write_or_print(out_md, sweep_to_markdown(result));
  }
  if (fail_on_sync_loss) {
    bool all_failed = !result.rows.empty();
    for (const auto& r : result.rows) all_failed &= r.sync_failed;
    if (all_failed) return 4;
  }
  return 0;
}

int cmd_kpi(const TrialOptions& opt, const std::string& in_path, const std::string& out_path) {
  const IqBuffer received = import_iq(in_path);
  const LinkConfig cfg = link_preset(opt.preset);
  const BitPayload payload =
      random_payload(cfg.payload_bits(), derive_seed(opt.seed, "payload"));
  const ResourceGrid reference = build_grid(payload, cfg, derive_seed(opt.seed, "pilots"));

  const SyncEstimate sync = estimate_sync(received, cfg);
  const bool failed = sync.quality < kSyncQualityThreshold;
  const ResourceGrid raw = ofdm_demodulate(received, cfg, sync.frame_start);
  const ResourceGrid eq = equalize(raw, estimate_channel(raw, reference));

  const auto ref_data = reference.cells_with_role(CellRole::data);
  const auto rx_data = eq.cells_with_role(CellRole::data);

  TrialResult res;
  res.seed = opt.seed;
  res.digest = config_digest(to_spec(opt));
  res.sync_failed = failed;
  const kpi::EvmResult ev = kpi::evm(ref_data, rx_data);
  res.kpi.evm_rms_percent = ev.rms_percent;
  res.kpi.evm_peak_percent = ev.peak_percent;
  res.kpi.ber = failed ? 0.5 : kpi::ber(payload, qam_demap(rx_data, cfg.modulation));
  res.kpi.cfo_hz = sync.cfo_hz;
  res.kpi.papr_db = kpi::papr(received);
  const PowerTriple est = kpi::estimate_sinr_from_grid(eq, reference);
  if (est.p_interference + est.p_noise > 0.0) res.kpi.sinr_db = kpi::sinr(est).db;
  res.kpi.evm_grid = kpi::evm_grid(eq, reference);
  write_or_print(out_path, trial_to_json(res) + "\n");
  return 0;
}

int cmd_psd(const std::string& in_path, std::size_t segment, double overlap,
            const std::string& out_path) {
  const IqBuffer buf = import_iq(in_path);
  write_or_print(out_path, psd_to_csv(dsp::welch_psd(buf, segment, overlap)));
  return 0;
}

int cmd_export_grid(const TrialOptions& opt, const std::string& out_path) {
  const TrialSpec spec = to_spec(opt);
  const TrialResult res = run_trial(spec, nullptr, true);
  write_or_print(out_path, evm_grid_to_csv(res.kpi.evm_grid));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emi-linksim: OFDM link susceptibility to transient EMI"};
  app.require_subcommand(1);

  TrialOptions opt;
  bool fail_on_sync_loss = false;

  // gen-pulse
  auto* gen_pulse = app.add_subcommand("gen-pulse", "synthesize a transient pulse or burst train");
  double gp_rate = 15.36e6;
  bool gp_train = false;
  std::string gp_out;
  add_pulse_options(gen_pulse, opt);
  gen_pulse->add_option("--sample-rate-hz", gp_rate, "synthesis sample rate");
  gen_pulse->add_flag("--train", gp_train, "emit a burst train instead of a single pulse");
  gen_pulse->add_option("--seed", opt.seed, "jitter seed for --train");
  gen_pulse->add_option("--out", gp_out, "output IQ path (cf32le + JSON sidecar)")->required();

  // gen-cw
  auto* gen_cw = app.add_subcommand("gen-cw", "synthesize a continuous-wave tone");
  double cw_freq = 0.0, cw_amp = 1.0, cw_rate = 15.36e6, cw_dur_us = 1000.0;
  std::string cw_out;
  gen_cw->add_option("--freq-hz", cw_freq, "tone frequency");
  gen_cw->add_option("--amplitude", cw_amp, "tone amplitude");
  gen_cw->add_option("--sample-rate-hz", cw_rate, "synthesis sample rate");
  gen_cw->add_option("--duration-us", cw_dur_us, "duration in us");
  gen_cw->add_option("--out", cw_out, "output IQ path")->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run one trial and print its KPI report");
  SimulateOutputs sim_io;
  add_link_options(simulate, opt);
  add_channel_options(simulate, opt);
  add_pulse_options(simulate, opt);
  simulate->add_option("--out", sim_io.report_path, "KPI report JSON path (default stdout)");
  simulate->add_option("--dump-iq", sim_io.iq_path, "write the received IQ capture");
  simulate->add_option("--dump-psd", sim_io.psd_path, "write a Welch PSD CSV of the received signal");
  simulate->add_option("--dump-constellation", sim_io.constellation_path,
                       "write equalized data cells as CSV");
  simulate->add_option("--dump-evm-grid", sim_io.evm_grid_path, "write the EVM resource grid CSV");
  simulate->add_option("--psd-segment-len", sim_io.psd_segment, "PSD segment length (power of two)");
  simulate->add_option("--psd-overlap", sim_io.psd_overlap, "PSD segment overlap in [0, 1)");
  simulate->add_flag("--no-evm-grid", sim_io.no_evm_grid, "skip the per-cell EVM matrix");
  simulate->add_flag("--fail-on-sync-loss", fail_on_sync_loss, "exit 4 if the trial loses sync");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run the offsets x gains x seeds experiment grid");
  std::string sw_csv, sw_json, sw_md;
  std::size_t sw_par = 1;
  add_link_options(sweep, opt);
  add_channel_options(sweep, opt);
  add_pulse_options(sweep, opt);
  sweep->add_option("--offsets-hz", opt.offsets_hz, "interferer offsets axis")->expected(-1);
  sweep->add_option("--gains-db", opt.gains_db, "interferer gains axis")->expected(-1);
  sweep->add_option("--seeds-per-point", opt.seeds_per_point, "seeds per grid point");
  sweep->add_option("--parallelism", sw_par, "worker thread count");
  sweep->add_option("--out-csv", sw_csv, "CSV output path (default stdout when no output given)");
  sweep->add_option("--out-json", sw_json, "JSON output path");
  sweep->add_option("--out-md", sw_md, "markdown summary path");
  sweep->add_flag("--fail-on-sync-loss", fail_on_sync_loss,
                  "exit 4 if every trial in the run loses sync");

  // kpi
  auto* kpi_cmd = app.add_subcommand("kpi", "compute KPIs from an imported IQ capture");
  std::string kpi_in, kpi_out;
  add_link_options(kpi_cmd, opt);
  kpi_cmd->add_option("--in", kpi_in, "received IQ capture (cf32le + sidecar)")->required();
  kpi_cmd->add_option("--out", kpi_out, "KPI report JSON path (default stdout)");

  // psd
  auto* psd_cmd = app.add_subcommand("psd", "Welch PSD of an IQ capture as CSV");
  std::string psd_in, psd_out;
  std::size_t psd_seg = 1024;
  double psd_overlap = 0.5;
  psd_cmd->add_option("--in", psd_in, "IQ capture path")->required();
  psd_cmd->add_option("--segment-len", psd_seg, "segment length (power of two)");
  psd_cmd->add_option("--overlap", psd_overlap, "segment overlap in [0, 1)");
  psd_cmd->add_option("--out", psd_out, "CSV output path (default stdout)");

  // export-grid
  auto* export_grid = app.add_subcommand("export-grid", "run one trial and dump its EVM grid CSV");
  std::string eg_out;
  add_link_options(export_grid, opt);
  add_channel_options(export_grid, opt);
  add_pulse_options(export_grid, opt);
  export_grid->add_option("--out", eg_out, "CSV output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    // config file first, then re-apply flags so they win
    if (!opt.config_path.empty()) {
      TrialOptions from_config;
      from_config.config_path = opt.config_path;
      apply_config(from_config);
      // flags already parsed into opt; fill config values only where the
      // user did not pass the corresponding flag
      CLI::App* active = app.get_subcommands().front();
      TrialOptions merged = from_config;
      auto keep_flag = [&](const std::string& flag, auto member) {
        const CLI::Option* o = active->get_option_no_throw(flag);
        if (o != nullptr && o->count() > 0) merged.*member = opt.*member;
      };
      keep_flag("--link", &TrialOptions::preset);
      keep_flag("--link-center-hz", &TrialOptions::link_center_hz);
      keep_flag("--tx-power-scale", &TrialOptions::tx_power_scale);
      keep_flag("--seed", &TrialOptions::seed);
      keep_flag("--snr-db", &TrialOptions::snr_db);
      keep_flag("--cfo-hz", &TrialOptions::cfo_hz);
      keep_flag("--flat-gain-re", &TrialOptions::flat_gain_re);
      keep_flag("--flat-gain-im", &TrialOptions::flat_gain_im);
      keep_flag("--offset-hz", &TrialOptions::offset_hz);
      keep_flag("--rf-freq-hz", &TrialOptions::rf_freq_hz);
      keep_flag("--gain-db", &TrialOptions::gain_db);
      keep_flag("--gain-ref-db", &TrialOptions::gain_ref_db);
      keep_flag("--jammer", &TrialOptions::jammer);
      keep_flag("--cw-freq-hz", &TrialOptions::cw_freq_hz);
      keep_flag("--a0", &TrialOptions::a0);
      keep_flag("--tau-rise-ns", &TrialOptions::tau_rise_ns);
      keep_flag("--tau-hold-ns", &TrialOptions::tau_hold_ns);
      keep_flag("--fc-hz", &TrialOptions::fc_hz);
      keep_flag("--mode", &TrialOptions::mode);
      keep_flag("--time-scale", &TrialOptions::time_scale);
      keep_flag("--pulse-period-us", &TrialOptions::pulse_period_us);
      keep_flag("--jitter", &TrialOptions::jitter);
      keep_flag("--duration-us", &TrialOptions::duration_us);
      keep_flag("--offsets-hz", &TrialOptions::offsets_hz);
      keep_flag("--gains-db", &TrialOptions::gains_db);
      keep_flag("--seeds-per-point", &TrialOptions::seeds_per_point);
      merged.config_path = opt.config_path;
      opt = merged;
    }

    if (gen_pulse->parsed()) return cmd_gen_pulse(opt, gp_rate, gp_train, gp_out);
    if (gen_cw->parsed()) return cmd_gen_cw(cw_freq, cw_amp, cw_rate, cw_dur_us, cw_out);
    if (simulate->parsed()) return cmd_simulate(opt, sim_io, fail_on_sync_loss);
    if (sweep->parsed()) return cmd_sweep(opt, sw_par, sw_csv, sw_json, sw_md, fail_on_sync_loss);
    if (kpi_cmd->parsed()) return cmd_kpi(opt, kpi_in, kpi_out);
    if (psd_cmd->parsed()) return cmd_psd(psd_in, psd_seg, psd_overlap, psd_out);
    if (export_grid->parsed()) return cmd_export_grid(opt, eg_out);
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const io_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const sync_failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
