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
#include "linksim/harness.hpp"

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "linksim/rng.hpp"

namespace linksim {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json optional_to_json(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

std::optional<double> optional_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

const char* role_name(CellRole r) {
  switch (r) {
    case CellRole::data: return "data";
    case CellRole::pilot: return "pilot";
    case CellRole::null_cell: return "null";
  }
  return "?";
}

json kpi_to_json(const kpi::KpiReport& k) {
  json per_sc = json::array();
  for (double v : k.sinr_per_subcarrier_db) per_sc.push_back(finite_or_null(v));
  return json{{"evm_rms_percent", k.evm_rms_percent},
              {"evm_peak_percent", k.evm_peak_percent},
              {"ber", k.ber},
              {"sinr_db", optional_to_json(k.sinr_db)},
              {"sinr_per_subcarrier_db", per_sc},
              {"cfo_hz", k.cfo_hz},
              {"papr_db", k.papr_db}};
}

kpi::KpiReport kpi_from_json(const json& j) {
  kpi::KpiReport k;
  k.evm_rms_percent = j.at("evm_rms_percent").get<double>();
  k.evm_peak_percent = j.at("evm_peak_percent").get<double>();
  k.ber = j.at("ber").get<double>();
  k.sinr_db = optional_from_json(j.at("sinr_db"));
  for (const auto& v : j.at("sinr_per_subcarrier_db")) {
    k.sinr_per_subcarrier_db.push_back(v.is_null() ? INFINITY : v.get<double>());
  }
  k.cfo_hz = j.at("cfo_hz").get<double>();
  k.papr_db = j.at("papr_db").get<double>();
  return k;
}

json triple_to_json(const PowerTriple& p) {
  json j{{"p_signal", p.p_signal},
         {"p_interference", p.p_interference},
         {"p_noise", p.p_noise}};
  const double denom = p.p_interference + p.p_noise;
  j["sinr_oracle_db"] = denom > 0.0 ? json(10.0 * std::log10(p.p_signal / denom)) : json(nullptr);
  return j;
}

}  // namespace

JammerKind jammer_from_name(const std::string& name) {
  if (name == "transient") return JammerKind::transient;
  if (name == "cw") return JammerKind::cw;
  if (name == "none") return JammerKind::none;
  throw validation_error("unknown jammer kind '" + name + "' (expected transient|cw|none)");
}

std::string jammer_name(JammerKind kind) {
  switch (kind) {
    case JammerKind::transient: return "transient";
    case JammerKind::cw: return "cw";
    case JammerKind::none: return "none";
  }
  return "?";
}

BitPayload random_payload(std::size_t num_bits, std::uint64_t seed) {
  Rng rng(seed);
  BitPayload p;
  p.bits.resize(num_bits);
  for (auto& b : p.bits) b = static_cast<std::uint8_t>(rng.next_bits() & 1u);
  return p;
}

void validate_trial_spec(const TrialSpec& spec) {
  const LinkConfig cfg = link_preset(spec.link);
  if (!(spec.time_scale > 0.0)) throw validation_error("time_scale must be > 0");
  if (!(spec.tx_power_scale > 0.0)) throw validation_error("tx_power_scale must be > 0");
  if (std::abs(spec.channel.flat_gain) <= 0.0) {
    throw validation_error("flat_gain must be nonzero");
  }
  if (!(std::abs(spec.channel.interferer_offset_hz) < cfg.sample_rate_hz / 2.0)) {
    throw validation_error("interferer offset " + fmt(spec.channel.interferer_offset_hz) +
                           " Hz is at or beyond Nyquist");
  }
  if (!(std::abs(spec.channel.cfo_hz) < cfg.sample_rate_hz / 2.0)) {
    throw validation_error("cfo beyond Nyquist");
  }
  if (spec.jammer == JammerKind::transient) {
    spec.pulse.validate();
    BurstSchedule sched = spec.schedule;
    if (sched.duration_s <= 0.0) sched.duration_s = cfg.frame_duration_s();
    sched.validate();
  }
  if (spec.jammer == JammerKind::cw &&
      !(std::abs(spec.cw_freq_hz) < cfg.sample_rate_hz / 2.0)) {
    throw validation_error("cw tone frequency beyond Nyquist");
  }
  if (spec.jammer != JammerKind::none && !spec.channel.interferer_gain_db) {
    throw validation_error("jammer '" + jammer_name(spec.jammer) +
                           "' enabled but interferer gain is disabled");
  }
}

std::string config_digest(const TrialSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  os << spec.link << '|' << (spec.channel.snr_db ? *spec.channel.snr_db : -9999.0) << '|'
     << spec.channel.cfo_hz << '|' << spec.channel.flat_gain.real() << '|'
     << spec.channel.flat_gain.imag() << '|' << spec.channel.interferer_offset_hz << '|'
     << (spec.channel.interferer_gain_db ? *spec.channel.interferer_gain_db : -9999.0) << '|'
     << spec.pulse.a0 << '|' << spec.pulse.tau_rise_s << '|' << spec.pulse.tau_hold_s << '|'
     << spec.pulse.carrier_freq_hz << '|' << pulse_mode_name(spec.pulse.mode) << '|'
     << spec.schedule.pulse_period_s << '|' << spec.schedule.jitter_fraction << '|'
     << spec.schedule.duration_s << '|' << jammer_name(spec.jammer) << '|' << spec.cw_freq_hz
     << '|' << spec.time_scale << '|' << spec.tx_power_scale << '|' << spec.gain_ref_db << '|'
     << spec.link_center_hz << '|' << spec.seed;
  const std::string s = os.str();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

TrialResult run_trial(const TrialSpec& spec, TrialArtifacts* artifacts, bool keep_evm_grid) {
  validate_trial_spec(spec);
  const LinkConfig cfg = link_preset(spec.link);

  const BitPayload payload = random_payload(cfg.payload_bits(), derive_seed(spec.seed, "payload"));
  const ResourceGrid reference = build_grid(payload, cfg, derive_seed(spec.seed, "pilots"));

  IqBuffer tx = ofdm_modulate(reference);
  tx.center_freq_hz = spec.link_center_hz;
  for (auto& s : tx.samples) s *= spec.tx_power_scale;

  IqBuffer jam;
  ChannelConfig ch = spec.channel;
  ch.seed = derive_seed(spec.seed, "noise");
  if (spec.jammer == JammerKind::none) {
    ch.interferer_gain_db.reset();
  } else {
    const double frame_s = cfg.frame_duration_s();
    if (spec.jammer == JammerKind::transient) {
      TransientPulseParams p = spec.pulse;
      p.tau_rise_s *= spec.time_scale;
      p.tau_hold_s *= spec.time_scale;
      p.carrier_freq_hz /= spec.time_scale;
      BurstSchedule sched = spec.schedule;
      if (sched.duration_s <= 0.0) sched.duration_s = frame_s;
      sched.seed = derive_seed(spec.seed, "jammer");
      jam = burst_train(p, sched, cfg.sample_rate_hz);
    } else {
      jam = cw_tone(spec.cw_freq_hz, 1.0, cfg.sample_rate_hz, frame_s);
    }
    // normalize so interferer_gain_db == gain_ref_db gives jammer power equal
    // to the received desired-signal power
    const double p_jam = dsp::mean_power(jam);
    if (!(p_jam > 0.0)) {
      throw validation_error("jammer waveform has zero power in the trial window");
    }
    const double p_rx = dsp::mean_power(tx) * std::norm(spec.channel.flat_gain);
    const double target = p_rx * std::pow(10.0, -spec.gain_ref_db / 10.0);
    const double a = std::sqrt(target / p_jam);
    for (auto& s : jam.samples) s *= a;
  }

  CombineResult combined = combine(tx, jam, ch);

  const SyncEstimate sync = estimate_sync(combined.received, cfg);
  const bool sync_failed = sync.quality < kSyncQualityThreshold;

  const ResourceGrid raw = ofdm_demodulate(combined.received, cfg, sync.frame_start);
  const ResourceGrid h_hat = estimate_channel(raw, reference);
  const ResourceGrid eq = equalize(raw, h_hat);

  const auto ref_data = reference.cells_with_role(CellRole::data);
  const auto rx_data = eq.cells_with_role(CellRole::data);

  TrialResult out;
  out.seed = spec.seed;
  out.digest = config_digest(spec);
  out.sync_failed = sync_failed;
  out.ground_truth = combined.ground_truth;

  const kpi::EvmResult ev = kpi::evm(ref_data, rx_data);
  out.kpi.evm_rms_percent = ev.rms_percent;
  out.kpi.evm_peak_percent = ev.peak_percent;
  out.kpi.ber = sync_failed ? 0.5 : kpi::ber(payload, qam_demap(rx_data, cfg.modulation));
  out.kpi.cfo_hz = sync.cfo_hz;
  out.kpi.papr_db = kpi::papr(combined.received);

  const PowerTriple est = kpi::estimate_sinr_from_grid(eq, reference);
  if (est.p_interference + est.p_noise > 0.0) out.kpi.sinr_db = kpi::sinr(est).db;

  // per-subcarrier estimate: projection vs residual along each subcarrier row
  out.kpi.sinr_per_subcarrier_db.resize(cfg.num_subcarriers);
  for (std::size_t k = 0; k < cfg.num_subcarriers; ++k) {
    ComplexSample dot{0.0, 0.0};
    double ref_energy = 0.0;
    for (std::size_t l = 0; l < cfg.num_symbols_per_frame; ++l) {
      dot += eq.at(k, l) * std::conj(reference.at(k, l));
      ref_energy += std::norm(reference.at(k, l));
    }
    const ComplexSample alpha = dot / ref_energy;
    double resid = 0.0;
    for (std::size_t l = 0; l < cfg.num_symbols_per_frame; ++l) {
      resid += std::norm(eq.at(k, l) - alpha * reference.at(k, l));
    }
    out.kpi.sinr_per_subcarrier_db[k] =
        resid > 0.0 ? 10.0 * std::log10(std::norm(alpha) * ref_energy / resid) : INFINITY;
  }

  if (keep_evm_grid) out.kpi.evm_grid = kpi::evm_grid(eq, reference);

  if (artifacts) {
    artifacts->transmitted = std::move(tx);
    artifacts->received = std::move(combined.received);
    artifacts->reference = reference;
    artifacts->equalized = eq;
  }
  return out;
}

SweepResult run_sweep(const SweepSpec& spec, std::size_t parallelism) {
  if (spec.offsets_hz.empty() || spec.gains_db.empty() || spec.seeds_per_point == 0) {
    throw validation_error("run_sweep: axes must be nonempty");
  }
  // fail-fast preflight over the whole grid before any execution
  std::vector<TrialSpec> specs;
  specs.reserve(spec.offsets_hz.size() * spec.gains_db.size() * spec.seeds_per_point);
  for (std::size_t oi = 0; oi < spec.offsets_hz.size(); ++oi) {
    for (std::size_t gi = 0; gi < spec.gains_db.size(); ++gi) {
      for (std::size_t si = 0; si < spec.seeds_per_point; ++si) {
        TrialSpec t = spec.base;
        t.channel.interferer_offset_hz = spec.offsets_hz[oi];
        if (t.jammer != JammerKind::none) t.channel.interferer_gain_db = spec.gains_db[gi];
        t.seed = spec.base.seed + oi * spec.seeds_per_point + si;  // shared across gains
        validate_trial_spec(t);
        specs.push_back(std::move(t));
      }
    }
  }

  SweepResult result;
  result.rows.resize(specs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      try {
        TrialResult r = run_trial(specs[i], nullptr, false);
        SweepRow& row = result.rows[i];
        row.offset_hz = specs[i].channel.interferer_offset_hz;
        row.gain_db = specs[i].channel.interferer_gain_db.value_or(0.0);
        row.seed = specs[i].seed;
        row.kpi = std::move(r.kpi);
        row.ground_truth = r.ground_truth;
        row.sync_failed = r.sync_failed;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(specs.size());
        return;
      }
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(parallelism, specs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return result;
}

std::string sweep_to_csv(const SweepResult& result) {
  std::string out =
      "offset_hz,gain_db,seed,evm_peak_pct,evm_rms_pct,ber,sinr_db,cfo_hz,papr_db,sync_failed\n";
  for (const auto& r : result.rows) {
    out += fmt(r.offset_hz) + ',' + fmt(r.gain_db) + ',' + std::to_string(r.seed) + ',' +
           fmt(r.kpi.evm_peak_percent) + ',' + fmt(r.kpi.evm_rms_percent) + ',' +
           fmt(r.kpi.ber) + ',' + (r.kpi.sinr_db ? fmt(*r.kpi.sinr_db) : std::string("inf")) +
           ',' + fmt(r.kpi.cfo_hz) + ',' + fmt(r.kpi.papr_db) + ',' +
           (r.sync_failed ? "1" : "0") + '\n';
  }
  return out;
}

std::string sweep_to_json(const SweepResult& result) {
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back(json{{"offset_hz", r.offset_hz},
                        {"gain_db", r.gain_db},
                        {"seed", r.seed},
                        {"sync_failed", r.sync_failed},
                        {"kpi", kpi_to_json(r.kpi)},
                        {"ground_truth", triple_to_json(r.ground_truth)}});
  }
  return json{{"rows", rows}}.dump(2);
}

SweepResult sweep_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw io_error(std::string("sweep JSON parse failure: ") + e.what());
  }
  SweepResult result;
  for (const auto& jr : j.at("rows")) {
    SweepRow row;
    row.offset_hz = jr.at("offset_hz").get<double>();
    row.gain_db = jr.at("gain_db").get<double>();
    row.seed = jr.at("seed").get<std::uint64_t>();
    row.sync_failed = jr.at("sync_failed").get<bool>();
    row.kpi = kpi_from_json(jr.at("kpi"));
    const auto& gt = jr.at("ground_truth");
    row.ground_truth.p_signal = gt.at("p_signal").get<double>();
    row.ground_truth.p_interference = gt.at("p_interference").get<double>();
    row.ground_truth.p_noise = gt.at("p_noise").get<double>();
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string sweep_to_markdown(const SweepResult& result) {
  struct Acc {
    std::vector<double> evm, ber, sinr;
    std::size_t fails = 0;
  };
  // rows are ordered (offset, gain, seed); aggregate contiguous groups
  std::string out =
      "| offset_hz | gain_db | evm_rms_pct | ber | sinr_db | sync_failures |\n"
      "|---|---|---|---|---|---|\n";
  auto mean_std = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    s = v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0;
    return std::pair<double, double>(m, s);
  };
  std::size_t i = 0;
  while (i < result.rows.size()) {
    const double off = result.rows[i].offset_hz;
    const double gain = result.rows[i].gain_db;
    Acc acc;
    for (; i < result.rows.size() && result.rows[i].offset_hz == off &&
           result.rows[i].gain_db == gain;
         ++i) {
      const auto& r = result.rows[i];
      acc.evm.push_back(r.kpi.evm_rms_percent);
      acc.ber.push_back(r.kpi.ber);
      if (r.kpi.sinr_db) acc.sinr.push_back(*r.kpi.sinr_db);
      acc.fails += r.sync_failed ? 1u : 0u;
    }
    const auto [em, es] = mean_std(acc.evm);
    const auto [bm, bs] = mean_std(acc.ber);
    std::string sinr_cell = "inf";
    if (!acc.sinr.empty()) {
      const auto [sm, ss] = mean_std(acc.sinr);
      sinr_cell = fmt(sm) + " \xc2\xb1 " + fmt(ss);
    }
    out += "| " + fmt(off) + " | " + fmt(gain) + " | " + fmt(em) + " \xc2\xb1 " + fmt(es) +
           " | " + fmt(bm) + " \xc2\xb1 " + fmt(bs) + " | " + sinr_cell + " | " +
           std::to_string(acc.fails) + " |\n";
  }
  return out;
}

std::string trial_to_json(const TrialResult& result) {
  json j = kpi_to_json(result.kpi);
  j["config_digest"] = result.digest;
  j["sync_failed"] = result.sync_failed;
  j["ground_truth"] = triple_to_json(result.ground_truth);
  if (result.kpi.evm_grid.percent.empty()) {
    j["evm_grid"] = nullptr;
  } else {
    json rows = json::array();
    for (std::size_t l = 0; l < result.kpi.evm_grid.num_l; ++l) {
      json row = json::array();
      for (std::size_t k = 0; k < result.kpi.evm_grid.num_k; ++k) {
        row.push_back(result.kpi.evm_grid.at(k, l));
      }
      rows.push_back(std::move(row));
    }
    j["evm_grid"] = std::move(rows);
  }
  return j.dump(2);
}

std::string evm_grid_to_csv(const kpi::EvmGrid& grid) {
  std::string out = "subcarrier,symbol,evm_percent,role\n";
  for (std::size_t l = 0; l < grid.num_l; ++l) {
    for (std::size_t k = 0; k < grid.num_k; ++k) {
      const CellRole r = grid.roles[l * grid.num_k + k];
      if (r == CellRole::null_cell) continue;  // null cells are reported as absent
      out += std::to_string(k) + ',' + std::to_string(l) + ',' + fmt(grid.at(k, l)) + ',' +
             role_name(r) + '\n';
    }
  }
  return out;
}

std::string constellation_to_csv(const ResourceGrid& equalized) {
  std::string out = "i,q\n";
  for (const auto& c : equalized.cells_with_role(CellRole::data)) {
    out += fmt(c.real()) + ',' + fmt(c.imag()) + '\n';
  }
  return out;
}

std::string psd_to_csv(const dsp::PsdTrace& trace) {
  std::string out = "offset_hz,power_db\n";
  for (std::size_t i = 0; i < trace.freq_hz.size(); ++i) {
    out += fmt(trace.freq_hz[i]) + ',' + fmt(trace.power_db[i]) + '\n';
  }
  return out;
}

}  // namespace linksim
