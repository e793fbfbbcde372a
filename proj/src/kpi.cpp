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
#include "linksim/kpi.hpp"

#include <cmath>

#include "linksim/dsp.hpp"

namespace linksim::kpi {

EvmResult evm(const std::vector<ComplexSample>& reference,
              const std::vector<ComplexSample>& received) {
  if (reference.size() != received.size()) {
    throw validation_error("evm: length mismatch (" + std::to_string(reference.size()) + " vs " +
                           std::to_string(received.size()) + ")");
  }
  if (reference.empty()) throw validation_error("evm: empty input");

  double ref_acc = 0.0, err_acc = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    ref_acc += std::norm(reference[i]);
    err_acc += std::norm(reference[i] - received[i]);
  }
  const double n = static_cast<double>(reference.size());
  const double ref_rms = std::sqrt(ref_acc / n);
  if (!(ref_rms > 0.0)) throw validation_error("evm: reference has zero power");

  EvmResult res;
  res.rms_percent = std::sqrt(err_acc / n) / ref_rms * 100.0;
  res.per_symbol_percent.resize(reference.size());
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double v = std::abs(reference[i] - received[i]) / ref_rms * 100.0;
    res.per_symbol_percent[i] = v;
    if (v > res.peak_percent) res.peak_percent = v;
  }
  return res;
}

SinrResult sinr(const PowerTriple& p) {
  const double denom = p.p_interference + p.p_noise;
  if (!(denom > 0.0)) {
    throw validation_error("sinr: zero interference-plus-noise power (noiseless)");
  }
  SinrResult r;
  r.ratio = p.p_signal / denom;
  r.db = 10.0 * std::log10(r.ratio);
  return r;
}

double sinr_per_subcarrier(const SubcarrierSinrInput& in, bool strict) {
  double interferer_sum = 0.0;
  for (double pj : in.interferer_powers) interferer_sum += pj;
  const double denom = (strict ? interferer_sum * in.p_tx : interferer_sum) + in.n0 * in.b_hz;
  if (!(denom > 0.0)) throw validation_error("sinr_per_subcarrier: zero denominator");
  return std::norm(in.h) * in.p_tx / denom;
}

PowerTriple estimate_sinr_from_grid(const ResourceGrid& equalized, const ResourceGrid& reference) {
  if (equalized.num_k() != reference.num_k() || equalized.num_l() != reference.num_l()) {
    throw validation_error("estimate_sinr_from_grid: grid shapes differ");
  }
  ComplexSample dot{0.0, 0.0};
  double ref_energy = 0.0;
  for (std::size_t i = 0; i < reference.cells.size(); ++i) {
    dot += equalized.cells[i] * std::conj(reference.cells[i]);
    ref_energy += std::norm(reference.cells[i]);
  }
  if (!(ref_energy > 0.0)) throw validation_error("estimate_sinr_from_grid: zero reference");

  const double n = static_cast<double>(reference.cells.size());
  const ComplexSample alpha = dot / ref_energy;
  double resid = 0.0;
  for (std::size_t i = 0; i < reference.cells.size(); ++i) {
    resid += std::norm(equalized.cells[i] - alpha * reference.cells[i]);
  }
  PowerTriple p;
  p.p_signal = std::norm(alpha) * ref_energy / n;  // projection power per cell
  p.p_interference = resid / n;                    // joint interference + noise
  p.p_noise = 0.0;
  return p;
}

double ber(const BitPayload& tx, const BitPayload& rx) {
  if (tx.size() != rx.size() || tx.size() == 0) {
    throw validation_error("ber: payload lengths must match and be nonzero (" +
                           std::to_string(tx.size()) + " vs " + std::to_string(rx.size()) + ")");
  }
  std::size_t diff = 0;
  for (std::size_t i = 0; i < tx.size(); ++i) diff += tx.bits[i] != rx.bits[i];
  return static_cast<double>(diff) / static_cast<double>(tx.size());
}

double papr(const IqBuffer& buf) {
  if (buf.empty()) throw validation_error("papr: empty buffer");
  double peak = 0.0, acc = 0.0;
  for (const auto& s : buf.samples) {
    const double p = std::norm(s);
    acc += p;
    if (p > peak) peak = p;
  }
  if (!(acc > 0.0)) throw validation_error("papr: zero-power buffer");
  return 10.0 * std::log10(peak / (acc / static_cast<double>(buf.size())));
}

EvmGrid evm_grid(const ResourceGrid& equalized, const ResourceGrid& reference) {
  if (equalized.num_k() != reference.num_k() || equalized.num_l() != reference.num_l()) {
    throw validation_error("evm_grid: grid shapes differ");
  }
  double ref_acc = 0.0;
  std::size_t active = 0;
  for (std::size_t i = 0; i < reference.cells.size(); ++i) {
    if (reference.roles[i] == CellRole::null_cell) continue;
    ref_acc += std::norm(reference.cells[i]);
    ++active;
  }
  if (active == 0 || !(ref_acc > 0.0)) {
    throw validation_error("evm_grid: reference has no active power");
  }
  const double ref_rms = std::sqrt(ref_acc / static_cast<double>(active));

  EvmGrid g;
  g.num_k = reference.num_k();
  g.num_l = reference.num_l();
  g.roles = reference.roles;
  g.percent.assign(reference.cells.size(), 0.0);
  for (std::size_t i = 0; i < reference.cells.size(); ++i) {
    if (reference.roles[i] == CellRole::null_cell) continue;
    g.percent[i] = std::abs(reference.cells[i] - equalized.cells[i]) / ref_rms * 100.0;
  }
  return g;
}

}  // namespace linksim::kpi
