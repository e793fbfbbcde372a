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
#ifndef LINKSIM_KPI_HPP
#define LINKSIM_KPI_HPP

#include <optional>
#include <vector>

#include "linksim/channel.hpp"
#include "linksim/iq.hpp"
#include "linksim/ofdm.hpp"
#include "linksim/qam.hpp"

namespace linksim::kpi {

struct EvmResult {
  double rms_percent = 0.0;
  double peak_percent = 0.0;
  std::vector<double> per_symbol_percent;
};

/// Error vector magnitude in percent. RMS error normalized by the reference
/// RMS over the whole sequence; per-symbol values share that normalization,
/// so individual symbols can exceed 100%.
EvmResult evm(const std::vector<ComplexSample>& reference,
              const std::vector<ComplexSample>& received);

struct SinrResult {
  double ratio = 0.0;
  double db = 0.0;
};

/// p_signal / (p_interference + p_noise). Throws on a zero denominator
/// ("noiseless"); callers use a sentinel for that case.
SinrResult sinr(const PowerTriple& p);

/// Inputs for the per-subcarrier ratio of one subcarrier k.
struct SubcarrierSinrInput {
  ComplexSample h{1.0, 0.0};           // channel response H_k
  double p_tx = 1.0;                   // per-subcarrier transmit power
  std::vector<double> interferer_powers;  // |I_j|^2 per interfering component
  double n0 = 0.0;                     // noise spectral density
  double b_hz = 0.0;                   // subcarrier bandwidth
};

/// |H_k|^2 P_tx / (sum_j |I_j|^2 P_tx + N0 B_k). strict=true keeps the P_tx
/// factor on the interference sum; strict=false uses the conventional
/// sum |I_j|^2 + N0 B_k denominator.
double sinr_per_subcarrier(const SubcarrierSinrInput& in, bool strict = true);

/// Receiver-side estimate: signal power from the projection of the equalized
/// grid onto the reference, interference-plus-noise from the mean residual.
/// The two are inseparable at the receiver, so the joint term is returned in
/// p_interference with p_noise = 0.
PowerTriple estimate_sinr_from_grid(const ResourceGrid& equalized, const ResourceGrid& reference);

/// Hamming distance / length. Lengths must match and be nonzero.
double ber(const BitPayload& tx, const BitPayload& rx);

/// 10 log10(max|x|^2 / mean|x|^2). Errors on empty or all-zero buffers.
double papr(const IqBuffer& buf);

/// Per-cell EVM in percent, normalized by the frame-wide reference RMS.
/// Null cells carry no value (role matrix distinguishes them).
struct EvmGrid {
  std::size_t num_k = 0;
  std::size_t num_l = 0;
  std::vector<double> percent;   // l-major, same layout as ResourceGrid
  std::vector<CellRole> roles;

  double at(std::size_t k, std::size_t l) const { return percent[l * num_k + k]; }
};

EvmGrid evm_grid(const ResourceGrid& equalized, const ResourceGrid& reference);

/// KPI set of one trial, mirroring one measurement row.
struct KpiReport {
  double evm_rms_percent = 0.0;
  double evm_peak_percent = 0.0;
  double ber = 0.0;
  std::optional<double> sinr_db;              // nullopt: zero residual ("noiseless")
  std::vector<double> sinr_per_subcarrier_db;
  double cfo_hz = 0.0;
  double papr_db = 0.0;
  EvmGrid evm_grid;
};

}  // namespace linksim::kpi

#endif  // LINKSIM_KPI_HPP
