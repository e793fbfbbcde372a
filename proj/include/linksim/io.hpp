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
#ifndef LINKSIM_IO_HPP
#define LINKSIM_IO_HPP

#include <string>

#include "linksim/iq.hpp"

namespace linksim {

/// IQ capture format: interleaved little-endian float32 I/Q pairs in `path`,
/// metadata in a JSON sidecar at `path + ".json"` with fields sample_rate_hz,
/// center_freq_hz, num_samples and format ("cf32le").
void export_iq(const IqBuffer& buf, const std::string& path);

/// Reads a cf32le capture; rejects sidecar/payload length mismatches and
/// unknown format strings.
IqBuffer import_iq(const std::string& path);

}  // namespace linksim

#endif  // LINKSIM_IO_HPP
