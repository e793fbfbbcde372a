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
#include "linksim/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "cf32le I/O assumes a little-endian host");

namespace linksim {

void export_iq(const IqBuffer& buf, const std::string& path) {
  buf.validate();
  std::ofstream payload(path, std::ios::binary);
  if (!payload) throw io_error("cannot open '" + path + "' for writing");
  std::vector<float> raw(buf.size() * 2);
  for (std::size_t n = 0; n < buf.size(); ++n) {
    raw[2 * n] = static_cast<float>(buf.samples[n].real());
    raw[2 * n + 1] = static_cast<float>(buf.samples[n].imag());
  }
  payload.write(reinterpret_cast<const char*>(raw.data()),
                static_cast<std::streamsize>(raw.size() * sizeof(float)));
  if (!payload) throw io_error("write failed for '" + path + "'");
  payload.close();

  nlohmann::json sidecar = {
      {"sample_rate_hz", buf.sample_rate_hz},
      {"center_freq_hz", buf.center_freq_hz},
      {"num_samples", buf.size()},
      {"format", "cf32le"},
  };
  std::ofstream meta(path + ".json");
  if (!meta) throw io_error("cannot open '" + path + ".json' for writing");
  meta << sidecar.dump(2) << "\n";
  if (!meta) throw io_error("write failed for '" + path + ".json'");
}

IqBuffer import_iq(const std::string& path) {
  std::ifstream meta(path + ".json");
  if (!meta) throw io_error("missing sidecar '" + path + ".json'");
  nlohmann::json sidecar;
  try {
    meta >> sidecar;
  } catch (const nlohmann::json::exception& e) {
    throw io_error("malformed sidecar '" + path + ".json': " + e.what());
  }
  const std::string format = sidecar.value("format", "");
  if (format != "cf32le") {
    throw validation_error("unknown IQ format '" + format + "' in '" + path +
                           ".json' (expected cf32le)");
  }
  if (!sidecar.contains("sample_rate_hz") || !sidecar.contains("num_samples")) {
    throw validation_error("sidecar '" + path + ".json' lacks sample_rate_hz or num_samples");
  }
  const auto declared = sidecar["num_samples"].get<std::uint64_t>();

  std::ifstream payload(path, std::ios::binary | std::ios::ate);
  if (!payload) throw io_error("cannot open '" + path + "'");
  const auto bytes = static_cast<std::uint64_t>(payload.tellg());
  const std::uint64_t actual = bytes / (2 * sizeof(float));
  if (bytes % (2 * sizeof(float)) != 0 || actual != declared) {
    throw validation_error("IQ payload '" + path + "' holds " + std::to_string(actual) +
                           " samples (" + std::to_string(bytes) + " bytes) but sidecar declares " +
                           std::to_string(declared));
  }
  payload.seekg(0);
  std::vector<float> raw(declared * 2);
  payload.read(reinterpret_cast<char*>(raw.data()),
               static_cast<std::streamsize>(raw.size() * sizeof(float)));
  if (!payload) throw io_error("read failed for '" + path + "'");

  IqBuffer buf;
  buf.sample_rate_hz = sidecar["sample_rate_hz"].get<double>();
  buf.center_freq_hz = sidecar.value("center_freq_hz", 0.0);
  buf.samples.resize(declared);
  for (std::uint64_t n = 0; n < declared; ++n) {
    buf.samples[n] = ComplexSample(raw[2 * n], raw[2 * n + 1]);
  }
  buf.validate();
  return buf;
}

}  // namespace linksim
