#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace urnsim {

// Provenance record written next to every batch of output files: what
// command ran, with which parameters and seed, when, and what it produced.
// Serialization round-trips losslessly so a manifest can be read back to
// re-run or audit a result.
struct RunManifest {
  std::string command;
  nlohmann::json parameters;  // full effective parameter set
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string started_at;   // ISO 8601 UTC
  std::string finished_at;  // ISO 8601 UTC
  std::vector<std::string> outputs;
  std::vector<std::string> notes;

  bool operator==(const RunManifest&) const = default;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);

  void write(const std::string& path) const;
  static RunManifest read(const std::string& path);
};

// current wall time as ISO 8601 UTC, second resolution
std::string iso8601_now();

}  // namespace urnsim
