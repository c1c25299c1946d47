#include "urnsim/manifest.hpp"

#include <ctime>
#include <fstream>
#include <stdexcept>

namespace urnsim {

nlohmann::json RunManifest::to_json() const {
  return nlohmann::json{{"command", command},
                        {"parameters", parameters},
                        {"seed", seed},
                        {"tool_version", tool_version},
                        {"started_at", started_at},
                        {"finished_at", finished_at},
                        {"outputs", outputs},
                        {"notes", notes}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.parameters = j.at("parameters");
  m.seed = j.at("seed").get<std::uint64_t>();
  m.tool_version = j.at("tool_version").get<std::string>();
  m.started_at = j.at("started_at").get<std::string>();
  m.finished_at = j.at("finished_at").get<std::string>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  m.notes = j.at("notes").get<std::vector<std::string>>();
  return m;
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << to_json().dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

RunManifest RunManifest::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

std::string iso8601_now() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

}  // namespace urnsim
