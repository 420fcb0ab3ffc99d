#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace seglm::cli {

inline constexpr const char* kToolVersion = "0.1.0";

inline std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
  return buf;
}

/// Reproducibility record written alongside every command's outputs.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::map<std::string, std::string> settings;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string checkpoint;
  std::uint64_t seed = 0;
  std::string started_at = iso_timestamp();

  void write(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["tool"] = "seglm";
    j["version"] = kToolVersion;
    j["command"] = command;
    j["argv"] = argv;
    j["settings"] = settings;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    if (!checkpoint.empty()) j["checkpoint"] = checkpoint;
    j["seed"] = seed;
    j["started_at"] = started_at;
    j["finished_at"] = iso_timestamp();
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
  }
};

}  // namespace seglm::cli
