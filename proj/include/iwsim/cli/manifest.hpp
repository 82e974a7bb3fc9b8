#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iwsim/cli/config.hpp"

namespace iwsim::cli {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Everything needed to regenerate an output file bit-identically.
struct RunManifest {
  std::string subcommand;  // e.g. "mac-sim", "phy ber"
  Json config;             // resolved section, seed included
  std::uint64_t seed = 0;
  std::string version = kToolkitVersion;
  std::string out_dir = ".";
  std::vector<std::string> outputs;

  Json to_json() const;
  static RunManifest from_json(const Json& j);
};

/// `dir/name.csv` -> `dir/name.manifest.json`.
std::string manifest_path_for(const std::string& output_path);

void write_manifest(const RunManifest& m, const std::string& path);
RunManifest read_manifest(const std::string& path);

}  // namespace iwsim::cli
