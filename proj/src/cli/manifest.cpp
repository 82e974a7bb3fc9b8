#include "iwsim/cli/manifest.hpp"

#include <filesystem>
#include <fstream>

namespace iwsim::cli {

Json RunManifest::to_json() const {
  Json j = Json::object();
  j["tool"] = "iwsim";
  j["version"] = version;
  j["subcommand"] = subcommand;
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  j["outputs"] = outputs;
  j["config"] = config;
  return j;
}

RunManifest RunManifest::from_json(const Json& j) {
  RunManifest m;
  try {
    if (j.value("tool", std::string{}) != "iwsim") throw ConfigError("not an iwsim run manifest");
    m.version = j.at("version").get<std::string>();
    m.subcommand = j.at("subcommand").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.out_dir = j.at("out_dir").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.config = j.at("config");
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed run manifest: ") + e.what());
  }
  if (!m.config.is_object()) throw ConfigError("malformed run manifest: config must be an object");
  return m;
}

std::string manifest_path_for(const std::string& output_path) {
  std::filesystem::path p(output_path);
  p.replace_extension(".manifest.json");
  return p.string();
}

void write_manifest(const RunManifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest " + path);
  out << m.to_json().dump(2) << '\n';
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return RunManifest::from_json(j);
}

}  // namespace iwsim::cli
