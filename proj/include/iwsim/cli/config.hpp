#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "iwsim/loc/server.hpp"
#include "iwsim/mac/params.hpp"
#include "iwsim/nlos/dataset.hpp"
#include "iwsim/nlos/evaluate.hpp"
#include "iwsim/phy/ber.hpp"
#include "iwsim/phy/channel.hpp"
#include "iwsim/phy/gfdm.hpp"

namespace iwsim::cli {

using Json = nlohmann::ordered_json;

/// Malformed file, unknown key or a value of the wrong type.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Key sets, one per subcommand. Every section also carries `seed`.
enum class Section { Mac, Phy, Loc, NlosGen, NlosEval, ReproDelay, ReproScheduler };

std::string to_string(Section s);

/// Documented defaults of a section, in a fixed key order.
Json defaults(Section s);

/// Flat `key = value` lines: `#` comments, strings in double quotes,
/// integers, floats, true/false and single-line arrays of those.
/// Tables are not supported.
Json parse_toml(const std::string& text, const std::string& origin);

/// JSON or the TOML subset, chosen by extension (.json, .toml). An empty
/// file is an empty object.
Json read_config_file(const std::string& path);

/// defaults(section) overlaid with `overrides`; unknown keys are rejected.
Json resolve(Section section, const Json& overrides, const std::string& origin);

/// read_config_file + resolve. An empty path gives the defaults.
Json load_config(const std::string& path, Section section);

// Typed views of a resolved section. Values are checked here.
std::uint64_t seed_of(const Json& cfg);
mac::Scenario mac_scenario(const Json& cfg);
mac::PhyParams mac_phy(const Json& cfg);
phy::GfdmConfig gfdm_config(const Json& cfg);
phy::ChannelModel phy_channel(const Json& cfg);
phy::BerOptions ber_options(const Json& cfg);
loc::ServerConfig loc_server(const Json& cfg);
nlos::SyntheticCirParams nlos_params(const Json& cfg);
nlos::EvalOptions nlos_eval_options(const Json& cfg);

/// "A..B[:step]" or a single number. Points are first + i*step up to last.
std::vector<double> parse_real_range(const std::string& text);

/// `anchors` is either a JSON file path or an inline array of {id, x, y, z}.
std::vector<loc::Anchor> anchors_from(const Json& value, const std::string& base_dir);
std::vector<loc::Vec3> path_from_file(const std::string& path);

}  // namespace iwsim::cli
