#include "iwsim/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace iwsim::cli {

namespace {

std::string where(const std::string& origin, std::size_t line, std::size_t col) {
  return origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": ";
}

class TomlLine {
 public:
  TomlLine(const std::string& text, std::size_t line, const std::string& origin)
      : s_(text), line_(line), origin_(origin) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(where(origin_, line_, pos_ + 1) + msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#' || s_[pos_] == '\r';
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  std::string key() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '-')) {
      ++pos_;
    }
    if (pos_ == start) fail(peek() == '[' ? "tables are not supported" : "expected a key");
    return s_.substr(start, pos_ - start);
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Json value() {
    skip_ws();
    const char c = peek();
    if (c == '"') return string();
    if (c == '[') return array();
    if (s_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      return true;
    }
    if (s_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      return false;
    }
    return number();
  }

 private:
  Json string() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: --pos_; fail(std::string("unsupported escape \\") + e);
        }
      }
      out += c;
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  Json array() {
    ++pos_;
    Json out = Json::array();
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      return out;
    }
    for (;;) {
      out.push_back(value());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
        if (peek() == ']') {
          ++pos_;
          return out;
        }
        continue;
      }
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      fail("expected ',' or ']' in array");
    }
  }

  Json number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '+' ||
                                s_[pos_] == '-' || s_[pos_] == '.' || s_[pos_] == '_')) {
      ++pos_;
    }
    std::string tok = s_.substr(start, pos_ - start);
    tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
    if (tok.empty()) {
      pos_ = start;
      fail("expected a value");
    }
    if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
    if (tok == "-inf") return -std::numeric_limits<double>::infinity();
    const bool is_int = tok.find_first_of(".eE") == std::string::npos;
    try {
      std::size_t used = 0;
      if (is_int) {
        const long long v = std::stoll(tok, &used);
        if (used == tok.size()) return v;
      } else {
        const double v = std::stod(tok, &used);
        if (used == tok.size()) return v;
      }
    } catch (const std::logic_error&) {
    }
    pos_ = start;
    fail("invalid value '" + tok + "'");
  }

  const std::string& s_;
  std::size_t line_;
  const std::string& origin_;
  std::size_t pos_ = 0;
};

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

const Json& at(const Json& cfg, const char* key) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) throw ConfigError(std::string("missing key '") + key + "'");
  return *it;
}

[[noreturn]] void type_error(const char* key, const char* expected, const Json& v) {
  throw ConfigError(std::string("key '") + key + "': expected " + expected + ", got " + v.dump());
}

double real_of(const Json& cfg, const char* key) {
  const Json& v = at(cfg, key);
  if (!v.is_number()) type_error(key, "a number", v);
  return v.get<double>();
}

std::int64_t int_of(const Json& cfg, const char* key) {
  const Json& v = at(cfg, key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && std::floor(d) == d && std::abs(d) < 9.0e18) return static_cast<std::int64_t>(d);
  }
  type_error(key, "an integer", v);
}

int small_int_of(const Json& cfg, const char* key) {
  const std::int64_t v = int_of(cfg, key);
  if (v < -1'000'000'000 || v > 1'000'000'000) type_error(key, "an integer in int range", at(cfg, key));
  return static_cast<int>(v);
}

bool bool_of(const Json& cfg, const char* key) {
  const Json& v = at(cfg, key);
  if (!v.is_boolean()) type_error(key, "true or false", v);
  return v.get<bool>();
}

std::string str_of(const Json& cfg, const char* key) {
  const Json& v = at(cfg, key);
  if (!v.is_string()) type_error(key, "a string", v);
  return v.get<std::string>();
}

void add_mac_keys(Json& j) {
  const mac::Scenario s;
  const mac::PhyParams p;
  j["n_safety"] = s.n_safety;
  j["n_ar"] = "5..50:5";
  j["duration_s"] = to_s(s.duration);
  j["safety_period_ms"] = to_ms(s.safety.period);
  j["safety_msi_ms"] = to_ms(s.safety.msi);
  j["safety_bytes"] = s.safety.burst_bytes;
  j["safety_msdu_bytes"] = s.safety.msdu_bytes;
  j["safety_aligned"] = s.safety.aligned_release;
  j["ar_period_ms"] = to_ms(s.ar.period);
  j["ar_msi_ms"] = to_ms(s.ar.msi);
  j["ar_burst_bytes"] = s.ar.burst_bytes;
  j["ar_msdu_bytes"] = s.ar.msdu_bytes;
  j["ar_aligned"] = s.ar.aligned_release;
  j["pcf_cfp_fraction"] = s.pcf_cfp_fraction;
  j["edf_txop_limit_ms"] = to_ms(s.edf_txop_limit);
  j["slot_us"] = to_us(p.slot);
  j["sifs_us"] = to_us(p.sifs);
  j["difs_us"] = to_us(p.difs);
  j["pifs_us"] = to_us(p.pifs);
  j["data_rate_mbps"] = p.data_rate_mbps;
  j["ack_us"] = to_us(p.ack);
  j["beacon_interval_ms"] = to_ms(p.beacon_interval);
  j["frame_overhead_us"] = to_us(p.frame_overhead);
  j["beacon_bytes"] = p.beacon_bytes;
  j["cw_min"] = p.cw_min;
  j["cw_max"] = p.cw_max;
  j["retry_limit"] = p.retry_limit;
}

}  // namespace

std::string to_string(Section s) {
  switch (s) {
    case Section::Mac: return "mac-sim";
    case Section::Phy: return "phy ber";
    case Section::Loc: return "loc sim";
    case Section::NlosGen: return "nlos gen";
    case Section::NlosEval: return "nlos eval";
    case Section::ReproDelay: return "repro fig-delay";
    case Section::ReproScheduler: break;
  }
  return "repro fig-scheduler";
}

Json defaults(Section s) {
  Json j = Json::object();
  j["seed"] = 1;
  switch (s) {
    case Section::Mac:
      j["access"] = "hcca";
      j["scheduler"] = "ref";
      add_mac_keys(j);
      j["out"] = "mac.csv";
      break;
    case Section::ReproDelay:
      add_mac_keys(j);
      j["out_prefix"] = "fig_delay";
      break;
    case Section::ReproScheduler:
      add_mac_keys(j);
      j["safety_msi_ms"] = 24.0;
      j["n_ar"] = "5..60:5";
      j["out_prefix"] = "fig_scheduler";
      break;
    case Section::Phy: {
      const phy::GfdmConfig g;
      j["K"] = g.K;
      j["M"] = g.M;
      j["active"] = Json::array();
      j["pulse"] = std::string(phy::to_string(g.pulse));
      j["rolloff"] = g.rolloff;
      j["cp_len"] = g.cp_len;
      j["cs_len"] = g.cs_len;
      j["constellation"] = std::string(phy::to_string(g.constellation));
      j["receiver"] = std::string(phy::to_string(g.receiver));
      j["window_len"] = g.window_len;
      j["channel"] = "awgn";
      j["taps"] = Json::array({1.0});
      j["cfo"] = 0.0;
      j["snr_db"] = "0..10:2";
      j["snr_reference"] = "sample";
      j["bits"] = 1000000;
      j["genie_sync"] = false;
      j["genie_channel"] = false;
      j["iq_out"] = "";
      j["out"] = "ber.csv";
      break;
    }
    case Section::Loc: {
      const loc::ServerConfig c;
      j["anchors"] = Json::array({Json{{"id", 1}, {"x", 2.5}, {"y", 2.5}, {"z", 0.0}},
                                  Json{{"id", 2}, {"x", 7.5}, {"y", 2.5}, {"z", 3.0}},
                                  Json{{"id", 3}, {"x", 2.5}, {"y", 7.5}, {"z", 3.0}},
                                  Json{{"id", 4}, {"x", 7.5}, {"y", 7.5}, {"z", 0.0}}});
      j["path"] = "";
      j["room"] = Json::array({10.0, 10.0, 3.0});
      j["sigma_d"] = 1.0;
      j["bias"] = c.noise.bias;
      j["trials"] = 1000;
      j["processing_delay_us"] = c.processing_delay_s * 1e6;
      j["frame_airtime_us"] = c.frame_airtime_s * 1e6;
      j["timeout_us"] = c.timeout_s * 1e6;
      j["max_iterations"] = c.solver.max_iterations;
      j["out"] = "fixes.csv";
      break;
    }
    case Section::NlosGen: {
      const nlos::SyntheticCirParams p;
      j["n_per_class"] = p.n_per_class;
      j["tap_count"] = p.tap_count;
      j["los_k_db"] = p.los_k_db;
      j["los_delay_spread"] = p.los_delay_spread;
      j["nlos_spread_ratio"] = p.nlos_spread_ratio;
      j["estimation_snr_db"] = p.estimation_snr_db;
      j["out"] = "cirs.bin";
      break;
    }
    case Section::NlosEval: {
      const nlos::EvalOptions o;
      j["data"] = "cirs.bin";
      j["subsets"] = "s1,s2,s3,s4";
      j["train_fraction"] = o.train_fraction;
      j["n_trees"] = o.forest.n_trees;
      j["max_depth"] = o.forest.max_depth;
      j["min_leaf"] = o.forest.min_leaf;
      j["bootstrap"] = o.forest.bootstrap;
      j["out"] = "acc.csv";
      break;
    }
  }
  return j;
}

Json parse_toml(const std::string& text, const std::string& origin) {
  Json out = Json::object();
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    TomlLine l(raw, line, origin);
    if (l.at_end_or_comment()) continue;
    const std::string key = l.key();
    l.expect('=');
    Json v = l.value();
    if (!l.at_end_or_comment()) l.fail("unexpected text after value");
    if (out.contains(key)) l.fail("duplicate key '" + key + "'");
    out[key] = std::move(v);
  }
  return out;
}

Json read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const std::string ext = lower(std::filesystem::path(path).extension().string());
  if (ext == ".toml") return parse_toml(text, path);
  if (ext != ".json") throw ConfigError("config file " + path + " must end in .json or .toml");
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return Json::object();
  try {
    Json j = Json::parse(text);
    if (!j.is_object()) throw ConfigError(path + ": top level must be an object");
    return j;
  } catch (const Json::parse_error& e) {
    // nlohmann reports "line L, column C" in its message.
    throw ConfigError(path + ": " + e.what());
  }
}

namespace {

bool same_kind(const Json& a, const Json& b) {
  if (a.is_number()) return b.is_number();
  return a.type() == b.type();
}

std::string kind_name(const Json& a) {
  if (a.is_number()) return "a number";
  if (a.is_string()) return "a string";
  if (a.is_boolean()) return "true or false";
  if (a.is_array()) return "an array";
  return "an object";
}

}  // namespace

Json resolve(Section section, const Json& overrides, const std::string& origin) {
  Json cfg = defaults(section);
  for (const auto& [key, value] : overrides.items()) {
    if (!cfg.contains(key)) {
      throw ConfigError(origin + ": unknown key '" + key + "' for " + to_string(section));
    }
    if (!same_kind(cfg[key], value) && !(key == "anchors" && value.is_string())) {
      throw ConfigError(origin + ": key '" + key + "' expects " + kind_name(cfg[key]) + ", got " +
                        value.dump());
    }
    cfg[key] = value;
  }
  return cfg;
}

Json load_config(const std::string& path, Section section) {
  if (path.empty()) return defaults(section);
  return resolve(section, read_config_file(path), path);
}

std::uint64_t seed_of(const Json& cfg) {
  const std::int64_t v = int_of(cfg, "seed");
  if (v < 0) type_error("seed", "a non-negative integer", at(cfg, "seed"));
  return static_cast<std::uint64_t>(v);
}

mac::Scenario mac_scenario(const Json& cfg) {
  mac::Scenario s;
  s.seed = seed_of(cfg);
  s.n_safety = small_int_of(cfg, "n_safety");
  s.duration = from_s(real_of(cfg, "duration_s"));
  s.safety.period = from_ms(real_of(cfg, "safety_period_ms"));
  s.safety.msi = from_ms(real_of(cfg, "safety_msi_ms"));
  s.safety.burst_bytes = static_cast<std::size_t>(int_of(cfg, "safety_bytes"));
  s.safety.msdu_bytes = static_cast<std::size_t>(int_of(cfg, "safety_msdu_bytes"));
  s.safety.aligned_release = bool_of(cfg, "safety_aligned");
  s.ar.period = from_ms(real_of(cfg, "ar_period_ms"));
  s.ar.msi = from_ms(real_of(cfg, "ar_msi_ms"));
  s.ar.burst_bytes = static_cast<std::size_t>(int_of(cfg, "ar_burst_bytes"));
  s.ar.msdu_bytes = static_cast<std::size_t>(int_of(cfg, "ar_msdu_bytes"));
  s.ar.aligned_release = bool_of(cfg, "ar_aligned");
  s.pcf_cfp_fraction = real_of(cfg, "pcf_cfp_fraction");
  s.edf_txop_limit = from_ms(real_of(cfg, "edf_txop_limit_ms"));
  if (cfg.contains("access")) s.access = mac::parse_access(str_of(cfg, "access"));
  if (cfg.contains("scheduler")) s.scheduler = mac::parse_scheduler(str_of(cfg, "scheduler"));
  return s;
}

mac::PhyParams mac_phy(const Json& cfg) {
  mac::PhyParams p;
  p.slot = from_us(real_of(cfg, "slot_us"));
  p.sifs = from_us(real_of(cfg, "sifs_us"));
  p.difs = from_us(real_of(cfg, "difs_us"));
  p.pifs = from_us(real_of(cfg, "pifs_us"));
  p.data_rate_mbps = real_of(cfg, "data_rate_mbps");
  p.ack = from_us(real_of(cfg, "ack_us"));
  p.beacon_interval = from_ms(real_of(cfg, "beacon_interval_ms"));
  p.frame_overhead = from_us(real_of(cfg, "frame_overhead_us"));
  p.beacon_bytes = static_cast<std::size_t>(int_of(cfg, "beacon_bytes"));
  p.cw_min = small_int_of(cfg, "cw_min");
  p.cw_max = small_int_of(cfg, "cw_max");
  p.retry_limit = small_int_of(cfg, "retry_limit");
  return p;
}

phy::GfdmConfig gfdm_config(const Json& cfg) {
  phy::GfdmConfig g;
  g.K = small_int_of(cfg, "K");
  g.M = small_int_of(cfg, "M");
  const Json& active = at(cfg, "active");
  if (!active.is_array()) type_error("active", "an array of subcarrier indices", active);
  for (const Json& a : active) {
    if (!a.is_number_integer()) type_error("active", "an array of subcarrier indices", active);
    g.active.push_back(a.get<int>());
  }
  g.pulse = phy::parse_pulse(str_of(cfg, "pulse"));
  g.rolloff = real_of(cfg, "rolloff");
  g.cp_len = small_int_of(cfg, "cp_len");
  g.cs_len = small_int_of(cfg, "cs_len");
  g.constellation = phy::parse_constellation(str_of(cfg, "constellation"));
  g.receiver = phy::parse_receiver(str_of(cfg, "receiver"));
  g.window_len = small_int_of(cfg, "window_len");
  g.validate();
  return g;
}

phy::ChannelModel phy_channel(const Json& cfg) {
  const std::string kind = lower(str_of(cfg, "channel"));
  phy::ChannelModel ch;
  if (kind == "awgn") {
    ch.kind = phy::ChannelKind::AWGN;
  } else if (kind == "multipath") {
    ch.kind = phy::ChannelKind::Multipath;
    ch.taps.clear();
    const Json& taps = at(cfg, "taps");
    if (!taps.is_array() || taps.empty()) type_error("taps", "a non-empty array", taps);
    for (const Json& t : taps) {
      if (t.is_number()) {
        ch.taps.emplace_back(t.get<double>(), 0.0);
      } else if (t.is_array() && t.size() == 2 && t[0].is_number() && t[1].is_number()) {
        ch.taps.emplace_back(t[0].get<double>(), t[1].get<double>());
      } else {
        type_error("taps", "numbers or [re, im] pairs", taps);
      }
    }
  } else if (kind == "ideal") {
    ch.kind = phy::ChannelKind::Ideal;
  } else {
    throw ConfigError("key 'channel': expected awgn, multipath or ideal, got \"" + kind + "\"");
  }
  ch.cfo = real_of(cfg, "cfo");
  return ch;
}

phy::BerOptions ber_options(const Json& cfg) {
  phy::BerOptions o;
  o.genie_sync = bool_of(cfg, "genie_sync");
  o.genie_channel = bool_of(cfg, "genie_channel");
  return o;
}

loc::ServerConfig loc_server(const Json& cfg) {
  loc::ServerConfig c;
  c.noise.sigma_d = real_of(cfg, "sigma_d");
  c.noise.bias = real_of(cfg, "bias");
  c.processing_delay_s = real_of(cfg, "processing_delay_us") * 1e-6;
  c.frame_airtime_s = real_of(cfg, "frame_airtime_us") * 1e-6;
  c.timeout_s = real_of(cfg, "timeout_us") * 1e-6;
  c.solver.max_iterations = small_int_of(cfg, "max_iterations");
  c.noise.validate();
  return c;
}

nlos::SyntheticCirParams nlos_params(const Json& cfg) {
  nlos::SyntheticCirParams p;
  p.seed = seed_of(cfg);
  p.n_per_class = small_int_of(cfg, "n_per_class");
  p.tap_count = small_int_of(cfg, "tap_count");
  p.los_k_db = real_of(cfg, "los_k_db");
  p.los_delay_spread = real_of(cfg, "los_delay_spread");
  p.nlos_spread_ratio = real_of(cfg, "nlos_spread_ratio");
  p.estimation_snr_db = real_of(cfg, "estimation_snr_db");
  p.validate();
  return p;
}

nlos::EvalOptions nlos_eval_options(const Json& cfg) {
  nlos::EvalOptions o;
  o.train_fraction = real_of(cfg, "train_fraction");
  o.forest.n_trees = small_int_of(cfg, "n_trees");
  o.forest.max_depth = small_int_of(cfg, "max_depth");
  o.forest.min_leaf = small_int_of(cfg, "min_leaf");
  o.forest.bootstrap = bool_of(cfg, "bootstrap");
  o.forest.validate();
  return o;
}

std::vector<double> parse_real_range(const std::string& text) {
  auto number = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != t.size() || !std::isfinite(v)) {
      throw std::invalid_argument("malformed range '" + text + "' (expected A..B[:step])");
    }
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {number(text)};
  const double first = number(text.substr(0, dots));
  const std::string rest = text.substr(dots + 2);
  const auto colon = rest.find(':');
  const double last = number(rest.substr(0, colon));
  const double step = colon == std::string::npos ? 1.0 : number(rest.substr(colon + 1));
  if (!(step > 0.0)) throw std::invalid_argument("range step must be positive in '" + text + "'");
  if (last < first) throw std::invalid_argument("range end precedes its start in '" + text + "'");
  std::vector<double> out;
  for (long long i = 0;; ++i) {
    const double v = first + static_cast<double>(i) * step;
    if (v > last + 1e-9 * std::max(1.0, std::abs(last))) break;
    out.push_back(v);
  }
  return out;
}

std::vector<loc::Anchor> anchors_from(const Json& value, const std::string& base_dir) {
  Json arr = value;
  if (value.is_string()) {
    std::filesystem::path p(value.get<std::string>());
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot open anchors file " + p.string());
    try {
      arr = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError(p.string() + ": " + e.what());
    }
  }
  if (!arr.is_array()) throw ConfigError("anchors: expected an array of {id, x, y, z}");
  std::vector<loc::Anchor> out;
  for (const Json& a : arr) {
    if (!a.is_object()) throw ConfigError("anchors: expected an array of {id, x, y, z}");
    loc::Anchor anchor;
    anchor.id = small_int_of(a, "id");
    anchor.position = loc::Vec3(real_of(a, "x"), real_of(a, "y"), real_of(a, "z"));
    out.push_back(anchor);
  }
  return out;
}

std::vector<loc::Vec3> path_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open path file " + path);
  Json arr;
  try {
    arr = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!arr.is_array() || arr.empty()) throw ConfigError(path + ": expected a non-empty array of {x, y, z}");
  std::vector<loc::Vec3> out;
  for (const Json& p : arr) {
    if (!p.is_object()) throw ConfigError(path + ": expected a non-empty array of {x, y, z}");
    out.emplace_back(real_of(p, "x"), real_of(p, "y"), real_of(p, "z"));
  }
  return out;
}

}  // namespace iwsim::cli
