#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "iwsim/cli/commands.hpp"
#include "iwsim/cli/config.hpp"
#include "iwsim/cli/manifest.hpp"

namespace fs = std::filesystem;
using namespace iwsim;
using namespace iwsim::cli;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("iwsim_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    const fs::path p = path / name;
    std::ofstream(p) << content;
    return p.string();
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "iwsim");
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config_error(const std::string& path, Section s) {
  try {
    load_config(path, s);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("empty config file gives the defaults") {
  TempDir dir("empty");
  CHECK(load_config(dir.file("a.toml", ""), Section::Mac) == defaults(Section::Mac));
  CHECK(load_config(dir.file("a.json", "{}"), Section::Phy) == defaults(Section::Phy));
}

TEST_CASE("one override changes one field") {
  TempDir dir("override");
  const Json cfg = load_config(dir.file("a.toml", "# tighter safety\nsafety_msi_ms = 24\n"), Section::Mac);
  Json expect = defaults(Section::Mac);
  expect["safety_msi_ms"] = 24;
  CHECK(cfg == expect);
  CHECK(mac_scenario(cfg).safety.msi == std::chrono::milliseconds(24));
}

TEST_CASE("unknown key is named in the error") {
  TempDir dir("unknown");
  const std::string msg = config_error(dir.file("a.toml", "saftey_msi_ms = 24\n"), Section::Mac);
  CHECK(msg.find("saftey_msi_ms") != std::string::npos);
}

TEST_CASE("TOML errors carry line and column") {
  TempDir dir("toml");
  const std::string path = dir.file("bad.toml", "seed = 3\nn_ar = \"5..10\n");
  const std::string msg = config_error(path, Section::Mac);
  CHECK(msg.find(path + ":2:") != std::string::npos);
  CHECK(parse_toml("a = 1\n# c\nb = [1, 2.5, \"x\"]\nc = true\n", "t") ==
        Json::parse(R"({"a": 1, "b": [1, 2.5, "x"], "c": true})"));
  CHECK_THROWS_AS(parse_toml("a = 1\na = 2\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_toml("[table]\n", "t"), ConfigError);
}

TEST_CASE("JSON errors carry the position") {
  TempDir dir("json");
  const std::string msg = config_error(dir.file("bad.json", "{\n  \"seed\": 1,\n  \"access\" \"dcf\"\n}\n"), Section::Mac);
  CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("type mismatches are config errors") {
  TempDir dir("types");
  CHECK_FALSE(config_error(dir.file("a.toml", "safety_msi_ms = \"fast\"\n"), Section::Mac).empty());
}

TEST_CASE("real ranges") {
  CHECK(parse_real_range("0..10:2") == std::vector<double>{0, 2, 4, 6, 8, 10});
  CHECK(parse_real_range("3") == std::vector<double>{3});
  CHECK(parse_real_range("1..2:0.5") == std::vector<double>{1, 1.5, 2});
  CHECK_THROWS(parse_real_range("5..1"));
  CHECK_THROWS(parse_real_range("1..2:0"));
}

TEST_CASE("exit codes") {
  const Result none = run({});
  CHECK(none.code == kExitUsage);
  CHECK_FALSE(none.err.empty());
  CHECK(run({"mac-sim", "--bogus"}).code == kExitUsage);
  CHECK(run({"phy", "ber", "--bits", "-5"}).code == kExitUsage);
  TempDir dir("exit");
  CHECK(run({"--config", dir.file("x.toml", "nope = 1\n"), "mac-sim"}).code == kExitUsage);
  CHECK(run({"--out-dir", dir.path.string(), "mac-sim", "--access", "foo"}).code == kExitDomainError);
  CHECK(run({"--out-dir", dir.path.string(), "nlos", "eval", "--data", "missing.bin"}).code ==
        kExitDomainError);
  const Result version = run({"--version"});
  CHECK(version.code == kExitOk);
  CHECK(version.out.find(kToolkitVersion) != std::string::npos);
}

TEST_CASE("manifest is written and rerun reproduces the output") {
  TempDir dir("rerun");
  const std::string out = dir.path.string();
  REQUIRE(run({"--out-dir", out, "--seed", "7", "mac-sim", "--access", "dcf", "--n-ar", "5..10:5",
               "--duration", "0.5", "--out", "m.csv"})
              .code == kExitOk);
  const fs::path csv = dir.path / "m.csv";
  const fs::path manifest = dir.path / "m.manifest.json";
  REQUIRE(fs::exists(csv));
  REQUIRE(fs::exists(manifest));
  const RunManifest m = read_manifest(manifest.string());
  CHECK(m.subcommand == "mac-sim");
  CHECK(m.seed == 7);
  CHECK(m.config["access"] == "dcf");
  CHECK(m.config["duration_s"] == 0.5);
  const std::string first = slurp(csv);
  fs::remove(csv);
  CHECK(run({"rerun", manifest.string()}).code == kExitOk);
  CHECK(slurp(csv) == first);
}

TEST_CASE("nlos gen then eval through the command line") {
  TempDir dir("nlos");
  const std::string out = dir.path.string();
  const std::string params = dir.file("p.toml", "n_per_class = 150\n");
  REQUIRE(run({"--out-dir", out, "nlos", "gen", "--params", params, "--out", "c.bin"}).code == kExitOk);
  const std::string data = (dir.path / "c.bin").string();
  REQUIRE(run({"--out-dir", out, "--threads", "2", "nlos", "eval", "--data", data, "--subsets", "s1,s4",
               "--out", "a.csv"})
              .code == kExitOk);
  const std::string csv = slurp(dir.path / "a.csv");
  CHECK(csv.find("S1,") != std::string::npos);
  CHECK(csv.find("S4,") != std::string::npos);
  CHECK(csv.find("S2,") == std::string::npos);
}
