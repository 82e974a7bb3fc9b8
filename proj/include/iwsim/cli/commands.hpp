#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "iwsim/cli/config.hpp"

namespace iwsim::cli {

enum ExitCode : int { kExitOk = 0, kExitDomainError = 1, kExitUsage = 2 };

struct RunContext {
  std::string out_dir = ".";
  unsigned threads = 0;  // 0: hardware concurrency
  std::ostream* log = nullptr;
};

/// Runs one resolved section, writes its outputs plus a manifest beside each
/// one, and returns the output paths.
std::vector<std::string> run_section(Section section, const Json& cfg, const RunContext& ctx);

/// Inverse of to_string(Section).
Section parse_section(const std::string& subcommand);

/// Full command line, argv[0] included.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iwsim::cli
