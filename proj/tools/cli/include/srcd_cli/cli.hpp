#pragma once

#include <string>
#include <vector>

#include "srcd_cli/json_out.hpp"

namespace srcd::cli {

// Exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerification = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInternal = 3;

struct RunResult {
  int exit_code = kExitOk;
  std::string out;  // rendered report (empty when written to --out)
  std::string err;  // diagnostics
  Json report;      // null on errors before a report exists
};

// args excludes the program name, e.g. {"verify", "--example", "heisenberg"}.
RunResult run(const std::vector<std::string>& args);

// Extracts report["constants"] rendered canonically.
std::string constants_block(const Json& report);

}  // namespace srcd::cli
