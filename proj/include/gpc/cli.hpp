#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace gpc {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitSchema = 2,
  kExitAssumption = 3,
  kExitViolated = 4,
  kExitIo = 5,
};

inline const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v{"simulate",      "metrics",        "verify-cutnorm",
                                          "verify-gram",   "verify-lln",     "verify-concentration",
                                          "bounds",        "validate-config"};
  return v;
}

struct Command {
  std::string verb;
  std::optional<std::string> config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool permissive = false;
  std::optional<unsigned> threads;  // 0: auto
};

/// Environment variable consulted for the worker count when --threads is
/// absent. Precedence: flag, then environment, then config.
inline constexpr const char* kThreadsEnv = "GPC_THREADS";

int dispatch(const Command& cmd, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Usage errors exit with kExitSchema.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gpc
