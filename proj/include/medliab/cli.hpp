#pragma once

// Command-line front end. Exit codes: 0 success, 1 domain error (infeasible,
// unstable, failed validation checks), 2 usage or configuration error.

#include <iosfwd>
#include <string>
#include <vector>

namespace medliab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the config file used when --config is absent.
inline constexpr const char* kConfigEnv = "MEDLIAB_CONFIG";

/// Runs one command. `args` excludes the program name, e.g. {"solve", "--config", "x.cfg"}.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

[[nodiscard]] std::string version();

}  // namespace medliab::cli
