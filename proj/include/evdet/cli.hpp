#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evdet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;

/// Environment variable naming a default config file.
inline constexpr const char* kConfigEnv = "EVDET_CONFIG";

/// Entry point shared by the `evdet` binary and the tests. `args` excludes
/// the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evdet::cli
