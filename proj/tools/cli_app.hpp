#ifndef WAVEGRASP_TOOLS_CLI_APP_HPP_
#define WAVEGRASP_TOOLS_CLI_APP_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace wavegrasp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// Environment variable holding the log level (trace, debug, info, warn, error, off).
inline constexpr const char* kLogLevelEnv = "WAVEGRASP_LOG_LEVEL";

// Entry point shared by the binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wavegrasp::cli

#endif  // WAVEGRASP_TOOLS_CLI_APP_HPP_
