#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bifurcation/config.hpp"
#include "bifurcation/csv.hpp"

namespace bifurcation::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitIo = 4;

/// Tool name and version, as written into every output header.
std::string tool_version();

/// Version line followed by the resolved configuration.
HeaderLines output_header(const RunConfig& config);

/// Executes the configured command, writing its CSV files into
/// config.output. Returns the paths written, in order. Warnings go to `log`.
std::vector<std::filesystem::path> run_command(const RunConfig& config, std::ostream& log);

/// Full command-line entry point; maps errors to exit statuses.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bifurcation::cli
