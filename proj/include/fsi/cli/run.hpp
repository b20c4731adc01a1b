#pragma once

#include "fsi/cli/config.hpp"
#include "fsi/cli/report.hpp"

#include <string>

namespace fsi::cli {

inline constexpr const char* tool_version = "1.0.0";

/// Runs one command. Deterministic in (config, command): the thread count
/// and wall-clock never enter the tree unless `include_timings` is set.
Tree run(const RunConfig& config, const std::string& command);

}  // namespace fsi::cli
