#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace lct::cli {

/// Names accepted by run_command, in usage order.
const std::vector<std::string>& command_names();

/// Runs one experiment recipe, writing artifacts into `dir`. Returns a one-line summary.
/// Numerical rejections propagate as lct::Rejected.
std::string run_command(const std::string& command, const ToolkitConfig& cfg, const std::filesystem::path& dir);

}  // namespace lct::cli
