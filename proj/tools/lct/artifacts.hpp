#pragma once

#include <filesystem>
#include <string>

#include "config.hpp"

namespace lct::cli {

/// Output root: $LCT_OUT when set, else the configured directory.
std::filesystem::path output_root(const ToolkitConfig& cfg);

/// Creates <root>/<command>-<YYYYmmdd-HHMMSS>-<hash> (suffixed if taken) and writes
/// config.ini with the complete effective configuration.
std::filesystem::path open_run_dir(const std::filesystem::path& root, const std::string& command,
                                   const FlatConfig& flat);

/// metadata.json: command, toolkit version, config hash, UTC start time, status.
void write_metadata(const std::filesystem::path& dir, const std::string& command, const FlatConfig& flat,
                    const std::string& status);

std::string hex_hash(std::uint64_t h);

}  // namespace lct::cli
