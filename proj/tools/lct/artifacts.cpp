#include "artifacts.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "json.hpp"

namespace lct::cli {

namespace {

std::string utc_stamp(const char* fmt) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, fmt, &tm);
  return buf;
}

}  // namespace

std::string hex_hash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::filesystem::path output_root(const ToolkitConfig& cfg) {
  if (const char* env = std::getenv("LCT_OUT"); env && *env) return env;
  return cfg.out_dir;
}

std::filesystem::path open_run_dir(const std::filesystem::path& root, const std::string& command,
                                   const FlatConfig& flat) {
  const std::string base =
      command + "-" + utc_stamp("%Y%m%d-%H%M%S") + "-" + hex_hash(config_hash(flat)).substr(0, 8);
  std::filesystem::path dir = root / base;
  for (int k = 1; std::filesystem::exists(dir); ++k) dir = root / (base + "-" + std::to_string(k));
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "config.ini") << to_ini(with_defaults(flat));
  return dir;
}

void write_metadata(const std::filesystem::path& dir, const std::string& command, const FlatConfig& flat,
                    const std::string& status) {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = LCT_VERSION;
  j["config_hash"] = hex_hash(config_hash(flat));
  j["written_utc"] = utc_stamp("%Y-%m-%dT%H:%M:%SZ");
  j["status"] = status;
  std::ofstream(dir / "metadata.json") << j.dump(2) << '\n';
}

}  // namespace lct::cli
