#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lct/boundary_ops.hpp"
#include "lct/reconstruct.hpp"

namespace lct::cli {

/// Raised for malformed configs and unknown keys; the CLI maps it to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BumpBlock {
  bool present = false;
  BumpSpec spec;
  RegionId region = RegionId::Q;
};

struct ToolkitConfig {
  GridParams grid;
  BumpBlock background_a, background_b, unknown_a, unknown_b;
  OperatorTag mode = OperatorTag::Lambda;
  LightRaySource source = LightRaySource::Extracted;
  std::vector<double> lambdas{110.0};
  double h = 0.2;                // ≤ 0: λ^{-1/7}
  int omega_count = 4;           // probe dictionary directions
  int y_count = 2;
  int random_bumps = 4;
  int directions = 8;            // light-ray directions
  double dy = 0.1;
  double alpha = 30.0;
  ReconBox box;
  FillBackend backend = FillBackend::Regularized;
  double rho = 1.0;
  int n_cap = 60;
  double reg = 1e-3, reg_grad = 1e-3;
  int max_iter = 400;
  double noise = 0.0;
  Box prior;
  std::vector<double> ladder{1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  std::filesystem::path out_dir = "lct_out";
  bool dump_field = false;
  std::uint64_t seed = 0;
  int jobs = 1;
};

/// Flat "section.key" → value view, the form used for hashing and round-tripping.
using FlatConfig = std::map<std::string, std::string>;

/// Every accepted key with its default, in documentation order.
const std::vector<std::pair<std::string, std::string>>& config_schema();

/// Parses INI text; unknown sections or keys raise ConfigError.
FlatConfig parse_ini(const std::string& text);
FlatConfig load_ini(const std::filesystem::path& path);
/// Applies one "section.key=value" override.
void apply_override(FlatConfig& flat, const std::string& assignment);
/// Fills missing keys with defaults, then converts and validates.
ToolkitConfig build_config(FlatConfig flat);
/// Canonical INI text of the full (defaults included) flat config.
std::string to_ini(const FlatConfig& flat);
FlatConfig with_defaults(FlatConfig flat);
/// FNV-1a over the canonical text.
std::uint64_t config_hash(const FlatConfig& flat);

}  // namespace lct::cli
