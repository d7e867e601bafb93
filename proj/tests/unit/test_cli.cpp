#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "artifacts.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace fs = std::filesystem;
using namespace lct::cli;

namespace {

// Runs the lct binary with a private output root; returns (exit status, run directory).
std::pair<int, fs::path> run_lct(const std::string& args, const std::string& tag) {
  const fs::path root = fs::temp_directory_path() / ("lct_cli_test_" + tag);
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string cmd = "LCT_OUT='" + root.string() + "' '" + LCT_CLI_PATH + "' " + args + " > '" +
                          (root / "stdout.txt").string() + "' 2>&1";
  const int raw = std::system(cmd.c_str());
  const int status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  fs::path dir;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) dir = e.path();
  return {status, dir};
}

int csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  int n = -1;  // header
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

const char* kSmall = "--set grid.nx=17 --set probe.lambda=10 --set probe.h=0.3";

}  // namespace

TEST(Config, DefaultsRoundTripThroughIni) {
  const FlatConfig d = with_defaults({});
  const FlatConfig back = with_defaults(parse_ini(to_ini(d)));
  EXPECT_EQ(back, d);
  EXPECT_EQ(config_hash(back), config_hash(d));
  const ToolkitConfig c = build_config(d);
  EXPECT_EQ(c.grid.nx, 129);
  EXPECT_EQ(c.ladder.size(), 5u);
}

TEST(Config, ParsesSectionsAndOverrides) {
  FlatConfig f = parse_ini("[grid]\nnx = 65\n[probe]\nlambda = 20, 40\nmode = Response\n");
  apply_override(f, "unknown_a.amplitude=0.05");
  const ToolkitConfig c = build_config(with_defaults(f));
  EXPECT_EQ(c.grid.nx, 65);
  ASSERT_EQ(c.lambdas.size(), 2u);
  EXPECT_DOUBLE_EQ(c.lambdas[1], 40.0);
  EXPECT_EQ(c.mode, lct::OperatorTag::Response);
  EXPECT_TRUE(c.unknown_a.present);
  EXPECT_EQ(c.unknown_a.region, lct::RegionId::QrStar);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_ini("[grid]\nnxx = 3\n"), ConfigError);
  EXPECT_THROW(parse_ini("[nowhere]\nx = 1\n"), ConfigError);
  FlatConfig f;
  EXPECT_THROW(apply_override(f, "grid.nx"), ConfigError);
  EXPECT_THROW(apply_override(f, "grid.bogus=1"), ConfigError);
  FlatConfig bad{{"probe.lambda", "1e4"}};
  EXPECT_THROW(build_config(with_defaults(bad)), ConfigError);
  FlatConfig region{{"unknown_a.region", "Elsewhere"}};
  EXPECT_THROW(build_config(with_defaults(region)), ConfigError);
}

TEST(Config, HashTracksContent) {
  const FlatConfig a = with_defaults({});
  FlatConfig b = a;
  b["grid.nx"] = "65";
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(hex_hash(config_hash(a)).size(), 16u);
}

TEST(Cli, CommandTableIsComplete) {
  const auto& n = command_names();
  EXPECT_EQ(n.size(), 10u);
  for (const char* c : {"forward", "dtn-diff", "cloak-demo", "probe-check", "lightray", "slice-check", "continue",
                        "reconstruct-a", "reconstruct-b", "sweep"})
    EXPECT_NE(std::find(n.begin(), n.end(), c), n.end()) << c;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_lct("bogus", "usage1").first, 2);
  EXPECT_EQ(run_lct("forward --set grid.nope=1", "usage2").first, 2);
  EXPECT_EQ(run_lct("", "usage3").first, 2);
}

TEST(Cli, ForwardSmokeWritesArtifacts) {
  const auto [rc, dir] = run_lct(std::string("forward ") + kSmall, "forward");
  ASSERT_EQ(rc, 0);
  ASSERT_FALSE(dir.empty());
  EXPECT_TRUE(fs::exists(dir / "config.ini"));
  EXPECT_TRUE(fs::exists(dir / "metadata.json"));
  EXPECT_EQ(csv_rows(dir / "energy.csv"), 1);
  EXPECT_TRUE(fs::exists(dir / "u_final.bin"));
  std::ifstream meta(dir / "metadata.json");
  std::stringstream ss;
  ss << meta.rdbuf();
  EXPECT_NE(ss.str().find("\"status\": \"ok\""), std::string::npos) << ss.str();
}

TEST(Cli, RejectionExitsOne) {
  const auto [rc, dir] =
      run_lct(std::string("forward ") + kSmall + " --set unknown_a.amplitude=0.1 --set unknown_a.region=Cloak", "reject");
  EXPECT_EQ(rc, 1);
}

TEST(Cli, ContinueWritesOneRowPerWindow) {
  const auto [rc, dir] = run_lct("continue", "continue");
  ASSERT_EQ(rc, 0);
  EXPECT_EQ(csv_rows(dir / "continuation.csv"), 5);  // ⌈5/ρ⌉ windows at ρ = 1
}

TEST(Cli, SweepReportsOneRowPerLadderRung) {
  const auto [rc, dir] = run_lct(
      "sweep --set grid.nx=33 --set probe.lambda=20 --set probe.h=0.3 --set probe.directions=4 --set probe.dy=0.15 "
      "--set probe.omega_count=2 --set probe.y_count=1 --set probe.random_bumps=2 --set prior.x_half=0.36 "
      "--set prior.t0=0.85 --set prior.t1=1.65 --set unknown_a.amplitude=0.5 --set unknown_b.amplitude=5",
      "sweep");
  ASSERT_EQ(rc, 0);
  EXPECT_EQ(csv_rows(dir / "stability.csv"), 5);
  EXPECT_EQ(csv_rows(dir / "fit.csv"), 2);
  EXPECT_TRUE(fs::exists(dir / "plots"));
}
