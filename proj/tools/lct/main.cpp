#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "artifacts.hpp"
#include "commands.hpp"

namespace {

std::string usage_commands() {
  std::string s;
  for (const auto& n : lct::cli::command_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Light-ray and continuation toolkit for the dissipative wave equation"};
  std::string command, config_path, out_dir;
  std::vector<std::string> overrides;
  int jobs = 0;
  app.add_option("command", command, "One of: " + usage_commands())->required();
  app.add_option("-c,--config", config_path, "INI config file (defaults apply when omitted)");
  app.add_option("-s,--set", overrides, "Override a key, e.g. --set grid.nx=65");
  app.add_option("-j,--jobs", jobs, "Parallelism cap for probe solves");
  app.add_option("-o,--out", out_dir, "Output root (LCT_OUT takes precedence)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  lct::cli::FlatConfig flat;
  lct::cli::ToolkitConfig cfg;
  try {
    bool known = false;
    for (const auto& n : lct::cli::command_names()) known = known || n == command;
    if (!known) throw lct::cli::ConfigError("unknown command '" + command + "'; expected " + usage_commands());
    if (!config_path.empty()) flat = lct::cli::load_ini(config_path);
    for (const auto& o : overrides) lct::cli::apply_override(flat, o);
    if (jobs > 0) flat["run.jobs"] = std::to_string(jobs);
    if (!out_dir.empty()) flat["output.dir"] = out_dir;
    flat = lct::cli::with_defaults(std::move(flat));
    cfg = lct::cli::build_config(flat);
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  }

  std::filesystem::path dir;
  try {
    dir = lct::cli::open_run_dir(lct::cli::output_root(cfg), command, flat);
    lct::cli::write_metadata(dir, command, flat, "running");
    const std::string summary = lct::cli::run_command(command, cfg, dir);
    lct::cli::write_metadata(dir, command, flat, "ok");
    std::cout << command << ": " << summary << "\nartifacts: " << dir.string() << '\n';
    return 0;
  } catch (const lct::Rejected& e) {
    if (!dir.empty()) lct::cli::write_metadata(dir, command, flat, "rejected [" + e.stage() + "]");
    std::cerr << "rejected [" << e.stage() << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    if (!dir.empty()) lct::cli::write_metadata(dir, command, flat, std::string("error: ") + e.what());
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
