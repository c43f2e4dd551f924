#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "posmom/errors.hpp"

namespace {

using namespace posmom::cli;

Config assemble(const std::string& file, const std::vector<std::string>& extras) {
  Config config = file.empty() ? Config{} : load_config(file);
  if (const char* dir = std::getenv(kOutputDirVariable)) config.set("output.dir", dir);
  for (const std::string& a : extras) apply_assignment(config, a);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"posmom: positivity-constrained L2 moment method for Boltzmann-BGK"};
  app.require_subcommand(1);

  std::string run_file;
  auto* run_cmd = app.add_subcommand("run", "Run one job. Settings: key=value file, then --key=value overrides");
  run_cmd->add_option("config", run_file, "Configuration file")->check(CLI::ExistingFile);
  run_cmd->allow_extras();

  std::string dir_a;
  std::string dir_b;
  std::string compare_out;
  auto* compare_cmd = app.add_subcommand("compare", "Errors of run A against reference run B");
  compare_cmd->add_option("run_a", dir_a, "Run directory")->required()->check(CLI::ExistingDirectory);
  compare_cmd->add_option("run_b", dir_b, "Reference run directory")->required()->check(CLI::ExistingDirectory);
  compare_cmd->add_option("-o,--output", compare_out, "Directory for errors.csv (default: run_a)");

  std::string sweep_file;
  auto* sweep_cmd = app.add_subcommand("sweep", "One run per point of sweep.M x sweep.nx x sweep.kn");
  sweep_cmd->add_option("config", sweep_file, "Configuration file")->check(CLI::ExistingFile);
  sweep_cmd->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return run(resolve(assemble(run_file, run_cmd->remaining())), std::cerr);
    if (compare_cmd->parsed()) {
      return compare(dir_a, dir_b, compare_out.empty() ? dir_a : compare_out, std::cerr);
    }
    if (sweep_cmd->parsed()) return sweep(assemble(sweep_file, sweep_cmd->remaining()), std::cerr);
  } catch (const posmom::ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolverFailure;
  }
  return kExitUsage;
}
