#include <utility>

#include <CLI11.hpp>

#include "hardyspec/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral and blow-up analysis for fractional parabolic equations with Hardy potentials"};
  app.require_subcommand(1);

  hardyspec::CommandOptions options;
  std::string output;
  std::uint64_t seed = 0;
  const std::pair<const char*, const char*> commands[] = {
      {"spectrum", "angular eigenvalues and the OU basis table"},
      {"evolve", "backward Galerkin evolution, frequency trace and limit"},
      {"blowup", "beta coefficients and blow-up profile errors"},
      {"check", "inequality, basis and frequency property suite"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", options.config, "JSON run configuration")->required();
    sub->add_option("--output", output, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "seed for randomized families (overrides seed)");
    sub->add_option("--jobs", options.jobs, "OpenMP threads")->check(CLI::NonNegativeNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hardyspec::kExitValidation;
  }
  auto* sub = app.get_subcommands().front();
  if (sub->count("--output")) options.output = output;
  if (sub->count("--seed")) options.seed = seed;
  return hardyspec::run_command(sub->get_name(), options);
}
