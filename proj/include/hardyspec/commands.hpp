#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "hardyspec/config.hpp"
#include "hardyspec/evolution.hpp"
#include "hardyspec/ou_spectrum.hpp"

namespace hardyspec {

enum ExitCode : int {
  kExitOk = 0,
  kExitPropertyFailure = 1,
  kExitValidation = 2,
  kExitSpectral = 3,
  kExitEvolution = 4,
};

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> output;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
};

/// Loads the config, applies the overrides, runs the subcommand and maps
/// failures to exit codes with a diagnostic on stderr.
int run_command(const std::string& name, const CommandOptions& options);

int cmd_spectrum(const RunConfig& config);
int cmd_evolve(const RunConfig& config);
int cmd_blowup(const RunConfig& config);
/// Returns kExitPropertyFailure when any suite item fails.
int cmd_check(const RunConfig& config);

struct Pipeline {
  std::shared_ptr<const AngularSpectrum> angular;
  std::shared_ptr<const SpectrumTable> table;
};

/// Angular solve plus OU table; n_max_extra enlarges the radial truncation.
Pipeline build_pipeline(const RunConfig& config, int n_max_extra = 0);
/// Initial data from the config (listed coefficients, or seeded normal data).
EvolutionConfig make_evolution_config(const RunConfig& config, const Pipeline& pipeline);

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);
/// 17 significant digits.
std::string format_number(double v);

}  // namespace hardyspec
