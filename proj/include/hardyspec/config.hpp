#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardyspec/model.hpp"
#include "hardyspec/spherical_spectrum.hpp"

namespace hardyspec {

inline constexpr std::uint64_t kDefaultSeed = 20221210;

struct InitialCoefficient {
  int n = 0;
  int j = 1;
  double value = 0.0;
};

struct EvolutionBlock {
  double t_start = 1.0;
  double t_end = 1e-4;
  double rtol = 1e-10;
  double sample_ratio = 1.01;
  double max_log_step = 0.05;
  std::vector<InitialCoefficient> coefficients;  // empty: seeded random data
  std::optional<std::uint64_t> initial_seed;
  bool spillover = true;  // rerun with n_max + 2 and compare the limits
};

struct RunConfig {
  ModelParams params;
  std::vector<SectorRequest> sectors{{0, 2}, {1, 2}};
  int n_max = 6;
  int j_max = 4;
  int elements = 400;
  int levels = 3;
  std::optional<double> grading;
  int quadrature_order = 64;
  std::optional<PerturbationSpec> pert;
  std::optional<EvolutionBlock> evolution;
  std::vector<double> lambdas;
  std::vector<double> beta_lambdas;  // empty: {0.8, 0.4, 0.2, 0.1} * sqrt(t_start)
  int check_samples = 100;
  std::string output_dir = ".";
  std::uint64_t seed = kDefaultSeed;
  double norm_const_scale = 1.0;  // fault injection for the check suite
};

/// Parses and validates; every failure is reported as a Validation error.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

}  // namespace hardyspec
