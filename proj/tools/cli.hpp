#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdmp/bounds.hpp"
#include "pdmp/model.hpp"

namespace pdmp::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

struct Budgets {
  int samples = 125000;
  int burn_in = 1000;
  int replicas = 8;
  int mark_grid = 1024;
  std::size_t grid_size = 2000;
  double x_max = 8.0;
  int t_nodes = 64;
  int theta_nodes = 64;
  std::size_t lp_cap = 2000;
  int audit_samples = 10000;
  int g_draws = 1;
  int rate_steps = 40;
  int chain_steps = 1000;
  double tolerance = 1e-3;
  double continuity_threshold = 0.05;
  unsigned threads = 0;
};

/// Everything a run depends on.
struct RunConfig {
  ModelSpec model;
  std::string model_name;
  std::optional<double> lambda;
  std::optional<double> lambda_bar;
  std::vector<double> lambdas;
  Backend backend = Backend::kMonteCarlo;
  Budgets budgets;
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";
};

/// Parses a JSON config document. Throws ConfigError on malformed input.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Reads a particle CSV with header `replica,index,<state columns>,weight`.
/// Throws ConfigError on malformed content.
EmpiricalMeasure read_particles(const std::filesystem::path& path);

/// Writes `replica,index,x...,weight` rows; particles are split evenly into `replicas` blocks.
void write_particles(std::ostream& out, const EmpiricalMeasure& m, int replicas);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pdmp::cli
