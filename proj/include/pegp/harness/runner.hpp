#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pegp/env/environment.hpp"
#include "pegp/gp/kernel.hpp"
#include "pegp/harness/config.hpp"
#include "pegp/harness/trace.hpp"
#include "pegp/policies/confidence.hpp"

namespace pegp::harness {

/// Everything a cell needs that does not depend on the seed.
struct Problem {
  std::vector<gp::GPPrior> priors;
  std::optional<int> true_prior;
  double model_noise_std = 0.1;
  int horizon = 1;
  std::optional<policies::ContinuousDomain> continuous;
  /// Builds the environment for one seed from its "function" stream.
  std::function<env::Environment(env::Rng& function_rng)> make_environment;
  std::vector<std::string> warnings;
};

/// Builds priors and the environment factory for the configured experiment.
/// Reads the Intel data when that experiment is selected.
Problem prepare_problem(const ExperimentConfig& config);

/// Runs one (algorithm, seed) cell end to end. Module errors propagate.
RunTrace run_cell(const ExperimentConfig& config, const Problem& problem, Algorithm algorithm, std::uint64_t seed);

/// Runs every (algorithm, seed) cell. A failing cell is recorded as a failed
/// trace; other cells are unaffected. Results are ordered by algorithm then
/// seed regardless of `config.jobs`.
std::vector<RunTrace> run_experiment(const ExperimentConfig& config, const Problem& problem);
std::vector<RunTrace> run_experiment(const ExperimentConfig& config);

/// Writes traces to `<dir>/traces/` and the resolved config to `<dir>/config.json`.
void persist(const ExperimentConfig& config, const std::vector<RunTrace>& traces, const std::filesystem::path& dir);

}  // namespace pegp::harness
