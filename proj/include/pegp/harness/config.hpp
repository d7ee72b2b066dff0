#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pegp/env/drift.hpp"
#include "pegp/env/toy.hpp"

namespace pegp::harness {

inline constexpr std::string_view kLibraryVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "PEGP_OUTPUT_DIR";

enum class Algorithm { pe_gp_ucb, mle, fully_bayesian, regret_balancing, random_search, oracle_ucb };

std::string_view algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);
std::vector<Algorithm> all_algorithms();

struct IntelConfig {
  std::string data_path;  // raw lab-data text file
  std::string cache_dir;  // directory of <day>.csv matrices, used when present
  std::string target_day = "2004-03-14";
  std::vector<std::string> history_days;  // defaults to 2004-03-01 .. 2004-03-13
  int interval_minutes = 10;
  std::vector<int> sensors;  // empty: all sensors common to every day
  std::vector<double> forgetting_grid;

  bool operator==(const IntelConfig&) const = default;
};

/// Suspected regret bound R^p(n) = scale * n^exponent for regret balancing.
struct RegretBoundConfig {
  double scale = 1.0;
  double exponent = 1.0;

  bool operator==(const RegretBoundConfig&) const = default;
};

struct ExperimentConfig {
  std::string experiment = "toy";  // toy | intel | custom
  std::vector<std::string> algorithms = {"pe-gp-ucb", "mle", "fully-bayesian", "regret-balancing", "random"};
  std::optional<int> horizon;         // default: problem-specific
  int num_seeds = 30;
  std::uint64_t first_seed = 0;
  double delta = 0.1;
  std::optional<double> noise_std;    // GP noise R; default: problem-specific
  std::string output_dir;
  env::ToySpec toy;
  IntelConfig intel;
  env::DriftSpec custom;
  std::vector<RegretBoundConfig> regret_bounds;  // empty: R^p(n) = n; one entry: shared; else one per prior
  std::vector<double> hyperprior;                // empty: uniform
  bool rescale_kernels = false;
  int jobs = 1;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError describing the first invalid field.
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a of the canonical JSON form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

std::vector<std::string> default_history_days();

}  // namespace pegp::harness
