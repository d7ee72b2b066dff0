#include "pegp/harness/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "pegp/errors.hpp"
#include "pegp/harness/rng.hpp"

namespace pegp::harness {

using nlohmann::json;

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::pe_gp_ucb: return "pe-gp-ucb";
    case Algorithm::mle: return "mle";
    case Algorithm::fully_bayesian: return "fully-bayesian";
    case Algorithm::regret_balancing: return "regret-balancing";
    case Algorithm::random_search: return "random";
    case Algorithm::oracle_ucb: return "oracle-ucb";
  }
  return "unknown";
}

std::vector<Algorithm> all_algorithms() {
  return {Algorithm::pe_gp_ucb,        Algorithm::mle,           Algorithm::fully_bayesian,
          Algorithm::regret_balancing, Algorithm::random_search, Algorithm::oracle_ucb};
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto a : all_algorithms())
    if (algorithm_name(a) == name) return a;
  return std::nullopt;
}

std::vector<std::string> default_history_days() {
  std::vector<std::string> out;
  char buf[16];
  for (int d = 1; d <= 13; ++d) {
    std::snprintf(buf, sizeof buf, "2004-03-%02d", d);
    out.emplace_back(buf);
  }
  return out;
}

void validate(const ExperimentConfig& c) {
  static const std::set<std::string> experiments = {"toy", "intel", "custom"};
  if (!experiments.count(c.experiment)) throw ConfigError("unknown experiment '" + c.experiment + "'");
  if (c.algorithms.empty()) throw ConfigError("no algorithms selected");
  for (const auto& a : c.algorithms)
    if (!parse_algorithm(a)) throw ConfigError("unknown algorithm '" + a + "'");
  if (c.num_seeds < 1) throw ConfigError("num_seeds must be >= 1");
  if (c.horizon && *c.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (c.noise_std && !(*c.noise_std > 0.0)) throw ConfigError("noise_std must be positive");
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  for (const auto& b : c.regret_bounds)
    if (!(b.scale > 0.0)) throw ConfigError("regret bound scale must be positive");
  for (double w : c.hyperprior)
    if (!(w >= 0.0)) throw ConfigError("hyperprior weights must be non-negative");
  if (c.experiment == "intel") {
    if (c.intel.data_path.empty() && c.intel.cache_dir.empty())
      throw ConfigError("intel experiment needs intel.data_path or intel.cache_dir");
    if (c.intel.interval_minutes < 1) throw ConfigError("intel.interval_minutes must be >= 1");
    for (const auto& a : c.algorithms)
      if (a == "oracle-ucb") throw ConfigError("oracle-ucb needs a known true prior; the intel task has none");
  }
  if (c.experiment == "custom" && c.custom.priors.empty()) throw ConfigError("custom experiment needs priors");
}

namespace {

json toy_json(const env::ToySpec& s) {
  return {{"num_hills", s.num_hills},     {"hill_width", s.hill_width}, {"short_height", s.short_height},
          {"tall_height", s.tall_height}, {"grid_size", s.grid_size},   {"lengthscale", s.lengthscale},
          {"noise_std", s.noise_std},     {"horizon", s.horizon},       {"true_prior", s.true_prior}};
}

env::ToySpec toy_from(const json& j) {
  env::ToySpec s;
  s.num_hills = j.value("num_hills", s.num_hills);
  s.hill_width = j.value("hill_width", s.hill_width);
  s.short_height = j.value("short_height", s.short_height);
  s.tall_height = j.value("tall_height", s.tall_height);
  s.grid_size = j.value("grid_size", s.grid_size);
  s.lengthscale = j.value("lengthscale", s.lengthscale);
  s.noise_std = j.value("noise_std", s.noise_std);
  s.horizon = j.value("horizon", s.horizon);
  s.true_prior = j.value("true_prior", s.true_prior);
  return s;
}

json drift_json(const env::DriftSpec& s) {
  json priors = json::array();
  for (const auto& p : s.priors)
    priors.push_back({{"id", p.id},
                      {"mean", p.mean},
                      {"lengthscale", p.lengthscale},
                      {"forgetting", p.forgetting},
                      {"a", p.a},
                      {"b", p.b}});
  return {{"dimension", s.dimension},   {"box_size", s.box_size},   {"grid_per_dim", s.grid_per_dim},
          {"horizon", s.horizon},       {"noise_std", s.noise_std}, {"priors", priors},
          {"true_prior", s.true_prior}};
}

env::DriftSpec drift_from(const json& j) {
  env::DriftSpec s;
  s.dimension = j.value("dimension", s.dimension);
  s.box_size = j.value("box_size", s.box_size);
  s.grid_per_dim = j.value("grid_per_dim", s.grid_per_dim);
  s.horizon = j.value("horizon", s.horizon);
  s.noise_std = j.value("noise_std", s.noise_std);
  s.true_prior = j.value("true_prior", s.true_prior);
  if (j.contains("priors")) {
    for (const auto& pj : j.at("priors")) {
      env::DriftPrior p;
      p.id = pj.at("id").get<std::string>();
      p.mean = pj.value("mean", p.mean);
      p.lengthscale = pj.value("lengthscale", p.lengthscale);
      p.forgetting = pj.value("forgetting", p.forgetting);
      p.a = pj.value("a", p.a);
      p.b = pj.value("b", p.b);
      s.priors.push_back(std::move(p));
    }
  }
  return s;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  json bounds = json::array();
  for (const auto& b : c.regret_bounds) bounds.push_back({{"scale", b.scale}, {"exponent", b.exponent}});
  json j = {{"experiment", c.experiment},
            {"algorithms", c.algorithms},
            {"num_seeds", c.num_seeds},
            {"first_seed", c.first_seed},
            {"delta", c.delta},
            {"output_dir", c.output_dir},
            {"toy", toy_json(c.toy)},
            {"intel",
             {{"data_path", c.intel.data_path},
              {"cache_dir", c.intel.cache_dir},
              {"target_day", c.intel.target_day},
              {"history_days", c.intel.history_days},
              {"interval_minutes", c.intel.interval_minutes},
              {"sensors", c.intel.sensors},
              {"forgetting_grid", c.intel.forgetting_grid}}},
            {"custom", drift_json(c.custom)},
            {"regret_bounds", bounds},
            {"hyperprior", c.hyperprior},
            {"rescale_kernels", c.rescale_kernels},
            {"jobs", c.jobs}};
  j["horizon"] = c.horizon ? json(*c.horizon) : json(nullptr);
  j["noise_std"] = c.noise_std ? json(*c.noise_std) : json(nullptr);
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    c.experiment = j.value("experiment", c.experiment);
    if (j.contains("algorithms")) c.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    if (j.contains("horizon") && !j.at("horizon").is_null()) c.horizon = j.at("horizon").get<int>();
    c.num_seeds = j.value("num_seeds", c.num_seeds);
    c.first_seed = j.value("first_seed", c.first_seed);
    c.delta = j.value("delta", c.delta);
    if (j.contains("noise_std") && !j.at("noise_std").is_null()) c.noise_std = j.at("noise_std").get<double>();
    c.output_dir = j.value("output_dir", c.output_dir);
    if (j.contains("toy")) c.toy = toy_from(j.at("toy"));
    if (j.contains("intel")) {
      const auto& ij = j.at("intel");
      c.intel.data_path = ij.value("data_path", c.intel.data_path);
      c.intel.cache_dir = ij.value("cache_dir", c.intel.cache_dir);
      c.intel.target_day = ij.value("target_day", c.intel.target_day);
      c.intel.history_days = ij.value("history_days", c.intel.history_days);
      c.intel.interval_minutes = ij.value("interval_minutes", c.intel.interval_minutes);
      c.intel.sensors = ij.value("sensors", c.intel.sensors);
      c.intel.forgetting_grid = ij.value("forgetting_grid", c.intel.forgetting_grid);
    }
    if (j.contains("custom")) c.custom = drift_from(j.at("custom"));
    if (j.contains("regret_bounds"))
      for (const auto& bj : j.at("regret_bounds"))
        c.regret_bounds.push_back({bj.value("scale", 1.0), bj.value("exponent", 1.0)});
    c.hyperprior = j.value("hyperprior", c.hyperprior);
    c.rescale_kernels = j.value("rescale_kernels", c.rescale_kernels);
    c.jobs = j.value("jobs", c.jobs);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config", path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON (" + path.string() + "): " + e.what());
  }
  auto c = config_from_json(j);
  validate(c);
  return c;
}

std::string config_hash(const ExperimentConfig& config) {
  json j = to_json(config);
  // Output location and parallelism never change results.
  j.erase("output_dir");
  j.erase("jobs");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

}  // namespace pegp::harness
