#include "pegp/harness/runner.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include "pegp/env/drift.hpp"
#include "pegp/env/intel.hpp"
#include "pegp/env/toy.hpp"
#include "pegp/errors.hpp"
#include "pegp/gp/posterior_bank.hpp"
#include "pegp/harness/rng.hpp"
#include "pegp/policies/elimination.hpp"
#include "pegp/policies/selection.hpp"

namespace pegp::harness {

namespace {

std::vector<gp::SpaceTimePoint> at_time(const std::vector<Eigen::VectorXd>& coords) {
  std::vector<gp::SpaceTimePoint> out;
  for (std::size_t i = 0; i < coords.size(); ++i) out.emplace_back(coords[i], 1, static_cast<int>(i));
  return out;
}

std::vector<gp::GPPrior> checked_priors(std::vector<gp::GPPrior> priors, const std::vector<gp::SpaceTimePoint>& sample,
                                        bool rescale) {
  for (auto& p : priors)
    p = gp::check_prior<double>(std::move(p), sample, rescale ? gp::KernelBound::rescale : gp::KernelBound::reject);
  return priors;
}

Problem prepare_toy(const ExperimentConfig& config) {
  env::ToySpec spec = config.toy;
  if (config.horizon) spec.horizon = *config.horizon;
  if (config.noise_std) spec.noise_std = *config.noise_std;
  Problem p;
  p.priors = checked_priors(env::build_toy_priors(spec), at_time(env::toy_grid(spec)), config.rescale_kernels);
  p.true_prior = spec.true_prior;
  p.model_noise_std = spec.noise_std;
  p.horizon = spec.horizon;
  p.make_environment = [spec](env::Rng& rng) { return env::make_toy_environment(spec, rng); };
  return p;
}

Problem prepare_custom(const ExperimentConfig& config) {
  env::DriftSpec spec = config.custom;
  if (config.horizon) spec.horizon = *config.horizon;
  if (config.noise_std) spec.noise_std = *config.noise_std;
  Problem p;
  p.priors = checked_priors(env::build_drift_priors(spec), at_time(env::drift_grid(spec)), config.rescale_kernels);
  p.true_prior = spec.true_prior;
  p.model_noise_std = spec.noise_std;
  p.horizon = spec.horizon;
  p.continuous = env::drift_domain(spec);
  p.make_environment = [spec](env::Rng& rng) { return env::make_drift_environment(spec, rng); };
  return p;
}

std::vector<env::DayMatrix> load_intel_days(const IntelConfig& ic, const std::vector<std::string>& days) {
  std::vector<env::DayMatrix> out;
  if (!ic.cache_dir.empty()) {
    bool all_cached = true;
    for (const auto& d : days) all_cached = all_cached && std::filesystem::exists(std::filesystem::path(ic.cache_dir) / (d + ".csv"));
    if (all_cached) {
      for (const auto& d : days)
        out.push_back(env::read_day_csv(std::filesystem::path(ic.cache_dir) / (d + ".csv"), d, ic.interval_minutes));
      return out;
    }
    if (ic.data_path.empty()) throw IoError("intel cache is incomplete and no data_path is set", ic.cache_dir);
  }
  std::ifstream in(ic.data_path);
  if (!in) throw IoError("cannot open Intel data file", ic.data_path);
  return env::ingest_intel_days(in, days, ic.interval_minutes, ic.sensors);
}

Problem prepare_intel(const ExperimentConfig& config) {
  const auto& ic = config.intel;
  std::vector<std::string> history = ic.history_days.empty() ? default_history_days() : ic.history_days;
  std::vector<std::string> days = history;
  days.push_back(ic.target_day);
  auto matrices = load_intel_days(ic, days);

  Problem p;
  std::vector<int> sensors = env::common_sensors(matrices, &p.warnings);
  if (!ic.sensors.empty()) {
    std::vector<int> filtered;
    for (int s : ic.sensors)
      if (std::find(sensors.begin(), sensors.end(), s) != sensors.end()) filtered.push_back(s);
    sensors = std::move(filtered);
  }
  if (sensors.size() < 2) throw IngestionError("fewer than two sensors are usable across all Intel days");

  std::vector<env::SensorDayModel> models;
  double noise_sum = 0.0;
  for (std::size_t d = 0; d + 1 < matrices.size(); ++d) {
    models.push_back(env::fit_sensor_day(matrices[d], sensors, ic.forgetting_grid));
    noise_sum += models.back().noise_std;
  }
  p.priors = env::build_intel_priors(models);
  p.model_noise_std = config.noise_std ? *config.noise_std : noise_sum / static_cast<double>(models.size());
  const auto target = matrices.back();
  const int intervals = static_cast<int>(target.temperature.rows());
  p.horizon = config.horizon ? std::min(*config.horizon, intervals) : intervals;
  auto environment = std::make_shared<env::Environment>(env::make_intel_environment(target, sensors));
  if (p.horizon < intervals) {
    // Same data, shorter horizon.
    Eigen::MatrixXd values(environment->domain_size(), p.horizon);
    for (int a = 0; a < environment->domain_size(); ++a)
      for (int t = 1; t <= p.horizon; ++t) values(a, t - 1) = environment->value(a, t);
    std::vector<Eigen::VectorXd> arms;
    for (int a = 0; a < environment->domain_size(); ++a) arms.push_back(environment->point(a, 1).x);
    environment = std::make_shared<env::Environment>(arms, values, p.horizon, 0.0, env::Environment::FeasibleArms{},
                                                     environment->regret_scale());
  }
  p.make_environment = [environment](env::Rng&) { return *environment; };
  return p;
}

std::vector<policies::RegretBound> regret_bounds(const ExperimentConfig& config, std::size_t num_priors) {
  if (config.regret_bounds.empty()) return {};
  if (config.regret_bounds.size() != 1 && config.regret_bounds.size() != num_priors)
    throw ConfigError("regret_bounds must have one entry or one per prior");
  std::vector<policies::RegretBound> out;
  for (std::size_t p = 0; p < num_priors; ++p) {
    const auto b = config.regret_bounds.size() == 1 ? config.regret_bounds[0] : config.regret_bounds[p];
    out.push_back([b](int n) { return b.scale * std::pow(static_cast<double>(n), b.exponent); });
  }
  return out;
}

std::string id_or_empty(const std::vector<gp::GPPrior>& priors, int p) {
  return p < 0 ? std::string() : priors[static_cast<std::size_t>(p)].id;
}

}  // namespace

Problem prepare_problem(const ExperimentConfig& config) {
  validate(config);
  if (config.experiment == "toy") return prepare_toy(config);
  if (config.experiment == "custom") return prepare_custom(config);
  return prepare_intel(config);
}

RunTrace run_cell(const ExperimentConfig& config, const Problem& problem, Algorithm algorithm, std::uint64_t seed) {
  RunTrace trace;
  trace.algorithm = std::string(algorithm_name(algorithm));
  trace.seed = seed;

  auto function_rng = make_stream(seed, "function");
  auto noise_rng = make_stream(seed, "noise");
  auto policy_rng = make_stream(seed, "policy");
  const env::Environment environment = problem.make_environment(function_rng);
  const int horizon = std::min(problem.horizon, environment.horizon());

  std::vector<gp::GPPrior> priors = problem.priors;
  if (algorithm == Algorithm::oracle_ucb) {
    if (!problem.true_prior) throw ConfigError("oracle-ucb needs a known true prior");
    priors = {problem.priors[static_cast<std::size_t>(*problem.true_prior)]};
  }
  for (const auto& p : priors) trace.prior_ids.push_back(p.id);
  const int num_priors = static_cast<int>(priors.size());

  const auto schedule = [&] {
    if (!problem.continuous)
      return policies::ConfidenceSchedule::finite(config.delta, horizon, environment.domain_size(),
                                                  problem.model_noise_std, num_priors);
    std::vector<gp::SmoothnessConstants<double>> constants;
    for (const auto& p : priors) constants.push_back(p.smoothness.value_or(gp::SmoothnessConstants<double>{}));
    return policies::ConfidenceSchedule::continuous(config.delta, horizon, *problem.continuous, constants,
                                                    problem.model_noise_std);
  }();

  Eigen::VectorXd hyperprior;
  if (!config.hyperprior.empty()) {
    if (config.hyperprior.size() != priors.size()) throw ConfigError("hyperprior must have one weight per prior");
    hyperprior = Eigen::Map<const Eigen::VectorXd>(config.hyperprior.data(), num_priors);
  }

  std::vector<std::string> ids = trace.prior_ids;
  gp::PosteriorBank bank(priors, problem.model_noise_std);
  policies::PolicyState pe_state(ids);
  policies::RegretBalancingState rb_state(ids, regret_bounds(config, priors.size()));

  double cumulative = 0.0;
  for (int t = 1; t <= horizon; ++t) {
    const auto feasible = environment.feasible_set(t);
    TraceRecord rec;
    rec.t = t;
    policies::Selection sel;
    if (algorithm == Algorithm::random_search) {
      sel.point = policies::random_search_select(static_cast<Eigen::Index>(feasible.size()), policy_rng);
    } else {
      const auto table = policies::tabulate(bank, feasible);
      const Eigen::VectorXd betas = policies::betas_at(schedule, t);
      const bool have_data = bank.size() > 0;
      switch (algorithm) {
        case Algorithm::pe_gp_ucb: sel = policies::pe_gp_ucb_select(pe_state, table, betas); break;
        case Algorithm::oracle_ucb: sel = policies::ucb_select(table, betas, 0); break;
        case Algorithm::mle:
          sel = policies::mle_select(have_data ? bank.log_evidence() : Eigen::VectorXd(), have_data, table, betas,
                                     policy_rng);
          break;
        case Algorithm::fully_bayesian:
          sel = policies::fully_bayesian_select(have_data ? bank.log_evidence() : Eigen::VectorXd(), have_data,
                                                hyperprior, table, betas);
          break;
        case Algorithm::regret_balancing: sel = policies::regret_balancing_select(rb_state, table, betas); break;
        case Algorithm::random_search: break;
      }
    }

    const auto& x = feasible[static_cast<std::size_t>(sel.point)];
    const auto step = environment.step(x, noise_rng);
    cumulative += step.regret;
    rec.arm = x.arm;
    rec.x = x.x(0);
    rec.y = step.y;
    rec.regret = step.regret;
    rec.cum_regret = cumulative;
    rec.prior = id_or_empty(priors, sel.prior);
    if (sel.prior >= 0) {
      rec.eta = step.y - sel.mean;
      rec.beta = sel.beta;
      rec.sigma = sel.sigma;
    }

    if (algorithm == Algorithm::pe_gp_ucb) {
      const auto outcome = policies::pe_gp_ucb_update(pe_state, sel, step.y, t, schedule);
      rec.xi = outcome.xi;
      if (outcome.eliminated) rec.eliminated = id_or_empty(priors, *outcome.eliminated);
      if (outcome.reinstated) rec.reinstated = id_or_empty(priors, *outcome.reinstated);
    } else if (algorithm == Algorithm::regret_balancing) {
      const auto dropped = policies::regret_balancing_update(rb_state, sel, step.y, t, schedule);
      rec.xi = schedule.xi(t);
      for (int p : dropped) rec.eliminated += (rec.eliminated.empty() ? "" : ";") + id_or_empty(priors, p);
    }
    if (algorithm != Algorithm::random_search) bank.observe(x, step.y);
    trace.records.push_back(std::move(rec));
  }
  trace.warnings = pe_state.warnings;
  return trace;
}

std::vector<RunTrace> run_experiment(const ExperimentConfig& config, const Problem& problem) {
  struct Cell {
    Algorithm algorithm;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& name : config.algorithms)
    for (int s = 0; s < config.num_seeds; ++s)
      cells.push_back({*parse_algorithm(name), config.first_seed + static_cast<std::uint64_t>(s)});

  std::vector<RunTrace> out(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        out[i] = run_cell(config, problem, cells[i].algorithm, cells[i].seed);
      } catch (const std::exception& e) {
        RunTrace failed;
        failed.algorithm = std::string(algorithm_name(cells[i].algorithm));
        failed.seed = cells[i].seed;
        failed.ok = false;
        failed.error = e.what();
        out[i] = std::move(failed);
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(cells.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

std::vector<RunTrace> run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, prepare_problem(config));
}

void persist(const ExperimentConfig& config, const std::vector<RunTrace>& traces, const std::filesystem::path& dir) {
  const auto hash = config_hash(config);
  for (const auto& t : traces) write_trace(t, dir / "traces", hash);
  const auto path = dir / "config.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing", path.string());
  out << to_json(config).dump(2) << '\n';
  if (!out) throw IoError("write failed", path.string());
}

}  // namespace pegp::harness
