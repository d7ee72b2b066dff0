#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "pegp/errors.hpp"
#include "pegp/harness/config.hpp"
#include "pegp/harness/report.hpp"
#include "pegp/harness/runner.hpp"
#include "pegp/harness/trace.hpp"

namespace fs = std::filesystem;
using namespace pegp;
using namespace pegp::harness;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pegp_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_toy(int horizon, int seeds) {
  ExperimentConfig c;
  c.horizon = horizon;
  c.num_seeds = seeds;
  return c;
}

RunTrace curve(const std::string& alg, std::uint64_t seed, std::vector<double> regrets,
               std::vector<std::string> priors = {}) {
  RunTrace tr;
  tr.algorithm = alg;
  tr.seed = seed;
  tr.prior_ids = {"a", "b", "c"};
  double cum = 0.0;
  for (std::size_t i = 0; i < regrets.size(); ++i) {
    TraceRecord r;
    r.t = static_cast<int>(i) + 1;
    r.arm = 0;
    r.regret = regrets[i];
    cum += regrets[i];
    r.cum_regret = cum;
    if (i < priors.size()) r.prior = priors[i];
    tr.records.push_back(r);
  }
  return tr;
}

// A problem with hand-built arms: one prior, zero-mean, unit kernel.
Problem tiny_problem(int arms, int horizon) {
  Problem p;
  p.priors = {gp::GPPrior{"only", [](const gp::SpaceTimePoint&) { return 0.0; },
                          std::make_shared<gp::FunctionKernel<double>>(
                              [](const auto& a, const auto& b) { return a.arm == b.arm ? 1.0 : 0.0; }),
                          std::nullopt}};
  p.true_prior = 0;
  p.model_noise_std = 0.1;
  p.horizon = horizon;
  p.make_environment = [arms, horizon](env::Rng&) {
    std::vector<Eigen::VectorXd> coords(static_cast<std::size_t>(arms), Eigen::VectorXd::Zero(1));
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(arms, horizon);
    for (int a = 0; a < arms; ++a) {
      coords[static_cast<std::size_t>(a)](0) = a;
      values.row(a).setConstant(a);
    }
    return env::Environment(coords, values, horizon, 0.0);
  };
  return p;
}

}  // namespace

TEST_CASE("config: JSON round-trip, hashing, validation") {
  ExperimentConfig c;
  c.algorithms = {"pe-gp-ucb", "oracle-ucb"};
  c.horizon = 50;
  c.delta = 0.05;
  c.regret_bounds = {{2.0, 0.5}};
  c.hyperprior = std::vector<double>(11, 1.0);
  const auto back = config_from_json(to_json(c));
  CHECK(back == c);
  CHECK(config_hash(back) == config_hash(c));
  ExperimentConfig other = c;
  other.delta = 0.2;
  CHECK(config_hash(other) != config_hash(c));
  CHECK(config_hash(c).size() == 16);

  const auto bad = [](auto mutate) {
    ExperimentConfig x;
    mutate(x);
    CHECK_THROWS_AS(validate(x), ConfigError);
  };
  bad([](ExperimentConfig& x) { x.delta = 0.0; });
  bad([](ExperimentConfig& x) { x.delta = 1.0; });
  bad([](ExperimentConfig& x) { x.num_seeds = 0; });
  bad([](ExperimentConfig& x) { x.horizon = 0; });
  bad([](ExperimentConfig& x) { x.algorithms = {"ucb-magic"}; });
  bad([](ExperimentConfig& x) { x.experiment = "mars"; });
  bad([](ExperimentConfig& x) { x.jobs = 0; });
  CHECK_NOTHROW(validate(ExperimentConfig{}));

  for (auto a : all_algorithms()) CHECK(parse_algorithm(algorithm_name(a)) == a);
  CHECK_FALSE(parse_algorithm("nope").has_value());

  const auto days = default_history_days();
  REQUIRE(days.size() == 13);
  CHECK(days.front() == "2004-03-01");
  CHECK(days.back() == "2004-03-13");
}

TEST_CASE("runner: a one-arm, one-step run has a single zero-regret record") {
  ExperimentConfig c;
  c.algorithms = {"random"};
  c.num_seeds = 1;
  const auto tr = run_cell(c, tiny_problem(1, 1), Algorithm::random_search, 0);
  REQUIRE(tr.ok);
  REQUIRE(tr.records.size() == 1);
  CHECK(tr.records[0].arm == 0);
  CHECK(tr.records[0].regret == 0.0);
  CHECK(tr.records[0].cum_regret == 0.0);
  CHECK(check_trace(tr).empty());
}

TEST_CASE("runner: identical config and seed give byte-identical traces") {
  auto c = small_toy(25, 2);
  c.algorithms = {"pe-gp-ucb", "mle", "fully-bayesian", "regret-balancing", "random"};
  const auto a = scratch("det_a"), b = scratch("det_b");
  persist(c, run_experiment(c), a);
  c.jobs = 3;  // thread count must not change results
  persist(c, run_experiment(c), b);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a / "traces")) {
    if (e.path().extension() != ".csv") continue;
    ++files;
    CHECK(slurp(e.path()) == slurp(b / "traces" / e.path().filename()));
  }
  CHECK(files == 10);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("runner: a failing cell does not affect the others") {
  ExperimentConfig c;
  c.algorithms = {"pe-gp-ucb", "random"};
  c.num_seeds = 2;
  auto p = tiny_problem(3, 5);
  auto inner = p.make_environment;
  auto calls = std::make_shared<int>(0);
  p.make_environment = [inner, calls](env::Rng& rng) {
    if ((*calls)++ == 1) throw NumericalError("injected", "only");
    return inner(rng);
  };
  const auto traces = run_experiment(c, p);
  REQUIRE(traces.size() == 4);
  CHECK(traces[0].ok);
  CHECK_FALSE(traces[1].ok);
  CHECK(traces[1].algorithm == "pe-gp-ucb");
  CHECK(traces[1].seed == 1);
  CHECK(traces[1].error.find("injected") != std::string::npos);
  CHECK(traces[2].ok);
  CHECK(traces[3].ok);
  // The survivors aggregate normally.
  const auto report = aggregate(traces);
  CHECK(report.find("pe-gp-ucb")->num_seeds == 1);
  CHECK(report.find("random")->num_seeds == 2);
}

TEST_CASE("trace: write/read round-trip and tamper detection") {
  const auto c = small_toy(30, 1);
  const auto problem = prepare_problem(c);
  const auto tr = run_cell(c, problem, Algorithm::pe_gp_ucb, 4);
  REQUIRE(tr.ok);
  CHECK(check_trace(tr).empty());

  const auto dir = scratch("trace");
  write_trace(tr, dir, config_hash(c));
  CHECK(fs::exists(dir / (trace_stem(tr.algorithm, tr.seed) + ".meta.json")));
  const auto back = read_trace(dir / (trace_stem(tr.algorithm, tr.seed) + ".csv"));
  CHECK(back.algorithm == tr.algorithm);
  CHECK(back.seed == tr.seed);
  CHECK(back.prior_ids == tr.prior_ids);
  REQUIRE(back.records.size() == tr.records.size());
  for (std::size_t i = 0; i < tr.records.size(); ++i) {
    CHECK(back.records[i].arm == tr.records[i].arm);
    CHECK(back.records[i].prior == tr.records[i].prior);
    CHECK(back.records[i].y == tr.records[i].y);
    CHECK(back.records[i].cum_regret == tr.records[i].cum_regret);
    CHECK(back.records[i].eliminated == tr.records[i].eliminated);
  }
  CHECK(check_trace(back).empty());

  auto tampered = back;
  tampered.records[5].cum_regret += 1.0;
  CHECK_FALSE(check_trace(tampered).empty());
  auto negative = back;
  negative.records[3].regret = -1.0;
  CHECK_FALSE(check_trace(negative).empty());
  // Claiming an elimination the stored columns do not justify.
  auto phantom = back;
  phantom.records[10].eliminated = phantom.prior_ids[0];
  CHECK_FALSE(check_trace(phantom).empty());
  std::size_t quiet = 1;
  while (quiet < back.records.size() && !back.records[quiet].eliminated.empty()) ++quiet;
  REQUIRE(quiet < back.records.size());
  auto unjustified = back;
  unjustified.records[quiet].eliminated = unjustified.records[quiet].prior;
  CHECK_FALSE(check_trace(unjustified).empty());
  fs::remove_all(dir);
}

TEST_CASE("trace: the true prior's elimination chain is consistent") {
  // Re-derive every elimination from stored columns and confirm p* = "2" survives.
  const auto c = small_toy(60, 4);
  const auto problem = prepare_problem(c);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto tr = run_cell(c, problem, Algorithm::pe_gp_ucb, seed);
    REQUIRE(tr.ok);
    CHECK(check_trace(tr).empty());
    bool alive = true;
    for (const auto& r : tr.records) {
      if (r.eliminated.find('2') != std::string::npos) {
        std::stringstream ss(r.eliminated);
        for (std::string id; std::getline(ss, id, ';');)
          if (id == "2") alive = false;
      }
      std::stringstream rs(r.reinstated);
      for (std::string id; std::getline(rs, id, ';');)
        if (id == "2") alive = true;
    }
    CHECK(alive);
  }
}

TEST_CASE("aggregate: mean, standard error, histogram") {
  SUBCASE("single seed has zero standard error") {
    const auto rep = aggregate({curve("x", 0, {1, 2, 3})});
    const auto* s = rep.find("x");
    REQUIRE(s);
    CHECK(s->mean_cum_regret(2) == 6.0);
    CHECK(s->stderr_cum_regret.isZero());
  }
  SUBCASE("curves c and c + 2 give mean c + 1 and standard error 1") {
    const auto rep = aggregate({curve("x", 0, {1, 1, 1}), curve("x", 1, {3, 1, 1})});
    const auto* s = rep.find("x");
    for (int t = 0; t < 3; ++t) {
      CHECK(s->mean_cum_regret(t) == doctest::Approx(t + 2.0));
      CHECK(s->stderr_cum_regret(t) == doctest::Approx(1.0));
    }
  }
  SUBCASE("mixed horizons are rejected") {
    CHECK_THROWS_AS(aggregate({curve("x", 0, {1, 1}), curve("x", 1, {1, 1, 1})}), AggregationError);
  }
  SUBCASE("selection fractions match an independent recount") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> pick(0, 2);
    const std::vector<std::string> ids{"a", "b", "c"};
    std::vector<RunTrace> traces;
    std::map<std::string, int> counts;
    int total = 0;
    for (int s = 0; s < 7; ++s) {
      std::vector<std::string> chosen;
      for (int t = 0; t < 40; ++t) {
        chosen.push_back(ids[static_cast<std::size_t>(pick(rng))]);
        ++counts[chosen.back()];
        ++total;
      }
      traces.push_back(curve("x", static_cast<std::uint64_t>(s), std::vector<double>(40, 0.5), chosen));
    }
    const auto rep = aggregate(traces);
    const auto* s = rep.find("x");
    REQUIRE(s->selection_fraction.size() == 3);
    double sum = 0.0;
    for (const auto& [id, frac] : s->selection_fraction) {
      CHECK(std::abs(frac - static_cast<double>(counts[id]) / total) <= 1e-12);
      sum += frac;
    }
    CHECK(sum == doctest::Approx(1.0));
  }
}

TEST_CASE("emit: empty report, CSV round-trip, SVG output") {
  const auto dir = scratch("emit");
  const auto files = emit(AggregateReport{}, EmitFormat::csv, dir);
  CHECK(files.size() == 2);
  CHECK(slurp(dir / "regret.csv") == "algorithm,t,mean_cum_regret,stderr\n");
  CHECK(slurp(dir / "histogram.csv") == "algorithm,prior_id,fraction\n");

  const auto rep = aggregate({curve("x", 0, {0.1, 0.2, 0.3}, {"a", "b", "b"}), curve("x", 1, {0.3, 0.2, 1e-17}, {"c", "b", "a"}),
                              curve("y", 0, {1, 2, 3})});
  emit(rep, EmitFormat::csv, dir);
  const auto back = read_report_csv(dir);
  REQUIRE(back.algorithms.size() == 2);
  for (const auto& s : rep.algorithms) {
    const auto* b = back.find(s.algorithm);
    REQUIRE(b);
    CHECK(b->mean_cum_regret == s.mean_cum_regret);
    CHECK(b->stderr_cum_regret == s.stderr_cum_regret);
    CHECK(b->selection_fraction == s.selection_fraction);
  }
  double sum = 0.0;
  for (const auto& [id, f] : back.find("x")->selection_fraction) sum += f;
  CHECK(sum == doctest::Approx(1.0));

  emit(rep, EmitFormat::svg, dir);
  CHECK(slurp(dir / "regret.svg").starts_with("<svg"));
  CHECK(slurp(dir / "histogram.svg").find("</svg>") != std::string::npos);
  fs::remove_all(dir);
}
