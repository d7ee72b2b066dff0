// End-to-end acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and
// exits non-zero when any criterion fails. Tolerances and budgets are fixed here.
#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pegp/env/intel.hpp"
#include "pegp/gp.hpp"
#include "pegp/harness/config.hpp"
#include "pegp/harness/report.hpp"
#include "pegp/harness/runner.hpp"
#include "pegp/policies/confidence.hpp"
#include "pegp/policies/elimination.hpp"
#include "pegp/policies/selection.hpp"

using namespace pegp;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and budgets.
constexpr double kPosteriorTol = 1e-8;
constexpr double kPosteriorBudgetS = 10.0;
constexpr double kConcentrationBudgetS = 30.0;
constexpr int kPreservationMinSeeds = 85;
constexpr double kPreservationBudgetS = 15 * 60.0;
constexpr double kOrderingBudgetS = 30 * 60.0;
constexpr double kSignificanceSe = 2.0;
constexpr double kSublinearRatio = 0.5;
constexpr int kBalancingWithin = 50;
constexpr int kBalancingMinSeeds = 90;
constexpr double kSelectionBudgetS = 20.0;
constexpr const char* kIntelDataEnv = "PEGP_INTEL_DATA";

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// --- 1 ---------------------------------------------------------------------

void posterior_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int d = 1 + static_cast<int>(rng() % 3);
    const int n = static_cast<int>(rng() % 21);
    const double l = 0.05 + u(rng), eps = rep % 2 ? 0.5 * u(rng) : 0.0, noise = 0.1 + u(rng);
    const gp::GPPrior prior{"p", [](const gp::SpaceTimePoint& z) { return 0.3 * z.x.sum() - 0.1; },
                            std::make_shared<gp::TimeVaryingRbf<double>>(l, eps), std::nullopt};
    gp::ObservationLog log(noise);
    int t = 0;
    for (int i = 0; i < n; ++i) {
      t += 1 + static_cast<int>(rng() % 2);
      log.append(gp::SpaceTimePoint((Eigen::VectorXd::Random(d).array() + 1.0) / 2.0, t), 2.0 * u(rng) - 1.0);
    }
    const auto post = gp::fit_posterior(prior, log);
    const auto& pts = log.points();
    Eigen::MatrixXd k(n, n);
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) k(i, j) = prior.kernel_at(pts[i], pts[j]);
      r(i) = log.values()[i] - prior.mean_at(pts[i]);
    }
    const Eigen::MatrixXd inv = (k + noise * noise * Eigen::MatrixXd::Identity(n, n)).inverse();
    for (int q = 0; q < 5; ++q) {
      const gp::SpaceTimePoint z((Eigen::VectorXd::Random(d).array() + 1.0) / 2.0, 1 + static_cast<int>(rng() % (t + 2)));
      Eigen::VectorXd kz(n);
      for (int i = 0; i < n; ++i) kz(i) = prior.kernel_at(z, pts[i]);
      const double mean = prior.mean_at(z) + kz.dot(inv * r);
      const double var = std::clamp(prior.kernel_at(z, z) - kz.dot(inv * kz), 0.0, prior.kernel_at(z, z));
      const auto got = post.predict(z);
      worst = std::max({worst, std::abs(got.mean - mean), std::abs(got.variance - var)});
    }
  }
  const double s = seconds_since(start);
  report(1, worst <= kPosteriorTol && s < kPosteriorBudgetS,
         fmt("posterior vs direct inverse, 200 instances: max abs error %.2e (tol %.0e), %.2f s (budget %.0f s)", worst,
             kPosteriorTol, s, kPosteriorBudgetS));
}

// --- 2 ---------------------------------------------------------------------

void noise_concentration() {
  // The union bound splits delta between the confidence and concentration events,
  // so delta_B = 0.05 corresponds to xi computed with delta = 0.1.
  const auto start = Clock::now();
  const double delta_b = 0.05, r = 0.1;
  const int priors = 3, horizon = 100, runs = 400;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise(0.0, r);
  int violated = 0;
  for (int m = 0; m < runs; ++m) {
    std::vector<double> sum(priors, 0.0);
    std::vector<int> count(priors, 0);
    bool bad = false;
    for (int t = 1; t <= horizon && !bad; ++t) {
      const double x = policies::xi(t, r, priors, 2.0 * delta_b);
      // Adversary: feed the next draw to the set closest to its boundary.
      int pick = 0;
      double score = -1.0;
      for (int p = 0; p < priors; ++p) {
        const double s = count[p] ? std::abs(sum[p]) / std::sqrt(x * count[p]) : 0.0;
        if (s > score) score = s, pick = p;
      }
      sum[pick] += noise(rng);
      count[pick] += 1;
      for (int p = 0; p < priors; ++p)
        if (count[p] && std::abs(sum[p]) > std::sqrt(x * count[p])) bad = true;
    }
    violated += bad;
  }
  const double rate = violated / static_cast<double>(runs);
  const double limit = delta_b + 3.0 * std::sqrt(delta_b * (1.0 - delta_b) / runs);
  const double s = seconds_since(start);
  report(2, rate <= limit && s < kConcentrationBudgetS,
         fmt("adversarial noise concentration, M=400: violation rate %.4f (limit %.4f), %.2f s", rate, limit, s));
}

// --- 3-6 -------------------------------------------------------------------

bool true_prior_survives(const harness::RunTrace& tr, const std::string& id) {
  bool alive = true;
  const auto has = [&](const std::string& list) {
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ';');)
      if (item == id) return true;
    return false;
  };
  for (const auto& r : tr.records) {
    if (has(r.eliminated)) alive = false;
    if (has(r.reinstated)) alive = true;
  }
  return alive;
}

void preservation() {
  const auto start = Clock::now();
  harness::ExperimentConfig c;
  c.algorithms = {"pe-gp-ucb"};
  c.num_seeds = 100;
  c.horizon = 200;
  c.delta = 0.1;
  const auto problem = harness::prepare_problem(c);
  const std::string id = problem.priors[static_cast<std::size_t>(*problem.true_prior)].id;
  int kept = 0, ok = 0;
  for (const auto& tr : harness::run_experiment(c, problem)) {
    ok += tr.ok;
    kept += tr.ok && true_prior_survives(tr, id);
  }
  const double s = seconds_since(start);
  report(3, kept >= kPreservationMinSeeds && s < kPreservationBudgetS,
         fmt("toy, 100 seeds, T=200: true prior retained in %d seeds (need >= %d; %d cells ok), %.1f s", kept,
             kPreservationMinSeeds, ok, s));
}

void toy_comparison() {
  const auto start = Clock::now();
  harness::ExperimentConfig c;
  c.num_seeds = 30;
  c.horizon = 200;
  const auto rep = harness::aggregate(harness::run_experiment(c));
  const double s = seconds_since(start);
  const auto* pe = rep.find("pe-gp-ucb");
  const auto* rnd = rep.find("random");
  const auto final = [](const harness::AlgorithmSummary* a) { return a->mean_cum_regret(a->mean_cum_regret.size() - 1); };
  const auto final_se = [](const harness::AlgorithmSummary* a) {
    return a->stderr_cum_regret(a->stderr_cum_regret.size() - 1);
  };

  std::string table;
  bool ordered = true;
  for (const char* name : {"mle", "fully-bayesian", "regret-balancing"}) {
    const auto* a = rep.find(name);
    ordered = ordered && final(pe) < final(a) && final(a) < final(rnd);
    table += fmt(" %s=%.2f", name, final(a));
  }
  const double pooled = std::sqrt(final_se(pe) * final_se(pe) + final_se(rnd) * final_se(rnd));
  const double gap = final(rnd) - final(pe);
  report(4, ordered && gap > kSignificanceSe * pooled && s < kOrderingBudgetS,
         fmt("final regret pe-gp-ucb=%.2f+-%.2f%s random=%.2f+-%.2f; ordering %s; gap %.1f vs %.1f pooled SE x%.0f; %.1f s",
             final(pe), final_se(pe), table.c_str(), final(rnd), final_se(rnd), ordered ? "holds" : "violated", gap,
             pooled, kSignificanceSe, s));

  std::string top;
  double top_frac = -1.0, true_frac = 0.0, runner_up = 0.0;
  for (const auto& [id, f] : pe->selection_fraction) {
    if (id == "2") true_frac = f;
    else runner_up = std::max(runner_up, f);
    if (f > top_frac) top_frac = f, top = id;
  }
  report(5, top == "2" && true_frac > runner_up,
         fmt("pe-gp-ucb selection histogram: prior 2 share %.3f, best other %.3f", true_frac, runner_up));

  const double at20 = pe->mean_cum_regret(19) / 20.0, at200 = final(pe) / 200.0;
  report(6, at200 < kSublinearRatio * at20,
         fmt("pe-gp-ucb mean R_t/t: %.4f at t=200 vs %.4f at t=20 (need < %.1fx)", at200, at20, kSublinearRatio));
}

// --- 7 ---------------------------------------------------------------------

void balancing_parity() {
  // Stationary arms with values (1, 0, 0). Prior "good" centres on the truth;
  // prior "bad" is confident that arm 2 is best (tiny kernel variance), so data
  // barely moves it and its UCB keeps pointing at a zero-value arm.
  const double noise_std = 0.1, delta = 0.1;
  const Eigen::Vector3d truth(1.0, 0.0, 0.0);
  const auto independent_arms = [](double variance) {
    return std::make_shared<gp::FunctionKernel<double>>(
        [variance](const gp::SpaceTimePoint& a, const gp::SpaceTimePoint& b) { return a.arm == b.arm ? variance : 0.0; });
  };
  const auto prior_mean = [](Eigen::Vector3d m) { return [m](const gp::SpaceTimePoint& z) { return m(z.arm); }; };
  const std::vector<gp::GPPrior> priors{{"good", prior_mean({1.0, 0.0, 0.0}), independent_arms(0.25), std::nullopt},
                                        {"bad", prior_mean({0.0, 0.0, 1.0}), independent_arms(1e-4), std::nullopt}};
  const auto schedule = policies::ConfidenceSchedule::finite(delta, kBalancingWithin, 3, noise_std, 2);

  int eliminated = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::normal_distribution<double> noise(0.0, noise_std);
    gp::PosteriorBank bank(priors, noise_std);
    policies::RegretBalancingState state({"good", "bad"});
    bool good_dropped = false;
    for (int t = 1; t <= kBalancingWithin && !state.ledger(1).eliminated; ++t) {
      std::vector<gp::SpaceTimePoint> feasible;
      for (int a = 0; a < 3; ++a) feasible.push_back(gp::SpaceTimePoint::arm_only(a, t));
      const auto sel = policies::regret_balancing_select(state, policies::tabulate(bank, feasible),
                                                         policies::betas_at(schedule, t));
      const double y = truth(sel.point) + noise(rng);
      bank.observe(feasible[static_cast<std::size_t>(sel.point)], y);
      policies::regret_balancing_update(state, sel, y, t, schedule);
      good_dropped = good_dropped || state.ledger(0).eliminated;
    }
    eliminated += state.ledger(1).eliminated && !good_dropped;
  }
  report(7, eliminated >= kBalancingMinSeeds,
         fmt("regret balancing drops the dominated prior within %d steps in %d/100 seeds (need >= %d)",
             kBalancingWithin, eliminated, kBalancingMinSeeds));
}

// --- 8 ---------------------------------------------------------------------

void intel_pipeline(const std::string& fixture) {
  std::ifstream in(fixture);
  bool exact = false;
  std::string detail = "fixture unreadable: " + fixture;
  if (in) {
    const auto day = env::ingest_intel(in, "2004-03-01", 480);
    Eigen::MatrixXd want(3, 3);
    want << 21.0, 18.5, 26.0, 23.0, 19.5, 25.0, 23.0, 20.5, 27.0;
    exact = day.sensors == std::vector<int>{1, 2, 3} && day.dropped == std::vector<int>{4} && day.malformed == 1 &&
            day.temperature == want;
    detail = fmt("fixture interval matrix %s", exact ? "matches exactly" : "differs");
  }

  const char* data = std::getenv(kIntelDataEnv);
  if (!data || !*data) {
    report(8, exact, detail);
    std::printf("[SKIP] criterion 8 (full Intel run): set %s to the raw lab data file to enable\n", kIntelDataEnv);
    return;
  }
  harness::ExperimentConfig c;
  c.experiment = "intel";
  c.intel.data_path = data;
  c.algorithms = {"pe-gp-ucb", "fully-bayesian"};
  c.num_seeds = 5;
  const auto rep = harness::aggregate(harness::run_experiment(c));
  const auto* pe = rep.find("pe-gp-ucb");
  const auto* fb = rep.find("fully-bayesian");
  const Eigen::Index half = pe->mean_cum_regret.size() / 2 - 1;
  const bool early = pe->mean_cum_regret(half) <= fb->mean_cum_regret(half);
  report(8, exact && early,
         detail + fmt("; Intel cumulative regret at T/2: pe-gp-ucb %.3f vs fully-bayesian %.3f", pe->mean_cum_regret(half),
                      fb->mean_cum_regret(half)));
}

// --- 9 ---------------------------------------------------------------------

void selection_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int mismatches = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const int priors = 1 + static_cast<int>(rng() % 3), points = 1 + static_cast<int>(rng() % 5);
    const bool lattice = rep % 2;  // small integer lattice makes ties frequent
    policies::PosteriorTable table{Eigen::MatrixXd(priors, points), Eigen::MatrixXd(priors, points)};
    Eigen::VectorXd beta(priors), evidence(priors);
    for (int p = 0; p < priors; ++p) {
      beta(p) = lattice ? 1.0 : 0.5 + std::abs(u(rng));
      evidence(p) = lattice ? -static_cast<double>(rng() % 2) : 5.0 * u(rng);
      for (int j = 0; j < points; ++j) {
        table.mean(p, j) = lattice ? static_cast<double>(rng() % 2) : u(rng);
        table.sd(p, j) = lattice ? 0.5 * static_cast<double>(rng() % 2) : std::abs(u(rng));
      }
    }
    const auto ucb = [&](int p, int j) { return table.mean(p, j) + beta(p) * table.sd(p, j); };
    const auto first_max = [&](const std::function<double(int)>& f, int n) {
      int best = 0;
      for (int j = 1; j < n; ++j)
        if (f(j) > f(best)) best = j;
      return best;
    };

    // Joint argmax with ties to (lowest prior, lowest point).
    int bp = 0, bj = 0;
    for (int p = 0; p < priors; ++p)
      for (int j = 0; j < points; ++j)
        if (ucb(p, j) > ucb(bp, bj)) bp = p, bj = j;
    policies::PolicyState state(std::vector<std::string>(static_cast<std::size_t>(priors), "p"));
    const auto pe = policies::pe_gp_ucb_select(state, table, beta);
    mismatches += pe.prior != bp || pe.point != bj;

    const int top = first_max([&](int p) { return evidence(p); }, priors);
    policies::Rng unused(0);
    const auto m = policies::mle_select(evidence, true, table, beta, unused);
    mismatches += m.prior != top || m.point != first_max([&](int j) { return ucb(top, j); }, points);

    std::vector<double> w(static_cast<std::size_t>(priors));
    double z = 0.0;
    for (int p = 0; p < priors; ++p) z += w[static_cast<std::size_t>(p)] = std::exp(evidence(p) - evidence.maxCoeff());
    const auto blended = [&](int j) {
      double v = 0.0;
      for (int p = 0; p < priors; ++p) v += w[static_cast<std::size_t>(p)] / z * ucb(p, j);
      return v;
    };
    mismatches += policies::fully_bayesian_select(evidence, true, {}, table, beta).point != first_max(blended, points);
  }
  const double s = seconds_since(start);
  report(9, mismatches == 0 && s < kSelectionBudgetS,
         fmt("selection rules vs enumeration, 500 instances: %d mismatches, %.2f s", mismatches, s));
}

}  // namespace

int main(int argc, char** argv) {
  const std::string fixture = argc > 1 ? argv[1] : PEGP_TEST_DATA "/intel_fixture.txt";
  try {
    posterior_oracle();
    noise_concentration();
    preservation();
    toy_comparison();
    balancing_parity();
    intel_pipeline(fixture);
    selection_equivalence();
  } catch (const std::exception& e) {
    std::printf("[FAIL] aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures ? 1 : 0;
}
