#include "pegp/env/toy.hpp"

#include <cmath>

#include "pegp/errors.hpp"
#include "pegp/gp/factor.hpp"

namespace pegp::env {

namespace {

void validate(const ToySpec& s) {
  if (s.num_hills < 1) throw ParameterError("toy problem needs at least one hill");
  if (!(s.hill_width > 0.0) || !(s.short_height > 0.0) || !(s.tall_height > 0.0))
    throw ParameterError("hill width and heights must be positive");
  if (s.grid_size < 2) throw ParameterError("toy grid needs at least two points");
  if (s.true_prior < 0 || s.true_prior > s.num_hills) throw ParameterError("true prior index out of range");
  if (s.horizon < 1) throw ParameterError("horizon must be >= 1");
}

}  // namespace

std::vector<double> hill_centers(const ToySpec& spec) {
  std::vector<double> out;
  const double spacing = 1.0 / spec.num_hills;
  for (int n = 1; n <= spec.num_hills; ++n) out.push_back(spacing * (n - 0.5));
  return out;
}

double hill_mean(const ToySpec& spec, int tall_index, double x) {
  const auto centers = hill_centers(spec);
  const double w2 = 2.0 * spec.hill_width * spec.hill_width;
  double out = 0.0;
  for (int n = 1; n <= spec.num_hills; ++n) {
    const double h = n == tall_index ? spec.tall_height : spec.short_height;
    const double d = x - centers[static_cast<std::size_t>(n - 1)];
    out = std::max(out, h * std::exp(-d * d / w2));
  }
  return out;
}

std::vector<gp::GPPrior> build_toy_priors(const ToySpec& spec) {
  validate(spec);
  auto kernel = std::make_shared<gp::TimeVaryingRbf<double>>(spec.lengthscale, 0.0);
  std::vector<gp::GPPrior> priors;
  for (int n = 0; n <= spec.num_hills; ++n) {
    gp::GPPrior p;
    p.id = std::to_string(n);
    p.mean = [spec, n](const SpaceTimePoint& z) { return hill_mean(spec, n, z.x(0)); };
    p.kernel = kernel;
    priors.push_back(std::move(p));
  }
  return priors;
}

std::vector<Eigen::VectorXd> toy_grid(const ToySpec& spec) {
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < spec.grid_size; ++i) {
    Eigen::VectorXd x(1);
    x(0) = static_cast<double>(i) / (spec.grid_size - 1);
    out.push_back(std::move(x));
  }
  return out;
}

Eigen::VectorXd sample_toy_function(const gp::GPPrior& prior, std::span<const SpaceTimePoint> grid, Rng& rng) {
  if (grid.empty()) throw ParameterError("sampling grid is empty");
  const auto factor = gp::factorize_with_jitter<double>(prior.kernel->gram(grid), prior.id);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(static_cast<Eigen::Index>(grid.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  Eigen::VectorXd f = factor.lower * z;
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) += prior.mean_at(grid[static_cast<std::size_t>(i)]);
  return f;
}

std::vector<int> toy_feasible_arms(const ToySpec& spec, int t) {
  validate(spec);
  if (t < 1) throw ParameterError("t must be >= 1");
  const auto grid = toy_grid(spec);
  std::vector<int> arms;
  const bool restricted = t % 2 == 0 && spec.true_prior > 0;
  const double center = restricted ? hill_centers(spec)[static_cast<std::size_t>(spec.true_prior - 1)] : 0.0;
  for (int i = 0; i < spec.grid_size; ++i) {
    if (restricted && std::abs(grid[static_cast<std::size_t>(i)](0) - center) <= spec.hill_width) continue;
    arms.push_back(i);
  }
  return arms;
}

std::vector<SpaceTimePoint> toy_feasible_schedule(const ToySpec& spec, int t) {
  const auto grid = toy_grid(spec);
  std::vector<SpaceTimePoint> out;
  for (int arm : toy_feasible_arms(spec, t)) out.emplace_back(grid[static_cast<std::size_t>(arm)], t, arm);
  return out;
}

Environment make_toy_environment(const ToySpec& spec, Rng& function_rng) {
  validate(spec);
  const auto priors = build_toy_priors(spec);
  const auto grid = toy_grid(spec);
  std::vector<SpaceTimePoint> points;
  for (int i = 0; i < spec.grid_size; ++i) points.emplace_back(grid[static_cast<std::size_t>(i)], 1, i);
  Eigen::VectorXd f = sample_toy_function(priors[static_cast<std::size_t>(spec.true_prior)], points, function_rng);
  return Environment(grid, f, spec.horizon, spec.noise_std, [spec](int t) { return toy_feasible_arms(spec, t); });
}

}  // namespace pegp::env
