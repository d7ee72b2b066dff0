#pragma once

#include <span>
#include <vector>

#include "pegp/env/environment.hpp"
#include "pegp/gp/kernel.hpp"

namespace pegp::env {

/// Geometry and problem constants of the hilly-mean toy problem.
struct ToySpec {
  int num_hills = 10;
  double hill_width = 0.03;
  double short_height = 0.5;
  double tall_height = 1.5;
  int grid_size = 100;
  double lengthscale = 0.05;
  double noise_std = 0.1;
  int horizon = 200;
  int true_prior = 2;

  bool operator==(const ToySpec&) const = default;
};

/// Hill centers 0.1 (n - 0.5), n = 1..num_hills (scaled to [0, 1]).
std::vector<double> hill_centers(const ToySpec& spec);

/// Upper envelope of Gaussian bumps; hill `tall_index` (1-based) is tall,
/// 0 means all hills are short.
double hill_mean(const ToySpec& spec, int tall_index, double x);

/// num_hills + 1 priors sharing one stationary RBF kernel, prior n having hill n tall.
std::vector<gp::GPPrior> build_toy_priors(const ToySpec& spec);

/// Equispaced grid on [0, 1] including both ends.
std::vector<Eigen::VectorXd> toy_grid(const ToySpec& spec);

/// One draw of f on `grid` from `prior` (independent of t).
Eigen::VectorXd sample_toy_function(const gp::GPPrior& prior, std::span<const SpaceTimePoint> grid, Rng& rng);

/// Full grid on odd t; on even t the grid without points within hill_width of the true tall hill.
std::vector<int> toy_feasible_arms(const ToySpec& spec, int t);
std::vector<SpaceTimePoint> toy_feasible_schedule(const ToySpec& spec, int t);

/// Samples f from the true prior with `function_rng` and wraps it in an Environment.
Environment make_toy_environment(const ToySpec& spec, Rng& function_rng);

}  // namespace pegp::env
