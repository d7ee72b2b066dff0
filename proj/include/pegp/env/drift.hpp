#pragma once

#include <string>
#include <vector>

#include "pegp/env/environment.hpp"
#include "pegp/gp/kernel.hpp"
#include "pegp/policies/confidence.hpp"

namespace pegp::env {

/// One candidate prior of the drifting problem: constant mean, time-varying RBF kernel.
struct DriftPrior {
  std::string id;
  double mean = 0.0;
  double lengthscale = 0.1;
  double forgetting = 0.0;
  double a = 1.0;
  double b = 1.0;

  bool operator==(const DriftPrior&) const = default;
};

/// Box-domain problem [0, r]^d evaluated on a fixed grid whose objective
/// evolves through time according to the true prior's temporal kernel.
struct DriftSpec {
  int dimension = 1;
  double box_size = 1.0;
  int grid_per_dim = 25;
  int horizon = 100;
  double noise_std = 0.1;
  std::vector<DriftPrior> priors;
  int true_prior = 0;

  bool operator==(const DriftSpec&) const = default;
};

/// Tensor grid with grid_per_dim points per axis, first axis varying fastest.
std::vector<Eigen::VectorXd> drift_grid(const DriftSpec& spec);

std::vector<gp::GPPrior> build_drift_priors(const DriftSpec& spec);

policies::ContinuousDomain drift_domain(const DriftSpec& spec);

/// Draws f(., t) for t = 1..T as an AR(1) chain in time: with rho = sqrt(1 - eps),
/// g_t = rho g_{t-1} + sqrt(1 - rho^2) L z_t, so Cov(g_t, g_s) = K (1 - eps)^{|t-s|/2}.
Environment make_drift_environment(const DriftSpec& spec, Rng& function_rng);

}  // namespace pegp::env
