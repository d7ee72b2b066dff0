#pragma once

#include <Eigen/Core>

#include <functional>
#include <random>
#include <vector>

#include "pegp/gp/types.hpp"

namespace pegp::env {

using gp::SpaceTimePoint;
using Rng = std::mt19937_64;

struct StepResult {
  double y = 0.0;       // observation handed to the learner
  double value = 0.0;   // f(x_t, t)
  double regret = 0.0;  // best feasible value minus f(x_t, t), in reporting units
};

/// A finite-armed problem whose hidden objective is tabulated per (arm, t).
///
/// `values` has one row per arm and either one column (stationary) or one per
/// timestep. Observations add N(0, R^2) noise when R > 0. Regret is reported
/// as `regret_scale` times the gap in objective units.
class Environment {
 public:
  using FeasibleArms = std::function<std::vector<int>(int t)>;

  Environment(std::vector<Eigen::VectorXd> arm_coords, Eigen::MatrixXd values, int horizon, double noise_std,
              FeasibleArms feasible = {}, double regret_scale = 1.0);

  int horizon() const { return horizon_; }
  int domain_size() const { return static_cast<int>(coords_.size()); }
  double noise_std() const { return noise_std_; }
  double regret_scale() const { return regret_scale_; }

  SpaceTimePoint point(int arm, int t) const;
  std::vector<int> feasible_arms(int t) const;
  std::vector<SpaceTimePoint> feasible_set(int t) const;

  double value(int arm, int t) const;
  double value(const SpaceTimePoint& z) const { return value(z.arm, z.t); }
  double best_value(int t) const;

  /// Queries the objective at a feasible point. Draws exactly one standard
  /// normal from `noise` when R > 0.
  StepResult step(const SpaceTimePoint& x, Rng& noise) const;

 private:
  void check_timestep(int t) const;

  std::vector<Eigen::VectorXd> coords_;
  Eigen::MatrixXd values_;
  int horizon_;
  double noise_std_;
  FeasibleArms feasible_;
  double regret_scale_;
};

}  // namespace pegp::env
