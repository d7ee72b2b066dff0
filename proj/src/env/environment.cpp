#include "pegp/env/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pegp/errors.hpp"

namespace pegp::env {

Environment::Environment(std::vector<Eigen::VectorXd> arm_coords, Eigen::MatrixXd values, int horizon,
                         double noise_std, FeasibleArms feasible, double regret_scale)
    : coords_(std::move(arm_coords)),
      values_(std::move(values)),
      horizon_(horizon),
      noise_std_(noise_std),
      feasible_(std::move(feasible)),
      regret_scale_(regret_scale) {
  if (coords_.empty()) throw ParameterError("environment needs at least one arm");
  if (horizon_ < 1) throw ParameterError("horizon must be >= 1");
  if (values_.rows() != static_cast<Eigen::Index>(coords_.size()))
    throw ParameterError("value table must have one row per arm");
  if (values_.cols() != 1 && values_.cols() < horizon_)
    throw ParameterError("value table must have one column or one per timestep");
  if (!values_.allFinite()) throw ParameterError("value table contains non-finite entries");
  if (!(noise_std_ >= 0.0)) throw ParameterError("noise_std must be non-negative");
  if (!(regret_scale_ > 0.0)) throw ParameterError("regret scale must be positive");
}

void Environment::check_timestep(int t) const {
  if (t < 1 || t > horizon_) throw ContractViolation("timestep " + std::to_string(t) + " outside [1, T]");
}

SpaceTimePoint Environment::point(int arm, int t) const {
  if (arm < 0 || arm >= domain_size()) throw ContractViolation("arm index out of range");
  return {coords_[static_cast<std::size_t>(arm)], t, arm};
}

std::vector<int> Environment::feasible_arms(int t) const {
  check_timestep(t);
  std::vector<int> arms;
  if (feasible_) {
    arms = feasible_(t);
  } else {
    arms.resize(coords_.size());
    std::iota(arms.begin(), arms.end(), 0);
  }
  if (arms.empty()) throw ContractViolation("feasible set at t=" + std::to_string(t) + " is empty");
  return arms;
}

std::vector<SpaceTimePoint> Environment::feasible_set(int t) const {
  std::vector<SpaceTimePoint> out;
  for (int arm : feasible_arms(t)) out.push_back(point(arm, t));
  return out;
}

double Environment::value(int arm, int t) const {
  check_timestep(t);
  if (arm < 0 || arm >= domain_size()) throw ContractViolation("arm index out of range");
  return values_(arm, values_.cols() == 1 ? 0 : t - 1);
}

double Environment::best_value(int t) const {
  double best = -INFINITY;
  for (int arm : feasible_arms(t)) best = std::max(best, value(arm, t));
  return best;
}

StepResult Environment::step(const SpaceTimePoint& x, Rng& noise) const {
  const auto arms = feasible_arms(x.t);
  if (std::find(arms.begin(), arms.end(), x.arm) == arms.end())
    throw ContractViolation("queried arm " + std::to_string(x.arm) + " is not feasible at t=" + std::to_string(x.t));
  StepResult out;
  out.value = value(x.arm, x.t);
  out.y = out.value;
  if (noise_std_ > 0.0) {
    std::normal_distribution<double> eps(0.0, 1.0);
    out.y += noise_std_ * eps(noise);
  }
  out.regret = regret_scale_ * std::max(0.0, best_value(x.t) - out.value);
  return out;
}

}  // namespace pegp::env
