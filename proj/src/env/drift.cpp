#include "pegp/env/drift.hpp"

#include <cmath>

#include "pegp/errors.hpp"
#include "pegp/gp/factor.hpp"

namespace pegp::env {

namespace {

void validate(const DriftSpec& s) {
  if (s.dimension < 1) throw ParameterError("dimension must be >= 1");
  if (!(s.box_size > 0.0)) throw ParameterError("box size must be positive");
  if (s.grid_per_dim < 1) throw ParameterError("grid density must be >= 1");
  if (s.horizon < 1) throw ParameterError("horizon must be >= 1");
  if (!(s.noise_std > 0.0)) throw ParameterError("noise_std must be positive");
  if (s.priors.empty()) throw ParameterError("drift problem needs at least one prior");
  if (s.true_prior < 0 || s.true_prior >= static_cast<int>(s.priors.size()))
    throw ParameterError("true prior index out of range");
  double cells = 1.0;
  for (int d = 0; d < s.dimension; ++d) cells *= s.grid_per_dim;
  if (cells > 4096) throw ParameterError("evaluation grid larger than 4096 points");
}

}  // namespace

std::vector<Eigen::VectorXd> drift_grid(const DriftSpec& spec) {
  validate(spec);
  int total = 1;
  for (int d = 0; d < spec.dimension; ++d) total *= spec.grid_per_dim;
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(total));
  const double step = spec.grid_per_dim > 1 ? spec.box_size / (spec.grid_per_dim - 1) : 0.0;
  for (int i = 0; i < total; ++i) {
    Eigen::VectorXd x(spec.dimension);
    int rem = i;
    for (int d = 0; d < spec.dimension; ++d) {
      x(d) = spec.grid_per_dim > 1 ? step * (rem % spec.grid_per_dim) : spec.box_size / 2.0;
      rem /= spec.grid_per_dim;
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<gp::GPPrior> build_drift_priors(const DriftSpec& spec) {
  validate(spec);
  std::vector<gp::GPPrior> out;
  for (const auto& p : spec.priors) {
    gp::GPPrior prior;
    prior.id = p.id;
    const double m = p.mean;
    prior.mean = [m](const SpaceTimePoint&) { return m; };
    prior.kernel = std::make_shared<gp::TimeVaryingRbf<double>>(p.lengthscale, p.forgetting);
    prior.smoothness = gp::SmoothnessConstants<double>{p.a, p.b};
    out.push_back(std::move(prior));
  }
  return out;
}

policies::ContinuousDomain drift_domain(const DriftSpec& spec) { return {spec.dimension, spec.box_size}; }

Environment make_drift_environment(const DriftSpec& spec, Rng& function_rng) {
  validate(spec);
  const auto grid = drift_grid(spec);
  const auto& truth = spec.priors[static_cast<std::size_t>(spec.true_prior)];
  const gp::TimeVaryingRbf<double> spatial(truth.lengthscale, 0.0);
  std::vector<SpaceTimePoint> pts;
  for (std::size_t i = 0; i < grid.size(); ++i) pts.emplace_back(grid[i], 1, static_cast<int>(i));
  const auto factor = gp::factorize_with_jitter<double>(spatial.gram(pts), truth.id);

  const auto n = static_cast<Eigen::Index>(grid.size());
  const double rho = std::sqrt(1.0 - truth.forgetting);
  const double innovation = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&] {
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(function_rng);
    return Eigen::VectorXd(factor.lower * z);
  };

  Eigen::MatrixXd values(n, spec.horizon);
  Eigen::VectorXd g = draw();
  values.col(0) = g;
  for (int t = 1; t < spec.horizon; ++t) {
    g = rho * g + innovation * draw();
    values.col(t) = g;
  }
  values.array() += truth.mean;
  return Environment(grid, values, spec.horizon, spec.noise_std);
}

}  // namespace pegp::env
