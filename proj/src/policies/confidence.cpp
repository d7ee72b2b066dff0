#include "pegp/policies/confidence.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pegp/errors.hpp"

namespace pegp::policies {

namespace {

constexpr double kPiSquared = std::numbers::pi * std::numbers::pi;

void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1), got " + std::to_string(delta));
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(name) + " must be positive");
}

}  // namespace

double beta_finite(int t, int domain_size, int horizon, double delta) {
  require_delta(delta);
  if (t < 1) throw ParameterError("t must be >= 1");
  if (domain_size < 1) throw ParameterError("domain size must be >= 1");
  if (horizon < 1) throw ParameterError("horizon must be >= 1");
  const double td = t;
  const double arg = static_cast<double>(horizon) * domain_size * kPiSquared * td * td / (3.0 * delta);
  return std::sqrt(2.0 * std::log(arg));
}

double beta_continuous(int t, int horizon, double delta, int dimension, double box_size, double a, double b) {
  require_delta(delta);
  if (t < 1) throw ParameterError("t must be >= 1");
  if (horizon < 1) throw ParameterError("horizon must be >= 1");
  if (dimension < 1) throw ParameterError("dimension must be >= 1");
  require_positive(box_size, "box size r");
  require_positive(a, "smoothness constant a");
  require_positive(b, "smoothness constant b");
  const double delta_a = delta / 2.0;
  const double d = dimension;
  const double td = t;
  const double inner = std::log(2.0 * d * a / delta_a);
  if (!(inner > 0.0)) throw ParameterError("log(2 d a / delta_A) must be positive");
  const double grid = static_cast<double>(horizon) * d * td * td * box_size * b * std::sqrt(inner);
  const double value = 2.0 * std::log(kPiSquared * td * td / (3.0 * delta_a)) + 2.0 * d * std::log(grid);
  if (!(value >= 0.0)) throw ParameterError("continuous confidence radius is undefined for these constants");
  return std::sqrt(value);
}

double xi(int t, double noise_std, int num_priors, double delta) {
  require_delta(delta);
  if (t < 1) throw ParameterError("t must be >= 1");
  require_positive(noise_std, "noise_std");
  if (num_priors < 1) throw ParameterError("number of priors must be >= 1");
  const double td = t;
  return 2.0 * noise_std * noise_std * std::log(num_priors * kPiSquared * td * td / (3.0 * delta));
}

ConfidenceSchedule ConfidenceSchedule::finite(double delta, int horizon, int domain_size, double noise_std,
                                              int num_priors) {
  require_delta(delta);
  require_positive(noise_std, "noise_std");
  if (horizon < 1) throw ParameterError("horizon must be >= 1");
  if (domain_size < 1) throw ParameterError("domain size must be >= 1");
  if (num_priors < 1) throw ParameterError("number of priors must be >= 1");
  ConfidenceSchedule s;
  s.delta_ = delta;
  s.horizon_ = horizon;
  s.num_priors_ = num_priors;
  s.noise_std_ = noise_std;
  s.domain_size_ = domain_size;
  return s;
}

ConfidenceSchedule ConfidenceSchedule::continuous(double delta, int horizon, ContinuousDomain domain,
                                                  std::vector<gp::SmoothnessConstants<double>> per_prior,
                                                  double noise_std) {
  require_delta(delta);
  require_positive(noise_std, "noise_std");
  if (horizon < 1) throw ParameterError("horizon must be >= 1");
  if (per_prior.empty()) throw ParameterError("continuous schedule needs smoothness constants for each prior");
  ConfidenceSchedule s;
  s.delta_ = delta;
  s.horizon_ = horizon;
  s.num_priors_ = static_cast<int>(per_prior.size());
  s.noise_std_ = noise_std;
  s.domain_ = domain;
  s.smoothness_ = std::move(per_prior);
  // Validate the constants once up front.
  for (std::size_t p = 0; p < s.smoothness_.size(); ++p) s.beta(p, 1);
  return s;
}

double ConfidenceSchedule::beta(std::size_t prior, int t) const {
  if (domain_size_) return beta_finite(t, *domain_size_, horizon_, delta_);
  const auto& c = smoothness_.at(prior);
  return beta_continuous(t, horizon_, delta_, domain_.dimension, domain_.box_size, c.a, c.b);
}

double ConfidenceSchedule::xi(int t) const { return policies::xi(t, noise_std_, num_priors_, delta_); }

}  // namespace pegp::policies
