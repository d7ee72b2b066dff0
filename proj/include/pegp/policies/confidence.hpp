#pragma once

#include <optional>
#include <vector>

#include "pegp/gp/kernel.hpp"

namespace pegp::policies {

/// sqrt(2 log(T |X| pi^2 t^2 / (3 delta))): confidence radius on a finite domain.
double beta_finite(int t, int domain_size, int horizon, double delta);

/// Continuous-domain radius with delta_A = delta / 2:
/// sqrt(2 log(pi^2 t^2 / (3 delta_A)) + 2 d log(T d t^2 r b sqrt(log(2 d a / delta_A)))).
double beta_continuous(int t, int horizon, double delta, int dimension, double box_size, double a, double b);

/// 2 R^2 log(|U| pi^2 t^2 / (3 delta)): the noise-concentration width used by the elimination test.
double xi(int t, double noise_std, int num_priors, double delta);

struct ContinuousDomain {
  int dimension = 1;
  double box_size = 1.0;
};

/// Per-timestep confidence parameters for a fixed prior set.
class ConfidenceSchedule {
 public:
  static ConfidenceSchedule finite(double delta, int horizon, int domain_size, double noise_std, int num_priors);
  static ConfidenceSchedule continuous(double delta, int horizon, ContinuousDomain domain,
                                       std::vector<gp::SmoothnessConstants<double>> per_prior, double noise_std);

  double beta(std::size_t prior, int t) const;
  double xi(int t) const;

  double delta() const { return delta_; }
  int horizon() const { return horizon_; }
  int num_priors() const { return num_priors_; }
  double noise_std() const { return noise_std_; }
  bool is_finite() const { return domain_size_.has_value(); }
  std::optional<int> domain_size() const { return domain_size_; }

 private:
  ConfidenceSchedule() = default;

  double delta_ = 0.1;
  int horizon_ = 1;
  int num_priors_ = 1;
  double noise_std_ = 1.0;
  std::optional<int> domain_size_;
  ContinuousDomain domain_;
  std::vector<gp::SmoothnessConstants<double>> smoothness_;
};

}  // namespace pegp::policies
