#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pegp/gp/posterior.hpp"
#include "pegp/gp/posterior_bank.hpp"
#include "pegp/policies/confidence.hpp"

namespace pegp::policies {

using Rng = std::mt19937_64;

/// Posterior mean and standard deviation of every prior at every feasible point.
/// Rows follow prior registration order; columns follow the feasible list.
struct PosteriorTable {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd sd;

  Eigen::Index num_priors() const { return mean.rows(); }
  Eigen::Index num_points() const { return mean.cols(); }
};

PosteriorTable tabulate(std::span<const gp::PosteriorModel> models, std::span<const gp::SpaceTimePoint> feasible);
PosteriorTable tabulate(const gp::PosteriorBank& bank, std::span<const gp::SpaceTimePoint> feasible);

/// beta_t^p for every prior.
Eigen::VectorXd betas_at(const ConfidenceSchedule& schedule, int t);

/// UCB^p(x) = mean + beta^p * sd, one row per prior.
inline Eigen::MatrixXd ucb_matrix(const PosteriorTable& table, const Eigen::VectorXd& betas) {
  return table.mean + betas.asDiagonal() * table.sd;
}

/// A chosen (point, prior) pair together with the quantities the ledgers need.
struct Selection {
  Eigen::Index point = 0;
  int prior = -1;  // -1 when no prior is involved (random search)
  double ucb = 0.0;
  double mean = 0.0;
  double sigma = 0.0;
  double beta = 0.0;
};

/// Argmax of UCB over one prior's row; ties go to the lowest point index.
Selection ucb_select(const PosteriorTable& table, const Eigen::VectorXd& betas, int prior);

/// Argmax over feasible x surviving priors; ties go to (lowest prior, lowest point).
Selection joint_ucb_select(const PosteriorTable& table, const Eigen::VectorXd& betas, const std::vector<bool>& alive);

Selection mle_select(const Eigen::VectorXd& log_evidence, bool have_data, const PosteriorTable& table,
                     const Eigen::VectorXd& betas, Rng& rng);

/// P(p | D) from log evidence and a hyperprior (uniform when empty), via log-sum-exp.
Eigen::VectorXd posterior_weights(const Eigen::VectorXd& log_evidence, const Eigen::VectorXd& hyperprior = {});

/// Argmax of the evidence-weighted UCB average. `prior` in the result is the
/// highest-weight prior, reported for selection histograms.
Selection fully_bayesian_select(const Eigen::VectorXd& log_evidence, bool have_data, const Eigen::VectorXd& hyperprior,
                                const PosteriorTable& table, const Eigen::VectorXd& betas);

Eigen::Index random_search_select(Eigen::Index num_feasible, Rng& rng);

}  // namespace pegp::policies
