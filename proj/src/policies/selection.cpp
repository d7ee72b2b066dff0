#include "pegp/policies/selection.hpp"

#include <cmath>
#include <limits>

#include "pegp/errors.hpp"

namespace pegp::policies {

PosteriorTable tabulate(std::span<const gp::PosteriorModel> models, std::span<const gp::SpaceTimePoint> feasible) {
  const auto rows = static_cast<Eigen::Index>(models.size());
  const auto cols = static_cast<Eigen::Index>(feasible.size());
  PosteriorTable out{Eigen::MatrixXd(rows, cols), Eigen::MatrixXd(rows, cols)};
  for (Eigen::Index p = 0; p < rows; ++p) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto pred = models[static_cast<std::size_t>(p)].predict(feasible[static_cast<std::size_t>(j)]);
      out.mean(p, j) = pred.mean;
      out.sd(p, j) = std::sqrt(pred.variance);
    }
  }
  return out;
}

PosteriorTable tabulate(const gp::PosteriorBank& bank, std::span<const gp::SpaceTimePoint> feasible) {
  auto table = bank.predict(feasible);
  return {std::move(table.mean), table.variance.array().sqrt().matrix()};
}

Eigen::VectorXd betas_at(const ConfidenceSchedule& schedule, int t) {
  Eigen::VectorXd out(schedule.num_priors());
  for (Eigen::Index p = 0; p < out.size(); ++p) out(p) = schedule.beta(static_cast<std::size_t>(p), t);
  return out;
}

namespace {

Selection make_selection(const PosteriorTable& table, const Eigen::VectorXd& betas, int prior, Eigen::Index point) {
  const double beta = betas(prior);
  const double mean = table.mean(prior, point);
  const double sd = table.sd(prior, point);
  return {point, prior, mean + beta * sd, mean, sd, beta};
}

void require_shape(const PosteriorTable& table, const Eigen::VectorXd& betas) {
  if (table.num_points() == 0) throw PolicyError("feasible set is empty");
  if (table.num_priors() == 0 || betas.size() != table.num_priors())
    throw PolicyError("beta vector does not match the number of priors");
}

}  // namespace

Selection ucb_select(const PosteriorTable& table, const Eigen::VectorXd& betas, int prior) {
  require_shape(table, betas);
  if (prior < 0 || prior >= table.num_priors()) throw PolicyError("prior index out of range");
  Eigen::Index best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < table.num_points(); ++j) {
    const double v = table.mean(prior, j) + betas(prior) * table.sd(prior, j);
    if (v > best_value) {
      best_value = v;
      best = j;
    }
  }
  return make_selection(table, betas, prior, best);
}

Selection joint_ucb_select(const PosteriorTable& table, const Eigen::VectorXd& betas, const std::vector<bool>& alive) {
  require_shape(table, betas);
  if (alive.size() != static_cast<std::size_t>(table.num_priors())) throw PolicyError("alive mask has wrong size");
  int best_prior = -1;
  Eigen::Index best_point = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int p = 0; p < table.num_priors(); ++p) {
    if (!alive[static_cast<std::size_t>(p)]) continue;
    for (Eigen::Index j = 0; j < table.num_points(); ++j) {
      const double v = table.mean(p, j) + betas(p) * table.sd(p, j);
      if (best_prior < 0 || v > best_value) {
        best_value = v;
        best_prior = p;
        best_point = j;
      }
    }
  }
  if (best_prior < 0) throw PolicyError("no surviving prior to select from");
  return make_selection(table, betas, best_prior, best_point);
}

Selection mle_select(const Eigen::VectorXd& log_evidence, bool have_data, const PosteriorTable& table,
                     const Eigen::VectorXd& betas, Rng& rng) {
  require_shape(table, betas);
  int prior = 0;
  if (!have_data) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(table.num_priors()) - 1);
    prior = pick(rng);
  } else {
    if (log_evidence.size() != table.num_priors()) throw PolicyError("evidence vector has wrong size");
    for (int p = 1; p < log_evidence.size(); ++p)
      if (log_evidence(p) > log_evidence(prior)) prior = p;
  }
  return ucb_select(table, betas, prior);
}

Eigen::VectorXd posterior_weights(const Eigen::VectorXd& log_evidence, const Eigen::VectorXd& hyperprior) {
  const Eigen::Index n = log_evidence.size();
  if (n == 0) throw PolicyError("no priors to weight");
  Eigen::VectorXd log_w = log_evidence;
  if (hyperprior.size() == 0) {
    log_w.array() -= std::log(static_cast<double>(n));
  } else {
    if (hyperprior.size() != n) throw PolicyError("hyperprior has wrong size");
    if ((hyperprior.array() < 0.0).any() || !(hyperprior.sum() > 0.0))
      throw PolicyError("hyperprior weights must be non-negative with positive sum");
    log_w.array() += (hyperprior.array() / hyperprior.sum()).log();
  }
  const double top = log_w.maxCoeff();
  if (!std::isfinite(top)) throw PolicyError("posterior weights are not normalizable");
  Eigen::VectorXd w = (log_w.array() - top).exp();
  return w / w.sum();
}

Selection fully_bayesian_select(const Eigen::VectorXd& log_evidence, bool have_data, const Eigen::VectorXd& hyperprior,
                                const PosteriorTable& table, const Eigen::VectorXd& betas) {
  require_shape(table, betas);
  const Eigen::VectorXd evidence = have_data ? log_evidence : Eigen::VectorXd::Zero(table.num_priors());
  if (evidence.size() != table.num_priors()) throw PolicyError("evidence vector has wrong size");
  const Eigen::VectorXd w = posterior_weights(evidence, hyperprior);
  // Summed in prior order so exact ties resolve reproducibly.
  Eigen::RowVectorXd blended = Eigen::RowVectorXd::Zero(table.num_points());
  for (int p = 0; p < w.size(); ++p)
    for (Eigen::Index j = 0; j < blended.size(); ++j)
      blended(j) += w(p) * (table.mean(p, j) + betas(p) * table.sd(p, j));
  Eigen::Index point = 0;
  for (Eigen::Index j = 1; j < blended.size(); ++j)
    if (blended(j) > blended(point)) point = j;
  int top = 0;
  for (int p = 1; p < w.size(); ++p)
    if (w(p) > w(top)) top = p;
  Selection sel = make_selection(table, betas, top, point);
  sel.ucb = blended(point);
  return sel;
}

Eigen::Index random_search_select(Eigen::Index num_feasible, Rng& rng) {
  if (num_feasible < 1) throw PolicyError("feasible set is empty");
  std::uniform_int_distribution<Eigen::Index> pick(0, num_feasible - 1);
  return pick(rng);
}

}  // namespace pegp::policies
