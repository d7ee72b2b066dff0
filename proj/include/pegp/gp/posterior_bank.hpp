#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "pegp/gp/posterior.hpp"

namespace pegp::gp {

/// Posteriors of several priors over one shared, growing observation log.
///
/// Fast path behind the fit_posterior contract: priors that hold the same
/// kernel object share one Cholesky factor, and each observation extends the
/// factor by one row in O(n^2) instead of refitting. Results agree with
/// fit_posterior up to rounding.
template <typename Scalar>
class BasicPosteriorBank {
 public:
  using Point = BasicSpaceTimePoint<Scalar>;
  using Prior = BasicGPPrior<Scalar>;

  /// Rows follow prior registration order, columns follow the query order.
  struct Table {
    MatrixX<Scalar> mean;
    MatrixX<Scalar> variance;
  };

  BasicPosteriorBank(std::vector<Prior> priors, Scalar noise_std) : priors_(std::move(priors)), log_(noise_std) {
    if (priors_.empty()) throw ParameterError("posterior bank needs at least one prior");
    for (std::size_t p = 0; p < priors_.size(); ++p) {
      if (!priors_[p].kernel) throw ParameterError("prior '" + priors_[p].id + "' has no kernel");
      std::size_t g = 0;
      while (g < groups_.size() && groups_[g].kernel != priors_[p].kernel) ++g;
      if (g == groups_.size()) groups_.push_back({priors_[p].kernel, MatrixX<Scalar>(0, 0), Scalar(kInitialJitter), {}});
      groups_[g].members.push_back(p);
      group_of_.push_back(g);
    }
    residual_.assign(priors_.size(), VectorX<Scalar>(0));
    alpha_.assign(priors_.size(), VectorX<Scalar>(0));
  }

  const std::vector<Prior>& priors() const { return priors_; }
  const BasicObservationLog<Scalar>& log() const { return log_; }
  std::size_t size() const { return log_.size(); }

  void observe(const Point& z, Scalar y) {
    log_.append(z, y);
    const auto n = static_cast<Eigen::Index>(log_.size());
    const Scalar noise_var = log_.noise_std() * log_.noise_std();
    for (auto& group : groups_) extend_factor(group, z, noise_var, n);
    for (std::size_t p = 0; p < priors_.size(); ++p) {
      auto& r = residual_[p];
      r.conservativeResize(n);
      r(n - 1) = y - priors_[p].mean_at(z);
      alpha_[p] = cholesky_solve(groups_[group_of_[p]].lower, r);
    }
  }

  Table predict(std::span<const Point> queries) const {
    const auto m = static_cast<Eigen::Index>(queries.size());
    const auto n = static_cast<Eigen::Index>(log_.size());
    Table out{MatrixX<Scalar>(static_cast<Eigen::Index>(priors_.size()), m),
              MatrixX<Scalar>(static_cast<Eigen::Index>(priors_.size()), m)};
    for (std::size_t p = 0; p < priors_.size(); ++p)
      for (Eigen::Index j = 0; j < m; ++j) out.mean(static_cast<Eigen::Index>(p), j) = priors_[p].mean_at(queries[j]);

    for (const auto& group : groups_) {
      VectorX<Scalar> prior_var(m);
      for (Eigen::Index j = 0; j < m; ++j) prior_var(j) = group.kernel->diag(queries[j]);
      VectorX<Scalar> var = prior_var;
      MatrixX<Scalar> cross;
      if (n > 0) {
        cross = group.kernel->gram(log_.points(), queries);  // n x m
        const MatrixX<Scalar> v = group.lower.template triangularView<Eigen::Lower>().solve(cross);
        var -= v.colwise().squaredNorm().transpose();
      }
      for (Eigen::Index j = 0; j < m; ++j) var(j) = std::clamp(var(j), Scalar(0), std::max(prior_var(j), Scalar(0)));
      for (std::size_t p : group.members) {
        const auto row = static_cast<Eigen::Index>(p);
        out.variance.row(row) = var.transpose();
        if (n > 0) out.mean.row(row) += (cross.transpose() * alpha_[p]).transpose();
      }
    }
    return out;
  }

  /// log P(D | prior) for prior `p`.
  Scalar log_marginal_likelihood(std::size_t p) const {
    if (log_.empty()) return Scalar(0);
    const auto& lower = groups_[group_of_[p]].lower;
    const VectorX<Scalar> v = lower.template triangularView<Eigen::Lower>().solve(residual_[p]);
    return Scalar(-0.5) * v.squaredNorm() - lower.diagonal().array().log().sum() -
           Scalar(0.5) * static_cast<Scalar>(log_.size()) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
  }

  VectorX<Scalar> log_evidence() const {
    VectorX<Scalar> out(static_cast<Eigen::Index>(priors_.size()));
    for (std::size_t p = 0; p < priors_.size(); ++p) out(static_cast<Eigen::Index>(p)) = log_marginal_likelihood(p);
    return out;
  }

  /// Reference refit of one prior on the current log.
  BasicPosterior<Scalar> posterior(std::size_t p) const { return fit_posterior(priors_.at(p), log_); }

  std::size_t num_kernel_groups() const { return groups_.size(); }

 private:
  struct Group {
    std::shared_ptr<const BasicKernel<Scalar>> kernel;
    MatrixX<Scalar> lower;
    Scalar jitter;
    std::vector<std::size_t> members;
  };

  void extend_factor(Group& group, const Point& z, Scalar noise_var, Eigen::Index n) {
    const auto& pts = log_.points();
    VectorX<Scalar> k(n - 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i) k(i) = (*group.kernel)(z, pts[static_cast<std::size_t>(i)]);
    const Scalar diag = (*group.kernel)(z, z) + noise_var + group.jitter;
    VectorX<Scalar> row = n > 1 ? VectorX<Scalar>(group.lower.template triangularView<Eigen::Lower>().solve(k))
                                : VectorX<Scalar>(0);
    const Scalar pivot = diag - row.squaredNorm();
    if (pivot > Scalar(0) && std::isfinite(pivot)) {
      group.lower.conservativeResize(n, n);
      group.lower.row(n - 1).head(n - 1) = row.transpose();
      group.lower.col(n - 1).head(n - 1).setZero();
      group.lower(n - 1, n - 1) = std::sqrt(pivot);
      return;
    }
    // Rank-one extension failed: refactor the whole Gram with escalated jitter.
    MatrixX<Scalar> gram = group.kernel->gram(pts);
    gram.diagonal().array() += noise_var;
    auto factor = factorize_with_jitter<Scalar>(gram, priors_[group.members.front()].id, group.jitter * Scalar(kJitterGrowth));
    group.lower = std::move(factor.lower);
    group.jitter = factor.jitter;
  }

  std::vector<Prior> priors_;
  BasicObservationLog<Scalar> log_;
  std::vector<Group> groups_;
  std::vector<std::size_t> group_of_;
  std::vector<VectorX<Scalar>> residual_;
  std::vector<VectorX<Scalar>> alpha_;
};

using PosteriorBank = BasicPosteriorBank<double>;

}  // namespace pegp::gp
