#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "pegp/gp/factor.hpp"
#include "pegp/gp/kernel.hpp"
#include "pegp/gp/observation_log.hpp"

namespace pegp::gp {

template <typename Scalar>
struct Prediction {
  Scalar mean;
  Scalar variance;
};

/// Exact GP posterior under one prior. Immutable once fitted.
template <typename Scalar>
class BasicPosterior {
 public:
  using Point = BasicSpaceTimePoint<Scalar>;
  using Prior = BasicGPPrior<Scalar>;

  const Prior& prior() const { return prior_; }
  const std::vector<Point>& training_points() const { return training_; }
  const MatrixX<Scalar>& factor() const { return factor_.lower; }
  const VectorX<Scalar>& weights() const { return weights_; }
  Scalar jitter() const { return factor_.jitter; }
  Scalar noise_std() const { return noise_std_; }

  /// Mean mu(z) + k(z)^T (K + R^2 I)^{-1} (y - mu(X)) and variance
  /// k(z, z) - k(z)^T (K + R^2 I)^{-1} k(z), clamped to [0, k(z, z)].
  Prediction<Scalar> predict(const Point& query) const {
    const Scalar prior_var = prior_.kernel->diag(query);
    const Scalar prior_mean = prior_.mean_at(query);
    if (training_.empty()) return {prior_mean, std::max(prior_var, Scalar(0))};
    VectorX<Scalar> k(static_cast<Eigen::Index>(training_.size()));
    for (Eigen::Index i = 0; i < k.size(); ++i) k(i) = (*prior_.kernel)(query, training_[static_cast<std::size_t>(i)]);
    const VectorX<Scalar> v = factor_.lower.template triangularView<Eigen::Lower>().solve(k);
    const Scalar var = prior_var - v.squaredNorm();
    return {prior_mean + k.dot(weights_), std::clamp(var, Scalar(0), std::max(prior_var, Scalar(0)))};
  }

  template <typename Scalar2>
  friend BasicPosterior<Scalar2> fit_posterior(const BasicGPPrior<Scalar2>&, const BasicObservationLog<Scalar2>&);

 private:
  Prior prior_;
  std::vector<Point> training_;
  GramFactor<Scalar> factor_;
  VectorX<Scalar> weights_;
  Scalar noise_std_ = 1;
};

using PosteriorModel = BasicPosterior<double>;

/// K + R^2 I over the log's training points, before jitter.
template <typename Scalar>
MatrixX<Scalar> noisy_gram(const BasicGPPrior<Scalar>& prior, const BasicObservationLog<Scalar>& log) {
  MatrixX<Scalar> k = prior.kernel->gram(log.points());
  k.diagonal().array() += log.noise_std() * log.noise_std();
  return k;
}

template <typename Scalar>
VectorX<Scalar> residuals(const BasicGPPrior<Scalar>& prior, const BasicObservationLog<Scalar>& log) {
  VectorX<Scalar> r = log.y();
  for (Eigen::Index i = 0; i < r.size(); ++i) r(i) -= prior.mean_at(log.points()[static_cast<std::size_t>(i)]);
  return r;
}

/// Refits from scratch: O(n^3).
template <typename Scalar>
BasicPosterior<Scalar> fit_posterior(const BasicGPPrior<Scalar>& prior, const BasicObservationLog<Scalar>& log) {
  if (!prior.kernel) throw ParameterError("prior '" + prior.id + "' has no kernel");
  BasicPosterior<Scalar> post;
  post.prior_ = prior;
  post.training_ = log.points();
  post.noise_std_ = log.noise_std();
  if (log.empty()) return post;
  post.factor_ = factorize_with_jitter<Scalar>(noisy_gram(prior, log), prior.id);
  post.weights_ = cholesky_solve(post.factor_.lower, residuals(prior, log));
  return post;
}

template <typename Scalar>
Prediction<Scalar> predict(const BasicPosterior<Scalar>& model, const BasicSpaceTimePoint<Scalar>& query) {
  return model.predict(query);
}

/// log N(y; mu(X), K + R^2 I). Zero for an empty log.
template <typename Scalar>
Scalar log_marginal_likelihood(const BasicGPPrior<Scalar>& prior, const BasicObservationLog<Scalar>& log) {
  if (log.empty()) return Scalar(0);
  const auto factor = factorize_with_jitter<Scalar>(noisy_gram(prior, log), prior.id);
  const VectorX<Scalar> r = residuals(prior, log);
  const VectorX<Scalar> v = factor.lower.template triangularView<Eigen::Lower>().solve(r);
  const auto n = static_cast<Scalar>(r.size());
  return Scalar(-0.5) * v.squaredNorm() - factor.lower.diagonal().array().log().sum() -
         Scalar(0.5) * n * std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
}

/// 1/2 log det(I + R^{-2} K) over `points`.
template <typename Scalar, typename Range>
Scalar information_gain(const BasicGPPrior<Scalar>& prior, const Range& points, Scalar noise_std) {
  if (std::size(points) == 0) throw ParameterError("information gain needs at least one point");
  if (!(noise_std > Scalar(0))) throw ParameterError("noise_std must be positive");
  MatrixX<Scalar> m = prior.kernel->gram(points) / (noise_std * noise_std);
  m.diagonal().array() += Scalar(1);
  const auto factor = factorize_with_jitter<Scalar>(m, prior.id);
  return factor.lower.diagonal().array().log().sum();
}

}  // namespace pegp::gp
