#pragma once

#include <cmath>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "pegp/gp/types.hpp"

namespace pegp::gp {

/// exp(-|x - x'|^2 / (2 l)) * (1 - eps)^{|t - t'| / 2}
template <typename Scalar, typename DerivedA, typename DerivedB>
Scalar tv_rbf_kernel(const Eigen::MatrixBase<DerivedA>& x, int t, const Eigen::MatrixBase<DerivedB>& x_other,
                     int t_other, Scalar lengthscale, Scalar forgetting) {
  if (!(lengthscale > Scalar(0))) throw ParameterError("lengthscale must be positive");
  if (!(forgetting >= Scalar(0) && forgetting <= Scalar(1))) throw ParameterError("forgetting must lie in [0, 1]");
  const Scalar spatial = std::exp(-(x - x_other).squaredNorm() / (Scalar(2) * lengthscale));
  const int lag = std::abs(t - t_other);
  if (lag == 0) return spatial;
  return spatial * std::pow(Scalar(1) - forgetting, static_cast<Scalar>(lag) / Scalar(2));
}

template <typename Scalar>
class BasicKernel {
 public:
  using Point = BasicSpaceTimePoint<Scalar>;

  virtual ~BasicKernel() = default;
  virtual Scalar operator()(const Point& a, const Point& b) const = 0;
  virtual Scalar diag(const Point& a) const { return (*this)(a, a); }

  /// Gram matrix over `rows` x `cols`.
  template <typename RowRange, typename ColRange>
  MatrixX<Scalar> gram(const RowRange& rows, const ColRange& cols) const {
    MatrixX<Scalar> k(static_cast<Eigen::Index>(std::size(rows)), static_cast<Eigen::Index>(std::size(cols)));
    Eigen::Index i = 0;
    for (const auto& a : rows) {
      Eigen::Index j = 0;
      for (const auto& b : cols) k(i, j++) = (*this)(a, b);
      ++i;
    }
    return k;
  }

  /// Symmetric Gram matrix; only the lower triangle is evaluated.
  template <typename Range>
  MatrixX<Scalar> gram(const Range& points) const {
    const auto n = static_cast<Eigen::Index>(std::size(points));
    MatrixX<Scalar> k(n, n);
    auto it_i = std::begin(points);
    for (Eigen::Index i = 0; i < n; ++i, ++it_i) {
      auto it_j = std::begin(points);
      for (Eigen::Index j = 0; j <= i; ++j, ++it_j) {
        const Scalar v = (*this)(*it_i, *it_j);
        k(i, j) = v;
        k(j, i) = v;
      }
    }
    return k;
  }
};

/// Time-varying RBF kernel on coordinates.
template <typename Scalar>
class TimeVaryingRbf final : public BasicKernel<Scalar> {
 public:
  using Point = BasicSpaceTimePoint<Scalar>;

  TimeVaryingRbf(Scalar lengthscale, Scalar forgetting) : lengthscale_(lengthscale), forgetting_(forgetting) {
    if (!(lengthscale > Scalar(0))) throw ParameterError("lengthscale must be positive");
    if (!(forgetting >= Scalar(0) && forgetting <= Scalar(1))) throw ParameterError("forgetting must lie in [0, 1]");
  }

  Scalar operator()(const Point& a, const Point& b) const override {
    return tv_rbf_kernel(a.x, a.t, b.x, b.t, lengthscale_, forgetting_);
  }
  Scalar diag(const Point&) const override { return Scalar(1); }

  Scalar lengthscale() const { return lengthscale_; }
  Scalar forgetting() const { return forgetting_; }

 private:
  Scalar lengthscale_;
  Scalar forgetting_;
};

/// Cov(arm, arm') * (1 - eps)^{|t - t'| / 2} over an explicit per-arm table.
template <typename Scalar>
class CovarianceTableKernel final : public BasicKernel<Scalar> {
 public:
  using Point = BasicSpaceTimePoint<Scalar>;

  CovarianceTableKernel(MatrixX<Scalar> covariance, Scalar forgetting)
      : covariance_(std::move(covariance)), forgetting_(forgetting) {
    if (covariance_.rows() != covariance_.cols()) throw ParameterError("covariance table must be square");
    if (!(forgetting >= Scalar(0) && forgetting <= Scalar(1))) throw ParameterError("forgetting must lie in [0, 1]");
    if (!covariance_.isApprox(covariance_.transpose(), Scalar(0)))
      throw ParameterError("covariance table must be symmetric");
  }

  Scalar operator()(const Point& a, const Point& b) const override {
    const Scalar c = covariance_(checked(a.arm), checked(b.arm));
    const int lag = std::abs(a.t - b.t);
    if (lag == 0) return c;
    return c * std::pow(Scalar(1) - forgetting_, static_cast<Scalar>(lag) / Scalar(2));
  }

  const MatrixX<Scalar>& covariance() const { return covariance_; }
  Scalar forgetting() const { return forgetting_; }

 private:
  Eigen::Index checked(int arm) const {
    if (arm < 0 || arm >= covariance_.rows()) throw ParameterError("arm index outside covariance table");
    return arm;
  }

  MatrixX<Scalar> covariance_;
  Scalar forgetting_;
};

/// Arbitrary closure. Symmetry is the caller's responsibility.
template <typename Scalar>
class FunctionKernel final : public BasicKernel<Scalar> {
 public:
  using Point = BasicSpaceTimePoint<Scalar>;
  using Fn = std::function<Scalar(const Point&, const Point&)>;

  explicit FunctionKernel(Fn fn) : fn_(std::move(fn)) {}
  Scalar operator()(const Point& a, const Point& b) const override { return fn_(a, b); }

 private:
  Fn fn_;
};

/// Multiplies another kernel by a constant. Used to bring kernels under the unit bound.
template <typename Scalar>
class ScaledKernel final : public BasicKernel<Scalar> {
 public:
  using Point = BasicSpaceTimePoint<Scalar>;

  ScaledKernel(std::shared_ptr<const BasicKernel<Scalar>> base, Scalar scale) : base_(std::move(base)), scale_(scale) {}
  Scalar operator()(const Point& a, const Point& b) const override { return scale_ * (*base_)(a, b); }
  Scalar diag(const Point& a) const override { return scale_ * base_->diag(a); }

 private:
  std::shared_ptr<const BasicKernel<Scalar>> base_;
  Scalar scale_;
};

/// Constants (a, b) of the sample-path derivative tail bound; used only for continuous domains.
template <typename Scalar>
struct SmoothnessConstants {
  Scalar a = 1;
  Scalar b = 1;
};

/// A named candidate prior: spatio-temporal mean plus kernel.
/// Priors holding the same kernel pointer share Gram factorizations in PosteriorBank.
template <typename Scalar>
struct BasicGPPrior {
  using Point = BasicSpaceTimePoint<Scalar>;
  using MeanFn = std::function<Scalar(const Point&)>;

  std::string id;
  MeanFn mean;
  std::shared_ptr<const BasicKernel<Scalar>> kernel;
  std::optional<SmoothnessConstants<Scalar>> smoothness;

  Scalar mean_at(const Point& z) const { return mean ? mean(z) : Scalar(0); }
  Scalar kernel_at(const Point& a, const Point& b) const { return (*kernel)(a, b); }
};

using GPPrior = BasicGPPrior<double>;
using Kernel = BasicKernel<double>;

template <typename Scalar>
typename BasicGPPrior<Scalar>::MeanFn zero_mean() {
  return [](const BasicSpaceTimePoint<Scalar>&) { return Scalar(0); };
}

/// What to do with a kernel whose diagonal exceeds 1.
enum class KernelBound { reject, rescale };

/// Checks k(z, z) <= 1 and finite means on the given sample points. In
/// `rescale` mode an over-bound kernel is divided by its largest sampled
/// diagonal and the adjusted prior is returned.
template <typename Scalar, typename Range>
BasicGPPrior<Scalar> check_prior(BasicGPPrior<Scalar> prior, const Range& sample, KernelBound mode = KernelBound::reject,
                                 Scalar tolerance = Scalar(1e-12)) {
  if (!prior.kernel) throw ParameterError("prior '" + prior.id + "' has no kernel");
  Scalar worst = 0;
  for (const auto& z : sample) {
    const Scalar d = prior.kernel->diag(z);
    if (!std::isfinite(d) || d < Scalar(0)) throw ParameterError("prior '" + prior.id + "' kernel diagonal is invalid");
    if (!std::isfinite(prior.mean_at(z))) throw ParameterError("prior '" + prior.id + "' mean is not finite");
    worst = std::max(worst, d);
  }
  if (worst <= Scalar(1) + tolerance) return prior;
  if (mode == KernelBound::reject)
    throw ParameterError("prior '" + prior.id + "' kernel exceeds 1 on the diagonal (max " + std::to_string(worst) +
                         "); rescale it or pass KernelBound::rescale");
  prior.kernel = std::make_shared<ScaledKernel<Scalar>>(prior.kernel, Scalar(1) / worst);
  return prior;
}

}  // namespace pegp::gp
