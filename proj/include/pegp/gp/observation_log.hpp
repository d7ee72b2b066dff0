#pragma once

#include <cmath>
#include <vector>

#include "pegp/gp/types.hpp"

namespace pegp::gp {

/// Ordered ((x, t), y) observations with strictly increasing timesteps and a
/// shared Gaussian noise level.
template <typename Scalar>
class BasicObservationLog {
 public:
  using Point = BasicSpaceTimePoint<Scalar>;

  explicit BasicObservationLog(Scalar noise_std) : noise_std_(noise_std) {
    if (!(noise_std > Scalar(0)) || !std::isfinite(noise_std)) throw ParameterError("noise_std must be positive");
  }

  void append(Point z, Scalar y) {
    if (!points_.empty() && z.t <= points_.back().t)
      throw ContractViolation("observation timesteps must be strictly increasing");
    if (!std::isfinite(y)) throw ParameterError("observation value must be finite");
    points_.push_back(std::move(z));
    values_.push_back(y);
  }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  Scalar noise_std() const { return noise_std_; }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<Scalar>& values() const { return values_; }

  VectorX<Scalar> y() const {
    return Eigen::Map<const VectorX<Scalar>>(values_.data(), static_cast<Eigen::Index>(values_.size()));
  }

  /// First `n` entries.
  BasicObservationLog prefix(std::size_t n) const {
    BasicObservationLog out(noise_std_);
    for (std::size_t i = 0; i < n && i < size(); ++i) out.append(points_[i], values_[i]);
    return out;
  }

 private:
  Scalar noise_std_;
  std::vector<Point> points_;
  std::vector<Scalar> values_;
};

using ObservationLog = BasicObservationLog<double>;

}  // namespace pegp::gp
