#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

#include "pegp/errors.hpp"

namespace pegp::gp {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// A location in the search domain paired with an optimisation timestep.
/// `arm` indexes a declared arm list on finite domains and is -1 otherwise;
/// table kernels read `arm`, coordinate kernels read `x`.
template <typename Scalar>
struct BasicSpaceTimePoint {
  VectorX<Scalar> x;
  int t = 1;
  int arm = -1;

  BasicSpaceTimePoint() = default;
  BasicSpaceTimePoint(VectorX<Scalar> coords, int timestep, int arm_index = -1)
      : x(std::move(coords)), t(timestep), arm(arm_index) {
    if (t < 1) throw ParameterError("timestep must be >= 1");
  }

  static BasicSpaceTimePoint scalar(Scalar coord, int timestep, int arm_index = -1) {
    VectorX<Scalar> v(1);
    v(0) = coord;
    return {std::move(v), timestep, arm_index};
  }

  static BasicSpaceTimePoint arm_only(int arm_index, int timestep) {
    VectorX<Scalar> v(1);
    v(0) = static_cast<Scalar>(arm_index);
    return {std::move(v), timestep, arm_index};
  }

  /// Same location, different prediction time.
  BasicSpaceTimePoint at(int timestep) const {
    BasicSpaceTimePoint out = *this;
    if (timestep < 1) throw ParameterError("timestep must be >= 1");
    out.t = timestep;
    return out;
  }
};

using SpaceTimePoint = BasicSpaceTimePoint<double>;

/// Throws unless every coordinate lies in [0, r].
template <typename Scalar>
void check_in_box(const BasicSpaceTimePoint<Scalar>& z, Scalar r) {
  if ((z.x.array() < Scalar(0)).any() || (z.x.array() > r).any())
    throw ParameterError("point lies outside the declared box [0, r]^d");
}

}  // namespace pegp::gp
