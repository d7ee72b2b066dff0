#pragma once

#include <Eigen/Cholesky>

#include <string>
#include <string_view>

#include "pegp/gp/types.hpp"

namespace pegp::gp {

inline constexpr double kInitialJitter = 1e-10;
inline constexpr double kMaxJitter = 1e-4;
inline constexpr double kJitterGrowth = 10.0;

/// Lower Cholesky factor of (A + jitter I) together with the jitter that made it succeed.
template <typename Scalar>
struct GramFactor {
  MatrixX<Scalar> lower;
  Scalar jitter = 0;
};

/// Cholesky with jitter escalation: start at `start_jitter`, grow x10 until
/// kMaxJitter, then give up with a NumericalError naming `owner`.
template <typename Scalar>
GramFactor<Scalar> factorize_with_jitter(const MatrixX<Scalar>& a, std::string_view owner,
                                         Scalar start_jitter = Scalar(kInitialJitter)) {
  const auto n = a.rows();
  if (n == 0) return {MatrixX<Scalar>(0, 0), start_jitter};
  if (!a.allFinite()) throw NumericalError("Gram matrix contains non-finite entries", std::string(owner));
  for (Scalar jitter = start_jitter; jitter <= Scalar(kMaxJitter) * Scalar(1.0000001); jitter *= Scalar(kJitterGrowth)) {
    MatrixX<Scalar> shifted = a;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<MatrixX<Scalar>> llt(shifted);
    if (llt.info() != Eigen::Success) continue;
    MatrixX<Scalar> lower = llt.matrixL();
    if (!lower.allFinite() || (lower.diagonal().array() <= Scalar(0)).any()) continue;
    return {std::move(lower), jitter};
  }
  throw NumericalError("Gram matrix factorization failed after jitter escalation to 1e-4", std::string(owner));
}

/// Solves (L L^T) x = b.
template <typename Scalar, typename Derived>
MatrixX<Scalar> cholesky_solve(const MatrixX<Scalar>& lower, const Eigen::MatrixBase<Derived>& b) {
  MatrixX<Scalar> tmp = lower.template triangularView<Eigen::Lower>().solve(b);
  return lower.transpose().template triangularView<Eigen::Upper>().solve(tmp);
}

}  // namespace pegp::gp
