#pragma once

#include <Eigen/Dense>

namespace concrete {

/// Ordinary least squares: y = intercept + x . weights.
struct LinearCoefficients {
  double intercept = 0;
  Eigen::VectorXd weights;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

/// Solves the normal equations of [1 | x] with a Cholesky factorization and
/// falls back to a complete orthogonal decomposition (minimum-norm
/// pseudo-inverse) when the Gram matrix is rank deficient. Throws
/// "SingularSystem" if even that yields a non-finite solution.
LinearCoefficients fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

}  // namespace concrete
