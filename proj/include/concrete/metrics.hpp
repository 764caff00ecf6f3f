#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "concrete/error.hpp"

namespace concrete {

/// Root mean squared error between two equal, non-empty vectors.
template <typename A, typename B>
typename A::Scalar rmse(const Eigen::MatrixBase<A>& truth, const Eigen::MatrixBase<B>& pred) {
  using std::sqrt;
  if (truth.size() != pred.size()) throw Error("LengthMismatch", "rmse: vectors differ in length");
  if (truth.size() == 0) throw Error("EmptyVector", "rmse: empty input");
  return sqrt((truth - pred).squaredNorm() / static_cast<typename A::Scalar>(truth.size()));
}

double rmse(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred);

}  // namespace concrete
