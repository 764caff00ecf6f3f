#include "concrete/linear.hpp"

#include <algorithm>

#include "concrete/error.hpp"

namespace concrete {

Eigen::VectorXd LinearCoefficients::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != weights.size()) throw Error("ColumnMismatch", "linear model: feature count differs from fit");
  return (x * weights).array() + intercept;
}

LinearCoefficients fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw Error("LengthMismatch", "fit_linear: rows and targets differ");
  if (x.rows() == 0) throw Error("EmptyVector", "fit_linear: no rows");

  Eigen::MatrixXd a(x.rows(), x.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(x.cols()) = x;

  const Eigen::MatrixXd gram = a.transpose() * a;
  const Eigen::VectorXd rhs = a.transpose() * y;

  Eigen::VectorXd beta;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const double scale = gram.diagonal().maxCoeff();
  const double pivot_floor = 1e-12 * std::max(scale, 1.0);
  const bool well_posed = ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                    ldlt.vectorD().minCoeff() > pivot_floor;
  if (well_posed) {
    beta = ldlt.solve(rhs);
  } else {
    beta = a.completeOrthogonalDecomposition().solve(y);
  }
  if (!beta.allFinite()) throw Error("SingularSystem", "fit_linear: non-finite solution");

  LinearCoefficients c;
  c.intercept = beta(0);
  c.weights = beta.tail(x.cols());
  return c;
}

}  // namespace concrete
