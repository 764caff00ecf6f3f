#include "concrete/metrics.hpp"

namespace concrete {

double rmse(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred) {
  return rmse<Eigen::VectorXd, Eigen::VectorXd>(truth, pred);
}

}  // namespace concrete
