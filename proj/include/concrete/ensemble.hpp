#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "concrete/tree.hpp"

namespace concrete {

struct ForestParams {
  int n_estimators = 10;
  int max_depth = 3;
  std::uint64_t seed = 0;
};

/// Bagged regression trees; every split considers all features.
struct RandomForest {
  std::vector<RegressionTree> trees;
  ForestParams params;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

/// Tree t is grown on a bootstrap resample of size N drawn from
/// Rng::stream(seed, t), so trees are independent of fitting order.
RandomForest fit_random_forest(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const ForestParams& params = {});

struct BoostingParams {
  int n_estimators = 100;
  double learning_rate = 0.01;
  int max_depth = 5;
  std::size_t min_samples_split = 5;
  std::uint64_t seed = 0;  // unused by the deterministic squared-error fit, kept for reporting
};

/// Least-squares gradient boosting: prediction = base + lr * sum(tree outputs).
struct GradientBoosting {
  double base_prediction = 0;
  double learning_rate = 0.01;
  std::vector<RegressionTree> trees;
  std::vector<double> training_rmse;  // after 0, 1, ..., n stages
  BoostingParams params;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

GradientBoosting fit_gradient_boosting(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                       const BoostingParams& params = {});

}  // namespace concrete
