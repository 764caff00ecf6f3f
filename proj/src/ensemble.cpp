#include "concrete/ensemble.hpp"

#include "concrete/error.hpp"
#include "concrete/metrics.hpp"
#include "concrete/random.hpp"

namespace concrete {

Eigen::VectorXd RandomForest::predict(const Eigen::MatrixXd& x) const {
  if (trees.empty()) throw Error("NotFitted", "random forest has no trees");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.rows());
  for (const auto& t : trees) sum += t.predict(x);
  return sum / static_cast<double>(trees.size());
}

RandomForest fit_random_forest(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const ForestParams& params) {
  if (x.rows() < 2) throw Error("TooFewRecords", "random forest needs at least 2 rows");
  if (params.n_estimators < 1) throw Error("InvalidHyperparameter", "n_estimators must be >= 1");
  RandomForest forest;
  forest.params = params;
  const auto n = static_cast<std::uint64_t>(x.rows());
  std::vector<std::size_t> sample(static_cast<std::size_t>(n));
  for (int t = 0; t < params.n_estimators; ++t) {
    Rng rng = Rng::stream(params.seed, static_cast<std::uint64_t>(t));
    for (auto& s : sample) s = static_cast<std::size_t>(rng.below(n));
    forest.trees.push_back(RegressionTree::fit(x, y, sample, TreeParams{params.max_depth, 2}));
  }
  return forest;
}

Eigen::VectorXd GradientBoosting::predict(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(x.rows(), base_prediction);
  for (const auto& t : trees) out += learning_rate * t.predict(x);
  return out;
}

GradientBoosting fit_gradient_boosting(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                       const BoostingParams& params) {
  if (x.rows() == 0 || static_cast<std::size_t>(x.rows()) < params.min_samples_split)
    throw Error("TooFewRecords", "gradient boosting needs at least min_samples_split rows");
  if (params.n_estimators < 0 || !(params.learning_rate > 0))
    throw Error("InvalidHyperparameter", "n_estimators must be >= 0 and learning_rate > 0");

  GradientBoosting gb;
  gb.params = params;
  gb.learning_rate = params.learning_rate;
  gb.base_prediction = y.mean();
  Eigen::VectorXd fitted = Eigen::VectorXd::Constant(y.size(), gb.base_prediction);
  gb.training_rmse.push_back(rmse(y, fitted));
  const TreeParams tree_params{params.max_depth, params.min_samples_split};
  for (int s = 0; s < params.n_estimators; ++s) {
    const Eigen::VectorXd residual = y - fitted;
    gb.trees.push_back(RegressionTree::fit(x, residual, tree_params));
    fitted += params.learning_rate * gb.trees.back().predict(x);
    gb.training_rmse.push_back(rmse(y, fitted));
  }
  return gb;
}

}  // namespace concrete
