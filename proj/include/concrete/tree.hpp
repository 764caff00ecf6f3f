#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

namespace concrete {

struct TreeParams {
  int max_depth = -1;  // < 0 means unlimited
  std::size_t min_samples_split = 2;
};

/// Axis-aligned binary regression tree grown greedily on squared error.
///
/// Rows with x[feature] <= threshold go left. Candidate thresholds are the
/// midpoints between consecutive distinct values. Among equal gains the
/// lowest feature index wins, then the lowest threshold.
class RegressionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;  // mean target of the rows reaching this node
    std::size_t samples = 0;
    bool is_leaf() const { return feature < 0; }
  };

  /// Grows a tree on the given rows of (x, y). Rows may repeat (bootstrap).
  static RegressionTree fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::span<const std::size_t> rows,
                            const TreeParams& params);
  static RegressionTree fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TreeParams& params);

  template <typename Row>
  double predict_row(const Eigen::MatrixBase<Row>& row) const {
    int k = 0;
    while (!nodes_[static_cast<std::size_t>(k)].is_leaf()) {
      const auto& n = nodes_[static_cast<std::size_t>(k)];
      k = row(n.feature) <= n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(k)].value;
  }

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  int depth() const;
  std::size_t leaf_count() const;
  Eigen::Index n_features() const { return n_features_; }

 private:
  std::vector<Node> nodes_;
  Eigen::Index n_features_ = 0;
};

}  // namespace concrete
