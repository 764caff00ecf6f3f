#include "concrete/tree.hpp"

#include <algorithm>
#include <numeric>

#include "concrete/error.hpp"

namespace concrete {

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0;
  double gain = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TreeParams& params,
              std::vector<RegressionTree::Node>& nodes)
      : x_(x), y_(y), params_(params), nodes_(nodes) {}

  int grow(std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double sum = 0;
    for (auto r : rows) sum += y_(static_cast<Eigen::Index>(r));
    nodes_[static_cast<std::size_t>(id)].value = sum / static_cast<double>(rows.size());
    nodes_[static_cast<std::size_t>(id)].samples = rows.size();

    const bool depth_left = params_.max_depth < 0 || depth < params_.max_depth;
    if (!depth_left || rows.size() < std::max<std::size_t>(params_.min_samples_split, 2)) return id;

    const SplitChoice best = best_split(rows);
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows)
      (x_(static_cast<Eigen::Index>(r), best.feature) <= best.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

 private:
  SplitChoice best_split(const std::vector<std::size_t>& rows) const {
    const auto n = rows.size();
    double total = 0;
    for (auto r : rows) total += y_(static_cast<Eigen::Index>(r));
    const double parent = total * total / static_cast<double>(n);

    SplitChoice best;
    std::vector<std::size_t> order(rows);
    for (Eigen::Index f = 0; f < x_.cols(); ++f) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x_(static_cast<Eigen::Index>(a), f) < x_(static_cast<Eigen::Index>(b), f);
      });
      double left_sum = 0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        left_sum += y_(static_cast<Eigen::Index>(order[k]));
        const double here = x_(static_cast<Eigen::Index>(order[k]), f);
        const double next = x_(static_cast<Eigen::Index>(order[k + 1]), f);
        if (!(here < next)) continue;
        const auto nl = static_cast<double>(k + 1);
        const auto nr = static_cast<double>(n - k - 1);
        const double right_sum = total - left_sum;
        // Reduction in sum of squared errors relative to the parent.
        const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent;
        if (gain > best.gain) {
          double threshold = here + (next - here) / 2;
          if (!(threshold < next)) threshold = here;
          best = {static_cast<int>(f), threshold, gain};
        }
      }
    }
    // Gains at rounding-noise level are not worth a split.
    const double noise = 1e-12 * std::max(1.0, parent);
    if (best.gain <= noise) best.feature = -1;
    return best;
  }

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  const TreeParams& params_;
  std::vector<RegressionTree::Node>& nodes_;
};

}  // namespace

RegressionTree RegressionTree::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   std::span<const std::size_t> rows, const TreeParams& params) {
  if (x.rows() != y.size()) throw Error("LengthMismatch", "tree: rows and targets differ");
  if (rows.empty()) throw Error("TooFewRecords", "tree: no rows to fit");
  RegressionTree tree;
  tree.n_features_ = x.cols();
  TreeBuilder(x, y, params, tree.nodes_).grow(std::vector<std::size_t>(rows.begin(), rows.end()), 0);
  return tree;
}

RegressionTree RegressionTree::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TreeParams& params) {
  std::vector<std::size_t> rows(static_cast<std::size_t>(x.rows()));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit(x, y, rows, params);
}

Eigen::VectorXd RegressionTree::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != n_features_) throw Error("ColumnMismatch", "tree: feature count differs from fit");
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = predict_row(x.row(i));
  return out;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const auto& n = nodes_[k];
    if (n.is_leaf()) continue;
    d[static_cast<std::size_t>(n.left)] = d[static_cast<std::size_t>(n.right)] = d[k] + 1;
    deepest = std::max(deepest, d[k] + 1);
  }
  return deepest;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

}  // namespace concrete
