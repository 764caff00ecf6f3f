#include "concrete/importance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "concrete/error.hpp"
#include "concrete/metrics.hpp"
#include "concrete/text.hpp"

namespace concrete {

ImportanceVariant parse_importance_variant(const std::string& name) {
  if (name == "retrain") return ImportanceVariant::Retrain;
  if (name == "no_retrain") return ImportanceVariant::NoRetrain;
  throw Error("InvalidConfig", "importance variant must be 'retrain' or 'no_retrain'");
}

std::string to_string(ImportanceVariant v) { return v == ImportanceVariant::Retrain ? "retrain" : "no_retrain"; }

std::vector<std::string> ImportanceReport::ranking() const {
  std::vector<const FeatureImportance*> order;
  for (const auto& f : features) order.push_back(&f);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->mean > b->mean; });
  std::vector<std::string> names;
  for (auto* f : order) names.push_back(f->feature);
  return names;
}

namespace {

void permute_column(Eigen::MatrixXd& values, Eigen::Index column, const std::vector<std::size_t>& perm) {
  const Eigen::VectorXd original = values.col(column);
  for (Eigen::Index i = 0; i < values.rows(); ++i) values(i, column) = original(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
}

std::vector<std::size_t> draw_permutation(std::size_t n, Rng& rng, const PermutationSource& permute) {
  if (permute) {
    auto p = permute(n, rng);
    if (p.size() != n) throw Error("LengthMismatch", "permutation source returned the wrong length");
    return p;
  }
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  rng.shuffle(p);
  return p;
}

}  // namespace

ImportanceReport permutation_importance(const ModelFactory& fit, const DesignMatrix& train, const DesignMatrix& test,
                                        int n_repeats, std::uint64_t seed, ImportanceVariant variant,
                                        const PermutationSource& permute) {
  if (n_repeats < 1) throw Error("InvalidConfig", "n_repeats must be >= 1");
  if (train.columns != test.columns) throw Error("ColumnMismatch", "train and test columns differ");

  const RegressionModel reference = fit(train);
  ImportanceReport report;
  report.n_repeats = n_repeats;
  report.seed = seed;
  report.variant = variant;
  report.baseline_rmse = rmse(test.target, reference.predict(test));

  for (Eigen::Index f = 0; f < train.cols(); ++f) {
    FeatureImportance fi;
    fi.feature = train.columns[static_cast<std::size_t>(f)];
    for (int r = 0; r < n_repeats; ++r) {
      Rng rng = Rng::stream(seed, (static_cast<std::uint64_t>(f) << 32) | static_cast<std::uint64_t>(r));
      DesignMatrix shuffled_test = test;
      permute_column(shuffled_test.values, f,
                     draw_permutation(static_cast<std::size_t>(test.rows()), rng, permute));
      double shuffled_rmse = 0;
      if (variant == ImportanceVariant::Retrain) {
        DesignMatrix shuffled_train = train;
        permute_column(shuffled_train.values, f,
                       draw_permutation(static_cast<std::size_t>(train.rows()), rng, permute));
        shuffled_rmse = rmse(test.target, fit(shuffled_train).predict(shuffled_test));
      } else {
        shuffled_rmse = rmse(test.target, reference.predict(shuffled_test));
      }
      // P - P' with P = -RMSE.
      fi.scores.push_back(shuffled_rmse - report.baseline_rmse);
    }
    fi.mean = std::accumulate(fi.scores.begin(), fi.scores.end(), 0.0) / n_repeats;
    double ss = 0;
    for (double s : fi.scores) ss += (s - fi.mean) * (s - fi.mean);
    fi.std = std::sqrt(ss / n_repeats);
    report.features.push_back(std::move(fi));
  }
  return report;
}

void write_importance_csv(std::ostream& out, const ImportanceReport& r) {
  out << "feature,importance_mean,importance_std\n";
  for (const auto& f : r.features) out << f.feature << ',' << format_fixed(f.mean, 6) << ',' << format_fixed(f.std, 6) << '\n';
}

}  // namespace concrete
