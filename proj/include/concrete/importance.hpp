#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "concrete/features.hpp"
#include "concrete/model.hpp"
#include "concrete/random.hpp"

namespace concrete {

enum class ImportanceVariant { Retrain, NoRetrain };

ImportanceVariant parse_importance_variant(const std::string& name);
std::string to_string(ImportanceVariant v);

struct FeatureImportance {
  std::string feature;
  double mean = 0;  // MPa of test RMSE lost when the feature is shuffled
  double std = 0;
  std::vector<double> scores;  // one per repeat
};

struct ImportanceReport {
  std::vector<FeatureImportance> features;  // column order
  double baseline_rmse = 0;
  int n_repeats = 0;
  std::uint64_t seed = 0;
  ImportanceVariant variant = ImportanceVariant::Retrain;

  /// Feature names sorted by decreasing mean importance (stable).
  std::vector<std::string> ranking() const;
};

using ModelFactory = std::function<RegressionModel(const DesignMatrix&)>;

/// Produces the row permutation applied to a column of `n` rows. Test hook;
/// the default is Rng::shuffle.
using PermutationSource = std::function<std::vector<std::size_t>(std::size_t n, Rng& rng)>;

/// Performance is -RMSE on `test`; importance = P - P' averaged over
/// repeats. Retrain: the feature column is shuffled in both train and test
/// and the model refitted on the shuffled train. NoRetrain: the model fitted
/// on the original train is reused and only the test column is shuffled.
/// Repeat r of feature f draws from Rng::stream(seed, f * 2^32 + r).
ImportanceReport permutation_importance(const ModelFactory& fit, const DesignMatrix& train, const DesignMatrix& test,
                                        int n_repeats, std::uint64_t seed, ImportanceVariant variant,
                                        const PermutationSource& permute = nullptr);

void write_importance_csv(std::ostream& out, const ImportanceReport& r);

}  // namespace concrete
