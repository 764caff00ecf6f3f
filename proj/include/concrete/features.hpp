#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "concrete/dataset.hpp"

namespace concrete {

/// Numeric view of a dataset handed to the regressors.
///
/// `values` holds one column per feature and may be rescaled by transforms;
/// `raw_water` and `raw_cement` always stay in kg/m^3 because the Abrams
/// term needs physical units.
struct DesignMatrix {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;
  Eigen::VectorXd raw_water;
  Eigen::VectorXd raw_cement;
  Eigen::VectorXd target;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  /// Index of `name` in `columns`, or -1.
  int column_index(std::string_view name) const;

  DesignMatrix select_rows(std::span<const std::size_t> rows) const;
};

/// The seven material columns plus raw water/cement and strength target.
DesignMatrix make_design_matrix(const Dataset& d);

/// Throws DataError("InvalidDesignMatrix") on shape mismatch or non-finite cells.
void validate(const DesignMatrix& m);

inline constexpr const char* kWaterCementRatio = "water_cement_ratio";

// Population statistics (divide by N), templated on the Eigen expression.
template <typename Derived>
typename Derived::Scalar population_mean(const Eigen::MatrixBase<Derived>& v) {
  return v.mean();
}

template <typename Derived>
typename Derived::Scalar population_std(const Eigen::MatrixBase<Derived>& v) {
  using std::sqrt;
  const auto mu = v.mean();
  return sqrt((v.array() - mu).square().mean());
}

/// Pearson correlation of two equal-length vectors. Requires nonzero variance.
template <typename A, typename B>
typename A::Scalar pearson(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using std::sqrt;
  const auto da = (a.array() - a.mean()).matrix();
  const auto db = (b.array() - b.mean()).matrix();
  return da.dot(db) / sqrt(da.squaredNorm() * db.squaredNorm());
}

struct OutlierRemoval {
  DesignMatrix matrix;
  std::size_t removed = 0;
};

/// Single pass of z-score filtering: drops every row where |z| >= threshold
/// in any feature column or in the target, with z computed from the
/// population mean/std of all rows.
OutlierRemoval remove_outliers(const DesignMatrix& m, double threshold = 3.0);

/// Appends water_cement_ratio = raw_water / raw_cement.
DesignMatrix add_water_cement_ratio(const DesignMatrix& m);

struct FeaturePipeline {
  std::vector<std::string> columns;
  Eigen::VectorXd means;
  Eigen::VectorXd stds;
  double outlier_threshold = 3.0;
  std::vector<std::string> derived;
  bool fitted = false;
};

FeaturePipeline fit_standardizer(const DesignMatrix& m);

/// (x - mean) / std per column with fit-time statistics.
DesignMatrix transform(const FeaturePipeline& p, const DesignMatrix& m);

/// Standardizes a single row given in original units (columns in fit order).
Eigen::RowVectorXd transform_row(const FeaturePipeline& p, const Eigen::RowVectorXd& raw);

Eigen::MatrixXd inverse_transform(const FeaturePipeline& p, const Eigen::MatrixXd& standardized);

struct FeatureCorrelation {
  std::string feature;
  double correlation = 0;
};

/// Correlation of every column with the target, in column order.
std::vector<FeatureCorrelation> pearson_correlations(const DesignMatrix& m);

struct Bounds {
  double low = 0;
  double high = 0;
};

/// Linear-interpolated percentile of `values` (NumPy's default rule).
double percentile(std::vector<double> values, double pct);

/// Per-column [lo_pct, hi_pct] percentile interval over rows whose target
/// is >= strength_min.
std::vector<Bounds> percentile_bounds(const DesignMatrix& m, double strength_min, double lo_pct = 5.0,
                                      double hi_pct = 95.0);

/// `key = value` text for auditing a fitted pipeline.
void write_pipeline(std::ostream& out, const FeaturePipeline& p);
FeaturePipeline read_pipeline(std::istream& in);

}  // namespace concrete
