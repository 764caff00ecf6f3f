#include "concrete/features.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>

#include "concrete/error.hpp"
#include "concrete/text.hpp"

namespace concrete {

namespace {

void require_variance(const Eigen::VectorXd& column, const std::string& name) {
  if (column.size() == 0 || population_std(column) <= 0)
    throw DataError("ZeroVariance", "column '" + name + "' has zero variance", 0, name);
}

}  // namespace

int DesignMatrix::column_index(std::string_view name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

DesignMatrix DesignMatrix::select_rows(std::span<const std::size_t> rows) const {
  DesignMatrix out;
  out.columns = columns;
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.values.resize(n, values.cols());
  out.raw_water.resize(n);
  out.raw_cement.resize(n);
  out.target.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
    out.values.row(i) = values.row(r);
    out.raw_water(i) = raw_water(r);
    out.raw_cement(i) = raw_cement(r);
    out.target(i) = target(r);
  }
  return out;
}

DesignMatrix make_design_matrix(const Dataset& d) {
  DesignMatrix m;
  for (std::size_t k = 0; k < kMaterialCount; ++k) m.columns.emplace_back(kSchemaColumns[k]);
  const auto n = static_cast<Eigen::Index>(d.size());
  m.values.resize(n, static_cast<Eigen::Index>(kMaterialCount));
  m.raw_water.resize(n);
  m.raw_cement.resize(n);
  m.target.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = d.records[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < kMaterialCount; ++k) m.values(i, static_cast<Eigen::Index>(k)) = r.materials[k];
    m.raw_water(i) = r.water();
    m.raw_cement(i) = r.cement();
    m.target(i) = r.strength;
  }
  return m;
}

void validate(const DesignMatrix& m) {
  const auto n = m.rows();
  if (static_cast<std::size_t>(m.cols()) != m.columns.size() || m.raw_water.size() != n ||
      m.raw_cement.size() != n || m.target.size() != n)
    throw DataError("InvalidDesignMatrix", "design matrix component shapes disagree");
  if (!m.values.allFinite() || !m.raw_water.allFinite() || !m.raw_cement.allFinite() || !m.target.allFinite())
    throw DataError("InvalidDesignMatrix", "design matrix contains NaN or Inf");
}

OutlierRemoval remove_outliers(const DesignMatrix& m, double threshold) {
  if (m.rows() == 0) throw DataError("EmptyResult", "outlier removal on an empty matrix");
  const auto n = m.rows();
  std::vector<bool> keep(static_cast<std::size_t>(n), true);

  auto scan = [&](const Eigen::VectorXd& column, const std::string& name) {
    require_variance(column, name);
    const double mu = column.mean();
    const double sigma = population_std(column);
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs((column(i) - mu) / sigma) >= threshold) keep[static_cast<std::size_t>(i)] = false;
  };
  for (Eigen::Index c = 0; c < m.cols(); ++c) scan(m.values.col(c), m.columns[static_cast<std::size_t>(c)]);
  scan(m.target, "strength");

  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (keep[i]) rows.push_back(i);
  if (rows.empty()) throw DataError("AllRowsRemoved", "every row was flagged as an outlier");

  OutlierRemoval out;
  out.matrix = m.select_rows(rows);
  out.removed = keep.size() - rows.size();
  return out;
}

DesignMatrix add_water_cement_ratio(const DesignMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    if (!(m.raw_cement(i) > 0))
      throw DataError("ZeroCement", "row " + std::to_string(i + 1) + ": cement must be > 0",
                      static_cast<std::size_t>(i + 1), "cement");
  DesignMatrix out = m;
  out.columns.emplace_back(kWaterCementRatio);
  out.values.conservativeResize(Eigen::NoChange, m.cols() + 1);
  out.values.col(m.cols()) = m.raw_water.cwiseQuotient(m.raw_cement);
  return out;
}

FeaturePipeline fit_standardizer(const DesignMatrix& m) {
  if (m.rows() == 0) throw DataError("EmptyResult", "cannot fit a standardizer on zero rows");
  FeaturePipeline p;
  p.columns = m.columns;
  p.means.resize(m.cols());
  p.stds.resize(m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const auto& name = m.columns[static_cast<std::size_t>(c)];
    require_variance(m.values.col(c), name);
    p.means(c) = m.values.col(c).mean();
    p.stds(c) = population_std(m.values.col(c));
    if (name == kWaterCementRatio) p.derived.push_back(name);
  }
  p.fitted = true;
  return p;
}

namespace {

void check_compatible(const FeaturePipeline& p, const std::vector<std::string>& columns) {
  if (!p.fitted) throw Error("NotFitted", "feature pipeline used before fit");
  if (columns != p.columns) throw Error("ColumnMismatch", "columns differ from those seen at fit time");
}

}  // namespace

DesignMatrix transform(const FeaturePipeline& p, const DesignMatrix& m) {
  check_compatible(p, m.columns);
  DesignMatrix out = m;
  out.values = (m.values.rowwise() - p.means.transpose()).array().rowwise() / p.stds.transpose().array();
  return out;
}

Eigen::RowVectorXd transform_row(const FeaturePipeline& p, const Eigen::RowVectorXd& raw) {
  if (!p.fitted) throw Error("NotFitted", "feature pipeline used before fit");
  if (raw.size() != p.means.size()) throw Error("ColumnMismatch", "row width differs from fit-time width");
  return (raw - p.means.transpose()).cwiseQuotient(p.stds.transpose());
}

Eigen::MatrixXd inverse_transform(const FeaturePipeline& p, const Eigen::MatrixXd& standardized) {
  if (!p.fitted) throw Error("NotFitted", "feature pipeline used before fit");
  if (standardized.cols() != p.means.size()) throw Error("ColumnMismatch", "width differs from fit-time width");
  return (standardized.array().rowwise() * p.stds.transpose().array()).matrix().rowwise() + p.means.transpose();
}

std::vector<FeatureCorrelation> pearson_correlations(const DesignMatrix& m) {
  require_variance(m.target, "strength");
  std::vector<FeatureCorrelation> out;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const auto& name = m.columns[static_cast<std::size_t>(c)];
    require_variance(m.values.col(c), name);
    const double r = pearson(m.values.col(c), m.target);
    out.push_back({name, std::clamp(r, -1.0, 1.0)});
  }
  return out;
}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw DataError("EmptySubset", "percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(pct, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<Bounds> percentile_bounds(const DesignMatrix& m, double strength_min, double lo_pct, double hi_pct) {
  if (lo_pct > hi_pct) throw Error("InvalidPercentiles", "lower percentile exceeds upper percentile");
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    if (m.target(i) >= strength_min) rows.push_back(i);
  if (rows.empty())
    throw DataError("EmptySubset", "no rows with strength >= " + format_number(strength_min));

  std::vector<Bounds> out;
  std::vector<double> column(rows.size());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (std::size_t k = 0; k < rows.size(); ++k) column[k] = m.values(rows[k], c);
    out.push_back({percentile(column, lo_pct), percentile(column, hi_pct)});
  }
  return out;
}

void write_pipeline(std::ostream& out, const FeaturePipeline& p) {
  out << "fitted = " << (p.fitted ? "true" : "false") << '\n';
  out << "outlier_threshold = " << format_number(p.outlier_threshold) << '\n';
  out << "columns = " << p.columns.size() << '\n';
  for (std::size_t c = 0; c < p.columns.size(); ++c) {
    const auto i = static_cast<Eigen::Index>(c);
    out << "column." << c << ".name = " << p.columns[c] << '\n';
    out << "column." << c << ".mean = " << format_number(p.means(i)) << '\n';
    out << "column." << c << ".std = " << format_number(p.stds(i)) << '\n';
  }
  for (std::size_t k = 0; k < p.derived.size(); ++k) out << "derived." << k << " = " << p.derived[k] << '\n';
}

FeaturePipeline read_pipeline(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw Error("ParseError", "expected 'key = value': " + std::string(t));
    kv[std::string(trim(t.substr(0, eq)))] = std::string(trim(t.substr(eq + 1)));
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error("ParseError", "missing key '" + key + "'");
    return it->second;
  };
  FeaturePipeline p;
  p.fitted = get("fitted") == "true";
  p.outlier_threshold = std::stod(get("outlier_threshold"));
  const auto n = std::stoul(get("columns"));
  p.means.resize(static_cast<Eigen::Index>(n));
  p.stds.resize(static_cast<Eigen::Index>(n));
  for (std::size_t c = 0; c < n; ++c) {
    const auto prefix = "column." + std::to_string(c);
    p.columns.push_back(get(prefix + ".name"));
    p.means(static_cast<Eigen::Index>(c)) = std::stod(get(prefix + ".mean"));
    p.stds(static_cast<Eigen::Index>(c)) = std::stod(get(prefix + ".std"));
  }
  for (std::size_t k = 0; kv.count("derived." + std::to_string(k)); ++k) p.derived.push_back(kv["derived." + std::to_string(k)]);
  return p;
}

}  // namespace concrete
