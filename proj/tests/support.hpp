#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <sstream>
#include <string>

#include "concrete/dataset.hpp"
#include "concrete/features.hpp"
#include "concrete/random.hpp"

namespace testing {

inline const char* kFiveMixes =
    "Cement,Slag,Ash,Water,Superplastic,Coarse Agg.,Fine Agg.,Age,Strength\n"
    "141.3,212.0,0.0,203.5,0.0,971.8,748.5,28,29.89\n"
    "168.9,42.2,124.3,158.3,10.8,1080.8,796.2,14,23.51\n"
    "250.0,0.0,95.7,187.4,5.5,956.9,861.2,28,29.22\n"
    "266.0,114.0,0.0,228.0,0.0,932.0,670.0,28,45.85\n"
    "154.8,183.4,0.0,193.3,9.1,1040.4,696.7,28,18.29\n";

inline concrete::Dataset five_mixes() {
  std::istringstream in(kFiveMixes);
  return concrete::parse_csv(in, "five_mixes");
}

inline std::filesystem::path dataset_path() {
  return std::filesystem::path(CONCRETE_SOURCE_DIR) / "data" / "concrete.csv";
}

/// Matrix with the given feature values; raw water/cement default to columns
/// 3 and 0 when present, 1 otherwise.
inline concrete::DesignMatrix matrix(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  concrete::DesignMatrix m;
  for (Eigen::Index j = 0; j < x.cols(); ++j) m.columns.push_back("f" + std::to_string(j));
  m.values = x;
  m.target = y;
  m.raw_cement = x.cols() > 0 ? Eigen::VectorXd(x.col(0)) : Eigen::VectorXd::Ones(x.rows());
  m.raw_water = x.cols() > 3 ? Eigen::VectorXd(x.col(3)) : Eigen::VectorXd::Ones(x.rows());
  return m;
}

inline Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, concrete::Rng& rng, double lo = 0,
                                      double hi = 1) {
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = rng.uniform(lo, hi);
  return x;
}

/// Standard normal draw by Box-Muller.
inline double normal(concrete::Rng& rng) {
  const double u1 = 1.0 - rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace testing

/// Evaluates `expr` and checks that it throws concrete::Error with `code`.
#define CHECK_ERROR_CODE(expr, expected)                      \
  do {                                                        \
    std::string actual_code_ = "<none>";                      \
    try {                                                     \
      (void)(expr);                                           \
    } catch (const concrete::Error& e) {                      \
      actual_code_ = e.code();                                \
    }                                                         \
    CHECK_EQ(actual_code_, std::string(expected));            \
  } while (0)
