#include <doctest.h>

#include <numeric>
#include <sstream>

#include "concrete/error.hpp"
#include "concrete/importance.hpp"
#include "support.hpp"

using namespace concrete;
using doctest::Approx;

namespace {

ModelFactory linear_factory() {
  return [](const DesignMatrix& m) { return fit_model(ModelKind::Linear, m, {}, 0); };
}

// Column 0 copies the target, columns 1..3 are noise.
std::pair<DesignMatrix, DesignMatrix> copied_target(std::size_t rows, std::uint64_t seed) {
  Rng rng(seed);
  auto make = [&](std::size_t n) {
    Eigen::MatrixXd x = testing::uniform_matrix(n, 4, rng, -1, 1);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = 20 + 10 * testing::normal(rng);
    x.col(0) = y;
    return testing::matrix(x, y);
  };
  return {make(rows), make(rows / 2)};
}

struct Parts {
  DesignMatrix train, test;
};

Parts split(const DesignMatrix& m, double fraction, std::uint64_t seed) {
  const auto idx = split_indices(static_cast<std::size_t>(m.rows()), fraction, seed);
  return {m.select_rows(idx.train), m.select_rows(idx.test)};
}

}  // namespace

TEST_CASE("copied target dominates") {
  const auto [train, test] = copied_target(200, 3);
  for (auto variant : {ImportanceVariant::Retrain, ImportanceVariant::NoRetrain}) {
    const ImportanceReport r = permutation_importance(linear_factory(), train, test, 5, 1, variant);
    REQUIRE_EQ(r.features.size(), 4);
    CHECK_LT(r.baseline_rmse, 1e-8);
    for (std::size_t f = 1; f < 4; ++f) CHECK_GT(r.features[0].mean, 10 * std::abs(r.features[f].mean));
    CHECK_EQ(r.ranking().front(), "f0");
  }
}

TEST_CASE("pure noise column scores near zero") {
  Rng rng(11);
  Eigen::MatrixXd x = testing::uniform_matrix(300, 2, rng, 0, 1);
  Eigen::VectorXd y = 5 * x.col(0);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += 0.5 * testing::normal(rng);
  const DesignMatrix all = testing::matrix(x, y);
  const auto parts = split(all, 0.7, 4);
  const ImportanceReport r =
      permutation_importance(linear_factory(), parts.train, parts.test, 10, 2, ImportanceVariant::Retrain);
  CHECK_LT(std::abs(r.features[1].mean), 0.5);
  CHECK_GT(r.features[0].mean, 0.5);
  CHECK_EQ(r.features[0].scores.size(), 10);
}

TEST_CASE("identity permutation changes nothing") {
  const auto [train, test] = copied_target(60, 5);
  const PermutationSource identity = [](std::size_t n, Rng&) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return p;
  };
  const ImportanceReport r =
      permutation_importance(linear_factory(), train, test, 3, 0, ImportanceVariant::NoRetrain, identity);
  for (const auto& f : r.features)
    for (double s : f.scores) CHECK_EQ(s, 0.0);
}

TEST_CASE("constant column has no importance") {
  Rng rng(8);
  Eigen::MatrixXd x = testing::uniform_matrix(80, 3, rng, 0, 1);
  x.col(2).setConstant(4.0);
  const Eigen::VectorXd y = 3 * x.col(0) - x.col(1);
  const DesignMatrix all = testing::matrix(x, y);
  const auto parts = split(all, 0.75, 1);
  for (auto variant : {ImportanceVariant::Retrain, ImportanceVariant::NoRetrain}) {
    const ImportanceReport r = permutation_importance(linear_factory(), parts.train, parts.test, 4, 0, variant);
    CHECK_LT(std::abs(r.features[2].mean), 1e-9);
  }
}

TEST_CASE("reproducible for a fixed seed") {
  const DesignMatrix m = make_design_matrix(filter_age(load_csv(testing::dataset_path()), 28));
  const auto parts = split(m, 0.9, 0);
  const ModelFactory forest = [](const DesignMatrix& d) {
    return fit_model(ModelKind::RandomForest, d, {}, 7);
  };
  const auto a = permutation_importance(forest, parts.train, parts.test, 2, 9, ImportanceVariant::Retrain);
  const auto b = permutation_importance(forest, parts.train, parts.test, 2, 9, ImportanceVariant::Retrain);
  for (std::size_t f = 0; f < a.features.size(); ++f) CHECK_EQ(a.features[f].scores, b.features[f].scores);
  const auto c = permutation_importance(forest, parts.train, parts.test, 2, 10, ImportanceVariant::Retrain);
  bool differs = false;
  for (std::size_t f = 0; f < a.features.size(); ++f) differs |= a.features[f].scores != c.features[f].scores;
  CHECK(differs);
}

TEST_CASE("ranking is stable on ties") {
  ImportanceReport r;
  for (auto [name, mean] : std::vector<std::pair<std::string, double>>{{"a", 1}, {"b", 3}, {"c", 1}, {"d", 2}}) {
    FeatureImportance f;
    f.feature = name;
    f.mean = mean;
    r.features.push_back(f);
  }
  CHECK_EQ(r.ranking(), std::vector<std::string>{"b", "d", "a", "c"});
}

TEST_CASE("mean and std summarize the repeats") {
  const auto [train, test] = copied_target(100, 2);
  const auto r = permutation_importance(linear_factory(), train, test, 6, 3, ImportanceVariant::NoRetrain);
  for (const auto& f : r.features) {
    double mean = 0;
    for (double s : f.scores) mean += s;
    mean /= 6;
    double ss = 0;
    for (double s : f.scores) ss += (s - mean) * (s - mean);
    CHECK_EQ(f.mean, Approx(mean));
    CHECK_EQ(f.std, Approx(std::sqrt(ss / 6)));
  }
}

TEST_CASE("errors and variant names") {
  const auto [train, test] = copied_target(40, 1);
  CHECK_ERROR_CODE(permutation_importance(linear_factory(), train, test, 0, 0, ImportanceVariant::Retrain),
                   "InvalidConfig");
  DesignMatrix renamed = test;
  renamed.columns[1] = "other";
  CHECK_ERROR_CODE(permutation_importance(linear_factory(), train, renamed, 1, 0, ImportanceVariant::Retrain),
                   "ColumnMismatch");
  const PermutationSource short_perm = [](std::size_t, Rng&) { return std::vector<std::size_t>{0}; };
  CHECK_ERROR_CODE(
      permutation_importance(linear_factory(), train, test, 1, 0, ImportanceVariant::NoRetrain, short_perm),
      "LengthMismatch");
  CHECK_EQ(parse_importance_variant("no_retrain"), ImportanceVariant::NoRetrain);
  CHECK_EQ(to_string(ImportanceVariant::Retrain), "retrain");
  CHECK_ERROR_CODE(parse_importance_variant("drop"), "InvalidConfig");
}

TEST_CASE("csv output") {
  ImportanceReport r;
  FeatureImportance f;
  f.feature = "cement";
  f.mean = 1.5;
  f.std = 0.25;
  r.features.push_back(f);
  std::ostringstream out;
  write_importance_csv(out, r);
  CHECK_EQ(out.str(), "feature,importance_mean,importance_std\ncement,1.500000,0.250000\n");
}
