#include "concrete/pinn.hpp"

#include <numeric>

#include "concrete/dataset.hpp"
#include "concrete/metrics.hpp"
#include "concrete/text.hpp"

namespace concrete {

Eigen::VectorXd abrams_strength(const AbramsCoefficients& c, const Eigen::VectorXd& water,
                                const Eigen::VectorXd& cement) {
  if (water.size() != cement.size()) throw Error("LengthMismatch", "water and cement differ in length");
  Eigen::VectorXd out(water.size());
  for (Eigen::Index i = 0; i < water.size(); ++i) out(i) = abrams_strength(c, water(i), cement(i));
  return out;
}

double physics_loss(const AbramsCoefficients& c, const Eigen::VectorXd& pred, const Eigen::VectorXd& water,
                    const Eigen::VectorXd& cement) {
  if (pred.size() != water.size()) throw Error("LengthMismatch", "prediction and water differ in length");
  return rmse(abrams_strength(c, water, cement), pred);
}

PinnLossReport pinn_total_loss(const AbramsCoefficients& c, const Eigen::VectorXd& truth, const Eigen::VectorXd& pred,
                               const Eigen::VectorXd& water, const Eigen::VectorXd& cement) {
  PinnLossReport r;
  r.data_loss = rmse(truth, pred);
  r.physics_loss = physics_loss(c, pred, water, cement);
  r.total = r.data_loss + r.physics_loss;
  return r;
}

SwarmConfig default_abrams_swarm(std::uint64_t seed) {
  SwarmConfig cfg;
  cfg.n_particles = 40;
  cfg.max_iters = 200;
  cfg.bounds = {{1.0, 200.0}, {1.01, 10.0}};
  cfg.seed = seed;
  return cfg;
}

AbramsFit fit_abrams(const DesignMatrix& train, const SwarmConfig& swarm) {
  if (train.rows() == 0) throw DataError("EmptyResult", "fit_abrams: no rows");
  if (swarm.n_dims() != 2) throw Error("InvalidSwarmConfig", "fit_abrams searches exactly two dimensions (A, B)");
  if (!(swarm.bounds[1].low >= 1.0)) throw Error("InvalidBounds", "B must stay >= 1");
  for (Eigen::Index i = 0; i < train.rows(); ++i)
    if (!(train.raw_cement(i) > 0)) throw Error("ZeroCement", "fit_abrams: row with cement <= 0");

  const Eigen::VectorXd ratio = train.raw_water.cwiseQuotient(train.raw_cement);
  const Eigen::VectorXd& truth = train.target;
  auto cost = [&](const Eigen::VectorXd& ab) {
    const Eigen::VectorXd pred = ab(0) * (-std::log(ab(1)) * ratio.array()).exp();
    return rmse(truth, pred);
  };
  const SwarmResult result = minimize(swarm, cost);
  AbramsFit fit;
  fit.coefficients = {result.best_position(0), result.best_position(1), result.best_cost};
  fit.history = result.history;
  return fit;
}

TrainedMlp fit_pinn(const DesignMatrix& m, const AbramsCoefficients& c, const DnnParams& params,
                    double physics_weight) {
  if (!(physics_weight >= 0)) throw Error("InvalidHyperparameter", "physics weight must be >= 0");
  const Eigen::VectorXd anchor = abrams_strength(c, m.raw_water, m.raw_cement);
  return train_mlp(m.values, m.target, &anchor, params, Objective::pinn(physics_weight));
}

namespace {

// Smallest set for which a 5% validation split is non-empty.
constexpr std::size_t kMinNetworkRows = 20;

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double ss = 0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

double ReductionRow::pinn_mean() const { return mean_of(pinn_rmse); }
double ReductionRow::pinn_std() const { return std_of(pinn_rmse); }
double ReductionRow::dnn_mean() const { return mean_of(dnn_rmse); }
double ReductionRow::dnn_std() const { return std_of(dnn_rmse); }

std::vector<ReductionRow> reduced_data_study(const DesignMatrix& m, const std::vector<double>& reductions,
                                             const std::vector<std::uint64_t>& seeds,
                                             const ReductionSettings& settings) {
  if (reductions.empty()) throw Error("InvalidConfig", "reduction list is empty");
  if (seeds.empty()) throw Error("InvalidConfig", "seed list is empty");
  for (double r : reductions)
    if (!(r >= 0 && r <= 0.9)) throw Error("InvalidConfig", "reductions must lie in [0, 0.9]");

  std::vector<ReductionRow> rows(reductions.size());
  for (std::size_t k = 0; k < reductions.size(); ++k) rows[k].reduction = reductions[k];

  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const auto seed = seeds[s];
    // The training indices are already a seeded permutation, so their
    // prefixes are nested random subsets.
    const auto parts = split_indices(static_cast<std::size_t>(m.rows()), settings.train_fraction, seed);
    const DesignMatrix test_raw = m.select_rows(parts.test);

    for (std::size_t k = 0; k < reductions.size(); ++k) {
      const auto keep = static_cast<std::size_t>(
          std::llround((1.0 - reductions[k]) * static_cast<double>(parts.train.size())));
      if (keep < kMinNetworkRows)
        throw DataError("TooFewRecords", "reduction " + format_number(reductions[k]) + " leaves " +
                                             std::to_string(keep) + " training rows");
      const DesignMatrix train_raw =
          m.select_rows(std::span<const std::size_t>(parts.train.data(), keep));
      const FeaturePipeline pipeline = fit_standardizer(train_raw);
      const DesignMatrix train = transform(pipeline, train_raw);
      const DesignMatrix test = transform(pipeline, test_raw);

      SwarmConfig swarm = settings.abrams_swarm;
      swarm.seed = seed;
      const AbramsCoefficients law = fit_abrams(train_raw, swarm).coefficients;

      DnnParams dnn = settings.dnn;
      dnn.seed = seed;
      const TrainedMlp plain = train_mlp(train.values, train.target, nullptr, dnn, Objective::mse());
      const TrainedMlp physics = fit_pinn(train, law, dnn, settings.physics_weight);

      rows[k].dnn_rmse.push_back(rmse(test.target, plain.net.predict(test.values)));
      rows[k].pinn_rmse.push_back(rmse(test.target, physics.net.predict(test.values)));
      if (s == 0) rows[k].train_rows = keep;
    }
  }
  return rows;
}

}  // namespace concrete
