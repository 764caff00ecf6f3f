#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "concrete/error.hpp"
#include "concrete/features.hpp"
#include "concrete/mlp.hpp"
#include "concrete/swarm.hpp"

namespace concrete {

/// Abrams' law S = A / B^(water / cement).
struct AbramsCoefficients {
  double A = 0;       // MPa
  double B = 0;       // dimensionless, > 1
  double fit_rmse = 0;  // MPa, against the data the law was fitted on
};

template <typename Scalar>
Scalar abrams_strength(Scalar a, Scalar b, Scalar water, Scalar cement) {
  using std::pow;
  if (!(cement > Scalar(0))) throw Error("ZeroCement", "Abrams' law needs cement > 0");
  return a / pow(b, water / cement);
}

inline double abrams_strength(const AbramsCoefficients& c, double water, double cement) {
  return abrams_strength<double>(c.A, c.B, water, cement);
}

/// Elementwise Abrams prediction for raw water/cement vectors.
Eigen::VectorXd abrams_strength(const AbramsCoefficients& c, const Eigen::VectorXd& water,
                                const Eigen::VectorXd& cement);

/// RMSE between network predictions and the Abrams prediction of each row.
/// Water and cement must be in original units.
double physics_loss(const AbramsCoefficients& c, const Eigen::VectorXd& pred, const Eigen::VectorXd& water,
                    const Eigen::VectorXd& cement);

struct PinnLossReport {
  double data_loss = 0;
  double physics_loss = 0;
  double total = 0;
};

/// total = rmse(truth, pred) + physics_loss(c, pred, water, cement).
PinnLossReport pinn_total_loss(const AbramsCoefficients& c, const Eigen::VectorXd& truth, const Eigen::VectorXd& pred,
                               const Eigen::VectorXd& water, const Eigen::VectorXd& cement);

/// Swarm settings used for the (A, B) search: 40 particles, 200 iterations,
/// A in [1, 200] MPa, B in [1.01, 10].
SwarmConfig default_abrams_swarm(std::uint64_t seed = 0);

struct AbramsFit {
  AbramsCoefficients coefficients;
  std::vector<double> history;  // best RMSE per swarm iteration
};

/// Minimizes rmse(target, A / B^(w/c)) over the swarm box. `swarm.bounds`
/// must have two entries (A, B).
AbramsFit fit_abrams(const DesignMatrix& train, const SwarmConfig& swarm);

/// Physics-informed training: same network and optimizer as the plain DNN,
/// with the Abrams prediction of every row as the physics anchor. `m` is the
/// standardized matrix; its raw_water/raw_cement feed the law.
TrainedMlp fit_pinn(const DesignMatrix& m, const AbramsCoefficients& c, const DnnParams& params,
                    double physics_weight = 1.0);

struct ReductionSettings {
  double train_fraction = 0.9;
  DnnParams dnn;
  SwarmConfig abrams_swarm = default_abrams_swarm();
  double physics_weight = 1.0;
};

struct ReductionRow {
  double reduction = 0;  // fraction of training rows withheld
  std::vector<double> pinn_rmse;  // one per seed
  std::vector<double> dnn_rmse;
  std::size_t train_rows = 0;  // rows used for seed[0]

  double pinn_mean() const;
  double pinn_std() const;
  double dnn_mean() const;
  double dnn_std() const;
};

/// For every seed: split `m` (engineered, unstandardized) into train/test
/// and for each reduction r keep the first round((1 - r) * n_train) training
/// rows in split order, so smaller sets are nested in larger ones. Standardizer, Abrams coefficients, DNN
/// and PINN are fitted on the kept rows only and scored on the untouched
/// test rows. Throws "TooFewRecords" if a reduction leaves too few rows.
std::vector<ReductionRow> reduced_data_study(const DesignMatrix& m, const std::vector<double>& reductions,
                                             const std::vector<std::uint64_t>& seeds,
                                             const ReductionSettings& settings = {});

}  // namespace concrete
