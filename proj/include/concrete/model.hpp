#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "concrete/ensemble.hpp"
#include "concrete/features.hpp"
#include "concrete/linear.hpp"
#include "concrete/mlp.hpp"
#include "concrete/pinn.hpp"

namespace concrete {

enum class ModelKind { Linear, RandomForest, GradientBoosting, Dnn, Pinn };

ModelKind parse_model_kind(const std::string& name);
std::string to_string(ModelKind kind);
std::string display_name(ModelKind kind);

/// Hyperparameters for every model kind; each fit reads the part it needs.
struct ModelSettings {
  ForestParams forest;
  BoostingParams boosting;
  DnnParams dnn;
  double physics_weight = 1.0;
};

/// Common contract of the five predictors.
class RegressionModel {
 public:
  using State = std::variant<LinearCoefficients, RandomForest, GradientBoosting, TrainedMlp>;

  RegressionModel(ModelKind kind, std::vector<std::string> columns, State state, std::uint64_t seed = 0)
      : kind_(kind), columns_(std::move(columns)), state_(std::move(state)), seed_(seed) {}

  /// One prediction per row. Throws "ColumnMismatch" if the columns differ
  /// from fit time.
  Eigen::VectorXd predict(const DesignMatrix& m) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& values) const;

  ModelKind kind() const { return kind_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const State& state() const { return state_; }
  std::uint64_t seed() const { return seed_; }

  /// Per-epoch history for the network kinds, empty otherwise.
  const std::vector<EpochRecord>& history() const;

 private:
  ModelKind kind_;
  std::vector<std::string> columns_;
  State state_;
  std::uint64_t seed_;
};

/// Fits `kind` on `m`. The Pinn kind requires Abrams coefficients. `seed`
/// overrides the seeds in `settings`.
RegressionModel fit_model(ModelKind kind, const DesignMatrix& m, const ModelSettings& settings, std::uint64_t seed,
                          const std::optional<AbramsCoefficients>& abrams = std::nullopt);

}  // namespace concrete
