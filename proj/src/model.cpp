#include "concrete/model.hpp"

#include "concrete/error.hpp"
#include "concrete/text.hpp"

namespace concrete {

ModelKind parse_model_kind(const std::string& raw) {
  const std::string name = to_lower(trim(raw));
  if (name == "linear") return ModelKind::Linear;
  if (name == "random_forest" || name == "rf") return ModelKind::RandomForest;
  if (name == "gradient_boosting" || name == "gb") return ModelKind::GradientBoosting;
  if (name == "dnn") return ModelKind::Dnn;
  if (name == "pinn") return ModelKind::Pinn;
  throw Error("UnknownModel", "unknown model '" + name + "' (linear, random_forest, gradient_boosting, dnn, pinn)");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Linear: return "linear";
    case ModelKind::RandomForest: return "random_forest";
    case ModelKind::GradientBoosting: return "gradient_boosting";
    case ModelKind::Dnn: return "dnn";
    case ModelKind::Pinn: return "pinn";
  }
  return "unknown";
}

std::string display_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Linear: return "Linear Regression";
    case ModelKind::RandomForest: return "Random Forest";
    case ModelKind::GradientBoosting: return "Gradient Boosting";
    case ModelKind::Dnn: return "DNN";
    case ModelKind::Pinn: return "PINN";
  }
  return "unknown";
}

Eigen::VectorXd RegressionModel::predict(const DesignMatrix& m) const {
  if (m.columns != columns_) throw Error("ColumnMismatch", "model columns differ from the design matrix columns");
  return predict(m.values);
}

Eigen::VectorXd RegressionModel::predict(const Eigen::MatrixXd& values) const {
  if (values.cols() != static_cast<Eigen::Index>(columns_.size()))
    throw Error("ColumnMismatch", "model expects " + std::to_string(columns_.size()) + " columns");
  if (values.rows() == 0) return Eigen::VectorXd(0);
  return std::visit(
      [&](const auto& s) -> Eigen::VectorXd {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, TrainedMlp>)
          return s.net.predict(values);
        else
          return s.predict(values);
      },
      state_);
}

const std::vector<EpochRecord>& RegressionModel::history() const {
  static const std::vector<EpochRecord> none;
  if (const auto* mlp = std::get_if<TrainedMlp>(&state_)) return mlp->history;
  return none;
}

RegressionModel fit_model(ModelKind kind, const DesignMatrix& m, const ModelSettings& settings, std::uint64_t seed,
                          const std::optional<AbramsCoefficients>& abrams) {
  validate(m);
  switch (kind) {
    case ModelKind::Linear:
      return {kind, m.columns, fit_linear(m.values, m.target), seed};
    case ModelKind::RandomForest: {
      ForestParams p = settings.forest;
      p.seed = seed;
      return {kind, m.columns, fit_random_forest(m.values, m.target, p), seed};
    }
    case ModelKind::GradientBoosting: {
      BoostingParams p = settings.boosting;
      p.seed = seed;
      return {kind, m.columns, fit_gradient_boosting(m.values, m.target, p), seed};
    }
    case ModelKind::Dnn: {
      DnnParams p = settings.dnn;
      p.seed = seed;
      return {kind, m.columns, train_mlp(m.values, m.target, nullptr, p, Objective::mse()), seed};
    }
    case ModelKind::Pinn: {
      if (!abrams) throw Error("MissingAbrams", "the PINN needs fitted Abrams coefficients");
      DnnParams p = settings.dnn;
      p.seed = seed;
      return {kind, m.columns, fit_pinn(m, *abrams, p, settings.physics_weight), seed};
    }
  }
  throw Error("UnknownModel", "unhandled model kind");
}

}  // namespace concrete
