#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "concrete/config.hpp"
#include "concrete/dataset.hpp"
#include "concrete/features.hpp"
#include "concrete/importance.hpp"
#include "concrete/mixopt.hpp"
#include "concrete/model.hpp"
#include "concrete/pinn.hpp"

namespace concrete {

/// Dataset after the age filter, as a raw matrix and as the engineered
/// matrix (outliers removed, water/cement ratio added, not yet
/// standardized).
struct PreparedData {
  Dataset all;
  Dataset filtered;
  DesignMatrix raw;
  DesignMatrix engineered;
  std::size_t outliers_removed = 0;
};

PreparedData prepare_data(const RunConfig& cfg);

/// One seeded train/test evaluation.
struct HoldoutRun {
  RegressionModel model;
  std::optional<FeaturePipeline> pipeline;
  std::optional<AbramsCoefficients> abrams;
  DesignMatrix train;  // as fed to the model
  DesignMatrix test;
  Eigen::VectorXd predictions;
  double test_rmse = 0;
};

/// Splits `m`, optionally standardizes with train statistics, fits `kind`
/// (the PINN also gets Abrams coefficients fitted on the raw train rows) and
/// scores the test rows.
HoldoutRun run_holdout(ModelKind kind, const DesignMatrix& m, bool standardize, std::uint64_t seed,
                       const RunConfig& cfg);

struct ComparisonRow {
  ModelKind kind{};
  std::vector<double> raw_rmse;  // per seed, empty if not run
  std::vector<double> engineered_rmse;

  double raw_mean() const;
  double engineered_mean() const;
  /// 100 * (raw - engineered) / raw.
  double improvement_pct() const;
};

struct TrainReport {
  std::vector<ComparisonRow> rows;
  std::vector<std::uint64_t> seeds;
  std::size_t outliers_removed = 0;
  bool raw_run = false;
  bool engineered_run = false;

  /// Mean of the per-model improvement percentages.
  double mean_improvement_pct() const;
};

struct TrainOptions {
  bool compare_raw = true;  // with feature engineering on, also train on raw features
};

TrainReport train_models(const PreparedData& data, const RunConfig& cfg, const TrainOptions& options = {});

struct AbramsReport {
  AbramsCoefficients initial;  // the reference (A, B) evaluated without optimization
  AbramsFit fit;
  std::size_t rows = 0;
};

/// Fits Abrams' law on every age-filtered record (raw, no outlier removal).
AbramsReport fit_abrams_report(const PreparedData& data, const RunConfig& cfg);

struct AblationReport {
  std::vector<ReductionRow> rows;
  ReductionRow full_data;  // reduction 0, the reference
  std::vector<std::uint64_t> seeds;
};

AblationReport run_ablation(const PreparedData& data, const RunConfig& cfg);

struct MixRun {
  std::uint64_t seed = 0;
  MixSolution solution;
};

struct MixReport {
  std::vector<MixRun> runs;
  PriceList prices;
  bool placeholder_prices = false;
  ModelKind model{};
  std::vector<EpochRecord> model_history;  // training curve of the first seed's model

  std::size_t feasible_count() const;
};

/// Resolves the price list: explicit file, or the placeholder list if the
/// config acknowledges it. Throws "MissingPriceFile" otherwise.
PriceList resolve_prices(const RunConfig& cfg, bool* placeholder = nullptr);

MixReport run_mix_optimization(const PreparedData& data, const RunConfig& cfg);

struct ModelImportance {
  ModelKind kind{};
  ImportanceReport report;
};

std::vector<ModelImportance> run_importance(const PreparedData& data, const RunConfig& cfg);

// File emission. Every writer creates cfg.output_dir if needed and writes
// only below it; numbers use fixed precision so reruns are byte-identical.
void write_train_outputs(const TrainReport& r, const PreparedData& data, const RunConfig& cfg);
void write_abrams_outputs(const AbramsReport& r, const PreparedData& data, const RunConfig& cfg);
void write_ablation_outputs(const AblationReport& r, const RunConfig& cfg);
void write_mix_outputs(const MixReport& r, const RunConfig& cfg);
void write_importance_outputs(const std::vector<ModelImportance>& r, const RunConfig& cfg);
void write_dataset_outputs(const PreparedData& data, const RunConfig& cfg);
void write_summary(const TrainReport& train, const AbramsReport& abrams, const AblationReport& ablation,
                   const MixReport& mix, const std::vector<ModelImportance>& importance, const PreparedData& data,
                   const RunConfig& cfg);

}  // namespace concrete
