#pragma once

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "concrete/dataset.hpp"
#include "concrete/features.hpp"
#include "concrete/swarm.hpp"

namespace concrete {

class RegressionModel;

/// Unit price per kg of each raw material, in schema order.
struct PriceList {
  std::array<double, kMaterialCount> per_kg{};

  double operator[](Material m) const { return per_kg[static_cast<int>(m)]; }
};

/// Placeholder prices shipped with the tool (currency units per kg): cement
/// is the most expensive, aggregates the cheapest. They are illustrative,
/// not market data.
PriceList placeholder_prices();

/// `material = price_per_kg` lines; '#' starts a comment. Every material
/// must appear exactly once with a price > 0.
PriceList parse_prices(std::istream& in);
PriceList load_prices(const std::filesystem::path& path);
void write_prices(std::ostream& out, const PriceList& p);

/// Dot product of the first seven entries of `quantities` with the prices.
double procurement_cost(const Eigen::Ref<const Eigen::VectorXd>& quantities, const PriceList& p);

/// Mean procurement cost of rows whose strength is below `threshold`. `m`
/// must carry the material columns in kg/m^3.
double baseline_cost(const DesignMatrix& m, const PriceList& p, double threshold);

struct MixObjectiveConfig {
  double strength_threshold = 30;
  double baseline_cost = 0;
  double strength_reward = 0;
  double cost_reward = 0;
  double deficit_penalty = 0;  // per MPa below the threshold

  /// Rewards of 0.1 x baseline and a penalty slope of 10 x baseline.
  static MixObjectiveConfig with_default_rewards(double threshold, double baseline);
};

/// Strength prediction for an 8-vector in original units: seven materials
/// followed by the water/cement ratio.
using StrengthPredictor = std::function<double(const Eigen::VectorXd&)>;

/// Wraps a fitted model; `pipeline` (if given) standardizes the candidate
/// first, so the model sees the same scale it was trained on.
StrengthPredictor make_strength_predictor(const RegressionModel& model, const FeaturePipeline* pipeline);

struct MixEvaluation {
  Eigen::VectorXd candidate;  // ratio entry overwritten with water / cement
  double predicted_strength = 0;
  double procurement_cost = 0;
  double objective = 0;
};

/// objective = cost - R_s [strength >= threshold] - R_c [cost < baseline]
///             + P max(0, threshold - strength)
MixEvaluation evaluate_mix(const Eigen::VectorXd& x, const StrengthPredictor& model, const MixObjectiveConfig& cfg,
                           const PriceList& p);
double mix_objective(const Eigen::VectorXd& x, const StrengthPredictor& model, const MixObjectiveConfig& cfg,
                     const PriceList& p);

struct MixSolution {
  std::array<double, kMaterialCount> quantities{};
  double water_cement_ratio = 0;
  double predicted_strength = 0;
  double procurement_cost = 0;
  double baseline_cost = 0;
  double cost_vs_baseline = 0;
  double objective = 0;
  double strength_threshold = 0;
  bool feasible = false;
  std::vector<Bounds> bounds;
  std::vector<double> history;
};

struct MixSearchSettings {
  double lo_pct = 5;
  double hi_pct = 95;
};

/// Search box for the 8 variables: per-column percentile bounds over rows
/// with strength >= threshold. A zero-width interval is widened by
/// max(1e-6, 1e-9 |low|) so the swarm box stays valid.
std::vector<Bounds> mix_search_bounds(const DesignMatrix& m, double threshold, const MixSearchSettings& s = {});

/// `m` is the engineered matrix in original units (materials + ratio). The
/// swarm's bounds are replaced by mix_search_bounds; its other settings
/// (particles, iterations, coefficients, seed) are used as given.
MixSolution optimize_mix(const StrengthPredictor& model, const DesignMatrix& m, const PriceList& p,
                         const MixObjectiveConfig& cfg, SwarmConfig swarm, const MixSearchSettings& search = {});

void write_mix_report(std::ostream& out, const MixSolution& s);
void write_mix_csv_header(std::ostream& out);
void write_mix_csv_row(std::ostream& out, const MixSolution& s, std::uint64_t seed);

}  // namespace concrete
