#include "concrete/mixopt.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "concrete/error.hpp"
#include "concrete/model.hpp"
#include "concrete/text.hpp"

namespace concrete {

namespace {

constexpr std::size_t kMixDims = kMaterialCount + 1;
constexpr Eigen::Index kCement = 0;
constexpr Eigen::Index kWater = 3;

std::array<int, kMaterialCount> material_columns(const DesignMatrix& m) {
  std::array<int, kMaterialCount> idx{};
  for (std::size_t k = 0; k < kMaterialCount; ++k) {
    idx[k] = m.column_index(kSchemaColumns[k]);
    if (idx[k] < 0)
      throw DataError("MissingColumn", "design matrix lacks column '" + std::string(kSchemaColumns[k]) + "'", 0,
                      std::string(kSchemaColumns[k]));
  }
  return idx;
}

}  // namespace

PriceList placeholder_prices() {
  PriceList p;
  p.per_kg = {0.12, 0.06, 0.05, 0.01, 0.10, 0.008, 0.007};
  return p;
}

PriceList parse_prices(std::istream& in) {
  PriceList p;
  std::array<bool, kMaterialCount> seen{};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string content = line.substr(0, line.find('#'));
    const auto t = trim(content);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw DataError("ParseError", "price file line " + std::to_string(line_no) + ": expected 'material = price'",
                      line_no);
    const std::string key = to_lower(trim(t.substr(0, eq)));
    const std::string value(trim(t.substr(eq + 1)));
    std::size_t k = 0;
    while (k < kMaterialCount && kSchemaColumns[k] != key) ++k;
    if (k == kMaterialCount)
      throw DataError("ParseError", "price file line " + std::to_string(line_no) + ": unknown material '" + key + "'",
                      line_no, key);
    if (seen[k]) throw DataError("ParseError", "price for '" + key + "' given twice", line_no, key);
    char* end = nullptr;
    const double price = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0' || !(price > 0) || !std::isfinite(price))
      throw DataError("InvalidPrice", "price for '" + key + "' must be a number > 0", line_no, key);
    p.per_kg[k] = price;
    seen[k] = true;
  }
  for (std::size_t k = 0; k < kMaterialCount; ++k)
    if (!seen[k])
      throw DataError("MissingPrice", "price file has no entry for '" + std::string(kSchemaColumns[k]) + "'", 0,
                      std::string(kSchemaColumns[k]));
  return p;
}

PriceList load_prices(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("MissingPriceFile", "cannot open price file " + path.string());
  return parse_prices(in);
}

void write_prices(std::ostream& out, const PriceList& p) {
  for (std::size_t k = 0; k < kMaterialCount; ++k)
    out << kSchemaColumns[k] << " = " << format_number(p.per_kg[k]) << '\n';
}

double procurement_cost(const Eigen::Ref<const Eigen::VectorXd>& quantities, const PriceList& p) {
  if (quantities.size() < static_cast<Eigen::Index>(kMaterialCount))
    throw Error("LengthMismatch", "procurement_cost needs seven quantities");
  double cost = 0;
  for (std::size_t k = 0; k < kMaterialCount; ++k) cost += quantities(static_cast<Eigen::Index>(k)) * p.per_kg[k];
  return cost;
}

double baseline_cost(const DesignMatrix& m, const PriceList& p, double threshold) {
  const auto idx = material_columns(m);
  double total = 0;
  std::size_t count = 0;
  Eigen::VectorXd q(static_cast<Eigen::Index>(kMaterialCount));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!(m.target(i) < threshold)) continue;
    for (std::size_t k = 0; k < kMaterialCount; ++k) q(static_cast<Eigen::Index>(k)) = m.values(i, idx[k]);
    total += procurement_cost(q, p);
    ++count;
  }
  if (count == 0) throw DataError("EmptySubset", "no rows with strength below " + format_number(threshold));
  return total / static_cast<double>(count);
}

MixObjectiveConfig MixObjectiveConfig::with_default_rewards(double threshold, double baseline) {
  if (!(threshold >= 0) || !(baseline > 0))
    throw Error("InvalidConfig", "threshold must be >= 0 and baseline cost > 0");
  MixObjectiveConfig c;
  c.strength_threshold = threshold;
  c.baseline_cost = baseline;
  c.strength_reward = 0.1 * baseline;
  c.cost_reward = 0.1 * baseline;
  c.deficit_penalty = 10.0 * baseline;
  return c;
}

StrengthPredictor make_strength_predictor(const RegressionModel& model, const FeaturePipeline* pipeline) {
  return [&model, pipeline](const Eigen::VectorXd& x) {
    Eigen::RowVectorXd row = x.transpose();
    if (pipeline) row = transform_row(*pipeline, row);
    return model.predict(Eigen::MatrixXd(row))(0);
  };
}

MixEvaluation evaluate_mix(const Eigen::VectorXd& x, const StrengthPredictor& model, const MixObjectiveConfig& cfg,
                           const PriceList& p) {
  if (x.size() != static_cast<Eigen::Index>(kMixDims)) throw Error("LengthMismatch", "mix candidate needs 8 entries");
  if (!(x(kCement) > 0)) throw Error("ZeroCement", "mix candidate has no cement");
  MixEvaluation e;
  e.candidate = x;
  e.candidate(kMixDims - 1) = x(kWater) / x(kCement);
  e.predicted_strength = model(e.candidate);
  e.procurement_cost = procurement_cost(e.candidate, p);
  double objective = e.procurement_cost;
  if (e.predicted_strength >= cfg.strength_threshold) objective -= cfg.strength_reward;
  if (e.procurement_cost < cfg.baseline_cost) objective -= cfg.cost_reward;
  objective += cfg.deficit_penalty * std::max(0.0, cfg.strength_threshold - e.predicted_strength);
  e.objective = objective;
  return e;
}

double mix_objective(const Eigen::VectorXd& x, const StrengthPredictor& model, const MixObjectiveConfig& cfg,
                     const PriceList& p) {
  return evaluate_mix(x, model, cfg, p).objective;
}

std::vector<Bounds> mix_search_bounds(const DesignMatrix& m, double threshold, const MixSearchSettings& s) {
  if (m.cols() != static_cast<Eigen::Index>(kMixDims) || m.column_index(kWaterCementRatio) != 7)
    throw Error("ColumnMismatch", "mix search needs the seven materials followed by water_cement_ratio");
  material_columns(m);
  auto bounds = percentile_bounds(m, threshold, s.lo_pct, s.hi_pct);
  for (auto& b : bounds)
    if (!(b.low < b.high)) b.high = b.low + std::max(1e-6, 1e-9 * std::abs(b.low));
  if (!(bounds[kCement].low > 0)) throw Error("ZeroCement", "cement lower bound must be > 0");
  return bounds;
}

MixSolution optimize_mix(const StrengthPredictor& model, const DesignMatrix& m, const PriceList& p,
                         const MixObjectiveConfig& cfg, SwarmConfig swarm, const MixSearchSettings& search) {
  swarm.bounds = mix_search_bounds(m, cfg.strength_threshold, search);
  const SwarmResult r = minimize(swarm, [&](const Eigen::VectorXd& x) { return mix_objective(x, model, cfg, p); });
  const MixEvaluation best = evaluate_mix(r.best_position, model, cfg, p);

  MixSolution s;
  for (std::size_t k = 0; k < kMaterialCount; ++k) s.quantities[k] = best.candidate(static_cast<Eigen::Index>(k));
  s.water_cement_ratio = best.candidate(kMixDims - 1);
  s.predicted_strength = best.predicted_strength;
  s.procurement_cost = best.procurement_cost;
  s.baseline_cost = cfg.baseline_cost;
  s.cost_vs_baseline = best.procurement_cost / cfg.baseline_cost;
  s.objective = best.objective;
  s.strength_threshold = cfg.strength_threshold;
  s.feasible = best.predicted_strength >= cfg.strength_threshold;
  s.bounds = swarm.bounds;
  s.history = r.history;
  return s;
}

void write_mix_report(std::ostream& out, const MixSolution& s) {
  out << "Proposed mix (kg/m^3)\n";
  for (std::size_t k = 0; k < kMaterialCount; ++k) {
    out << "  " << kSchemaColumns[k];
    for (std::size_t pad = kSchemaColumns[k].size(); pad < 14; ++pad) out << ' ';
    out << format_fixed(s.quantities[k], 2) << "   [" << format_fixed(s.bounds[k].low, 2) << ", "
        << format_fixed(s.bounds[k].high, 2) << "]\n";
  }
  out << "  water/cement  " << format_fixed(s.water_cement_ratio, 4) << '\n';
  out << "Predicted strength: " << format_fixed(s.predicted_strength, 2) << " MPa (threshold "
      << format_fixed(s.strength_threshold, 2) << ")\n";
  out << "Procurement cost:   " << format_fixed(s.procurement_cost, 4) << '\n';
  out << "Baseline cost:      " << format_fixed(s.baseline_cost, 4) << '\n';
  out << "Cost vs baseline:   " << format_fixed(100.0 * s.cost_vs_baseline, 2) << "%\n";
  out << "Status:             " << (s.feasible ? "feasible" : "INFEASIBLE") << '\n';
}

void write_mix_csv_header(std::ostream& out) {
  out << "seed";
  for (auto c : std::span(kSchemaColumns.data(), kMaterialCount)) out << ',' << c;
  out << ",water_cement_ratio,predicted_strength,procurement_cost,baseline_cost,cost_vs_baseline,objective,feasible\n";
}

void write_mix_csv_row(std::ostream& out, const MixSolution& s, std::uint64_t seed) {
  out << seed;
  for (double q : s.quantities) out << ',' << format_fixed(q, 4);
  out << ',' << format_fixed(s.water_cement_ratio, 6) << ',' << format_fixed(s.predicted_strength, 4) << ','
      << format_fixed(s.procurement_cost, 6) << ',' << format_fixed(s.baseline_cost, 6) << ','
      << format_fixed(s.cost_vs_baseline, 6) << ',' << format_fixed(s.objective, 6) << ','
      << (s.feasible ? 1 : 0) << '\n';
}

}  // namespace concrete
