#include "concrete/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "concrete/error.hpp"
#include "concrete/metrics.hpp"
#include "concrete/text.hpp"

namespace concrete {

namespace {

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw Error("OutputError", "cannot create " + cfg.output_dir.string() + ": " + ec.message());
  const auto path = cfg.output_dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("OutputError", "cannot write " + path.string());
  return out;
}

std::string fx(double v, int digits = 6) { return format_fixed(v, digits); }

std::vector<ModelKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<ModelKind> out;
  for (const auto& n : names) out.push_back(parse_model_kind(n));
  return out;
}

ReductionSettings reduction_settings(const RunConfig& cfg) {
  ReductionSettings s;
  s.train_fraction = cfg.train_fraction;
  s.dnn = cfg.model.dnn;
  s.abrams_swarm = cfg.abrams.swarm;
  s.physics_weight = cfg.model.physics_weight;
  return s;
}

void write_history(std::ostream& out, const std::vector<EpochRecord>& history) {
  out << "epoch,train_data,train_physics,train_total,val_data,val_physics,val_total\n";
  for (const auto& e : history) {
    out << e.epoch << ',' << fx(e.train.data) << ',' << fx(e.train.physics) << ',' << fx(e.train.total);
    if (e.validation)
      out << ',' << fx(e.validation->data) << ',' << fx(e.validation->physics) << ',' << fx(e.validation->total);
    else
      out << ",,,";
    out << '\n';
  }
}

void write_convergence(std::ostream& out, const std::vector<double>& history) {
  out << "iteration,best_cost\n";
  for (std::size_t i = 0; i < history.size(); ++i) out << i << ',' << fx(history[i]) << '\n';
}

void write_correlations(std::ostream& out, const DesignMatrix& m) {
  out << "feature,correlation\n";
  for (const auto& c : pearson_correlations(m)) out << c.feature << ',' << fx(c.correlation) << '\n';
}

}  // namespace

PreparedData prepare_data(const RunConfig& cfg) {
  PreparedData d;
  d.all = load_csv(cfg.data);
  d.filtered = filter_age(d.all, cfg.age);
  d.raw = make_design_matrix(d.filtered);
  const OutlierRemoval cleaned = remove_outliers(d.raw, cfg.outlier_threshold);
  d.engineered = add_water_cement_ratio(cleaned.matrix);
  d.outliers_removed = cleaned.removed;
  return d;
}

HoldoutRun run_holdout(ModelKind kind, const DesignMatrix& m, bool standardize, std::uint64_t seed,
                       const RunConfig& cfg) {
  const auto parts = split_indices(static_cast<std::size_t>(m.rows()), cfg.train_fraction, seed);
  DesignMatrix train = m.select_rows(parts.train);
  DesignMatrix test = m.select_rows(parts.test);
  std::optional<AbramsCoefficients> abrams;
  if (kind == ModelKind::Pinn) {
    SwarmConfig swarm = cfg.abrams.swarm;
    swarm.seed = seed;
    abrams = fit_abrams(train, swarm).coefficients;
  }
  std::optional<FeaturePipeline> pipeline;
  if (standardize) {
    pipeline = fit_standardizer(train);
    train = transform(*pipeline, train);
    test = transform(*pipeline, test);
  }
  RegressionModel model = fit_model(kind, train, cfg.model, seed, abrams);
  Eigen::VectorXd pred = model.predict(test);
  const double score = rmse(test.target, pred);
  return {std::move(model), std::move(pipeline), abrams, std::move(train), std::move(test), std::move(pred), score};
}

double ComparisonRow::raw_mean() const { return mean_of(raw_rmse); }
double ComparisonRow::engineered_mean() const { return mean_of(engineered_rmse); }

double ComparisonRow::improvement_pct() const {
  if (raw_rmse.empty() || engineered_rmse.empty()) return 0;
  return 100.0 * (raw_mean() - engineered_mean()) / raw_mean();
}

double TrainReport::mean_improvement_pct() const {
  if (rows.empty()) return 0;
  double sum = 0;
  for (const auto& r : rows) sum += r.improvement_pct();
  return sum / static_cast<double>(rows.size());
}

TrainReport train_models(const PreparedData& data, const RunConfig& cfg, const TrainOptions& options) {
  TrainReport report;
  report.seeds = cfg.seeds(cfg.repeats);
  report.outliers_removed = data.outliers_removed;
  report.engineered_run = cfg.feature_engineering;
  report.raw_run = !cfg.feature_engineering || options.compare_raw;
  for (ModelKind kind : parse_kinds(cfg.models)) {
    ComparisonRow row;
    row.kind = kind;
    for (auto seed : report.seeds) {
      if (report.raw_run) row.raw_rmse.push_back(run_holdout(kind, data.raw, false, seed, cfg).test_rmse);
      if (report.engineered_run)
        row.engineered_rmse.push_back(run_holdout(kind, data.engineered, true, seed, cfg).test_rmse);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

AbramsReport fit_abrams_report(const PreparedData& data, const RunConfig& cfg) {
  AbramsReport r;
  r.rows = static_cast<std::size_t>(data.raw.rows());
  r.initial = {cfg.abrams.initial_A, cfg.abrams.initial_B, 0};
  r.initial.fit_rmse =
      rmse(data.raw.target, abrams_strength(r.initial, data.raw.raw_water, data.raw.raw_cement));
  SwarmConfig swarm = cfg.abrams.swarm;
  swarm.seed = cfg.seed;
  r.fit = fit_abrams(data.raw, swarm);
  return r;
}

AblationReport run_ablation(const PreparedData& data, const RunConfig& cfg) {
  if (cfg.ablation.reductions.empty()) throw Error("InvalidConfig", "reduction list is empty");
  AblationReport r;
  r.seeds = cfg.seeds(cfg.ablation.repeats);
  std::vector<double> reductions = {0.0};
  reductions.insert(reductions.end(), cfg.ablation.reductions.begin(), cfg.ablation.reductions.end());
  auto rows = reduced_data_study(data.engineered, reductions, r.seeds, reduction_settings(cfg));
  r.full_data = rows.front();
  r.rows.assign(rows.begin() + 1, rows.end());
  return r;
}

std::size_t MixReport::feasible_count() const {
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [](const MixRun& r) { return r.solution.feasible; }));
}

PriceList resolve_prices(const RunConfig& cfg, bool* placeholder) {
  if (placeholder) *placeholder = false;
  if (cfg.mix.prices) return load_prices(*cfg.mix.prices);
  if (cfg.mix.accept_placeholder_prices) {
    if (placeholder) *placeholder = true;
    return placeholder_prices();
  }
  throw Error("MissingPriceFile",
              "no price file given; pass --prices PATH (lines 'material = price_per_kg') or "
              "--accept-placeholder-prices to use the illustrative built-in list");
}

MixReport run_mix_optimization(const PreparedData& data, const RunConfig& cfg) {
  MixReport report;
  report.prices = resolve_prices(cfg, &report.placeholder_prices);
  report.model = parse_model_kind(cfg.mix.model);
  const double baseline = baseline_cost(data.engineered, report.prices, cfg.mix.threshold);
  MixObjectiveConfig objective;
  objective.strength_threshold = cfg.mix.threshold;
  objective.baseline_cost = baseline;
  objective.strength_reward = cfg.mix.strength_reward_fraction * baseline;
  objective.cost_reward = cfg.mix.cost_reward_fraction * baseline;
  objective.deficit_penalty = cfg.mix.deficit_penalty_fraction * baseline;
  const MixSearchSettings search{cfg.mix.lo_pct, cfg.mix.hi_pct};

  for (auto seed : cfg.seeds(cfg.mix.repeats)) {
    const HoldoutRun fitted = run_holdout(report.model, data.engineered, true, seed, cfg);
    if (report.runs.empty()) report.model_history = fitted.model.history();
    const StrengthPredictor predictor = make_strength_predictor(fitted.model, &*fitted.pipeline);
    SwarmConfig swarm;
    swarm.n_particles = cfg.mix.n_particles;
    swarm.max_iters = cfg.mix.max_iters;
    swarm.seed = seed;
    report.runs.push_back(
        {seed, optimize_mix(predictor, data.engineered, report.prices, objective, swarm, search)});
  }
  return report;
}

std::vector<ModelImportance> run_importance(const PreparedData& data, const RunConfig& cfg) {
  const bool engineered = cfg.importance.feature_engineering;
  const DesignMatrix& m = engineered ? data.engineered : data.raw;
  const auto parts = split_indices(static_cast<std::size_t>(m.rows()), cfg.train_fraction, cfg.seed);
  DesignMatrix train = m.select_rows(parts.train);
  DesignMatrix test = m.select_rows(parts.test);
  if (engineered) {
    const FeaturePipeline p = fit_standardizer(train);
    train = transform(p, train);
    test = transform(p, test);
  }
  std::vector<ModelImportance> out;
  for (ModelKind kind : parse_kinds(cfg.importance.models)) {
    if (kind == ModelKind::Pinn) throw Error("InvalidConfig", "importance does not support the pinn model");
    const ModelFactory factory = [&, kind](const DesignMatrix& t) { return fit_model(kind, t, cfg.model, cfg.seed); };
    out.push_back({kind, permutation_importance(factory, train, test, cfg.importance.n_repeats, cfg.seed,
                                                cfg.importance.variant)});
  }
  return out;
}

void write_train_outputs(const TrainReport& r, const PreparedData& data, const RunConfig& cfg) {
  {
    auto out = open_output(cfg, "model_comparison.csv");
    out << "model,rmse_raw,rmse_engineered,improvement_pct,seeds\n";
    for (const auto& row : r.rows) {
      out << to_string(row.kind) << ',' << (r.raw_run ? fx(row.raw_mean(), 4) : "") << ','
          << (r.engineered_run ? fx(row.engineered_mean(), 4) : "") << ','
          << (r.raw_run && r.engineered_run ? fx(row.improvement_pct(), 2) : "") << ',' << r.seeds.size() << '\n';
    }
  }
  {
    auto out = open_output(cfg, "model_comparison_per_seed.csv");
    out << "model,features,seed,rmse\n";
    for (const auto& row : r.rows) {
      for (std::size_t s = 0; s < row.raw_rmse.size(); ++s)
        out << to_string(row.kind) << ",raw," << r.seeds[s] << ',' << fx(row.raw_rmse[s]) << '\n';
      for (std::size_t s = 0; s < row.engineered_rmse.size(); ++s)
        out << to_string(row.kind) << ",engineered," << r.seeds[s] << ',' << fx(row.engineered_rmse[s]) << '\n';
    }
  }
  // Predicted-vs-actual and loss curves for the first seed.
  const bool engineered = r.engineered_run;
  const DesignMatrix& m = engineered ? data.engineered : data.raw;
  for (const auto& row : r.rows) {
    const HoldoutRun run = run_holdout(row.kind, m, engineered, cfg.seed, cfg);
    auto out = open_output(cfg, "predictions_" + to_string(row.kind) + ".csv");
    out << "actual,predicted\n";
    for (Eigen::Index i = 0; i < run.test.rows(); ++i)
      out << fx(run.test.target(i), 4) << ',' << fx(run.predictions(i), 4) << '\n';
    if (!run.model.history().empty()) {
      auto h = open_output(cfg, "loss_history_" + to_string(row.kind) + ".csv");
      write_history(h, run.model.history());
    }
  }
}

void write_abrams_outputs(const AbramsReport& r, const PreparedData& data, const RunConfig& cfg) {
  {
    auto out = open_output(cfg, "abrams.csv");
    out << "label,A,B,rmse,rows\n";
    out << "initial," << fx(r.initial.A) << ',' << fx(r.initial.B) << ',' << fx(r.initial.fit_rmse) << ','
        << r.rows << '\n';
    const auto& c = r.fit.coefficients;
    out << "fitted," << fx(c.A) << ',' << fx(c.B) << ',' << fx(c.fit_rmse) << ',' << r.rows << '\n';
  }
  {
    auto out = open_output(cfg, "abrams_convergence.csv");
    write_convergence(out, r.fit.history);
  }
  {
    auto out = open_output(cfg, "abrams_curve.csv");
    out << "water_cement_ratio,strength,abrams_strength\n";
    std::vector<Eigen::Index> order(static_cast<std::size_t>(data.raw.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const Eigen::VectorXd ratio = data.raw.raw_water.cwiseQuotient(data.raw.raw_cement);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return ratio(a) < ratio(b); });
    for (auto i : order)
      out << fx(ratio(i)) << ',' << fx(data.raw.target(i), 4) << ','
          << fx(abrams_strength(r.fit.coefficients, data.raw.raw_water(i), data.raw.raw_cement(i)), 4) << '\n';
  }
}

void write_ablation_outputs(const AblationReport& r, const RunConfig& cfg) {
  auto row_line = [&](std::ostream& out, const ReductionRow& row) {
    out << fx(100.0 * row.reduction, 1) << ',' << fx(row.pinn_mean(), 4) << ',' << fx(row.pinn_std(), 4) << ','
        << fx(row.dnn_mean(), 4) << ',' << fx(row.dnn_std(), 4) << ',' << r.seeds.size() << ','
        << row.train_rows << '\n';
  };
  const char* header = "reduction_pct,pinn_rmse_mean,pinn_rmse_std,dnn_rmse_mean,dnn_rmse_std,seeds,train_rows\n";
  {
    auto out = open_output(cfg, "reduced_data.csv");
    out << header;
    for (const auto& row : r.rows) row_line(out, row);
  }
  {
    auto out = open_output(cfg, "reduced_data_full.csv");
    out << header;
    row_line(out, r.full_data);
  }
}

void write_mix_outputs(const MixReport& r, const RunConfig& cfg) {
  {
    auto out = open_output(cfg, "mix_solutions.csv");
    write_mix_csv_header(out);
    for (const auto& run : r.runs) write_mix_csv_row(out, run.solution, run.seed);
  }
  if (r.runs.empty()) return;
  const MixSolution& first = r.runs.front().solution;
  {
    auto out = open_output(cfg, "mix_solution.txt");
    out << "model: " << to_string(r.model) << '\n';
    out << "prices: " << (r.placeholder_prices ? "placeholder (illustrative)" : "from file") << '\n';
    out << "feasible runs: " << r.feasible_count() << " of " << r.runs.size() << "\n\n";
    out << "seed " << r.runs.front().seed << ":\n";
    write_mix_report(out, first);
  }
  {
    auto out = open_output(cfg, "mix_convergence.csv");
    write_convergence(out, first.history);
  }
  {
    auto out = open_output(cfg, "mix_bounds.csv");
    out << "variable,low,high\n";
    for (std::size_t k = 0; k < first.bounds.size(); ++k) {
      const std::string name = k < kMaterialCount ? std::string(material_name(static_cast<Material>(k)))
                                                  : std::string(kWaterCementRatio);
      out << name << ',' << fx(first.bounds[k].low) << ',' << fx(first.bounds[k].high) << '\n';
    }
  }
  if (!r.model_history.empty()) {
    auto out = open_output(cfg, "loss_history_" + to_string(r.model) + ".csv");
    write_history(out, r.model_history);
  }
  {
    auto out = open_output(cfg, "prices_used.txt");
    write_prices(out, r.prices);
  }
}

void write_importance_outputs(const std::vector<ModelImportance>& r, const RunConfig& cfg) {
  for (const auto& m : r) {
    auto out = open_output(cfg, "importance_" + to_string(m.kind) + ".csv");
    write_importance_csv(out, m.report);
  }
}

void write_dataset_outputs(const PreparedData& data, const RunConfig& cfg) {
  {
    std::map<int, std::size_t> counts;
    for (const auto& rec : data.all.records) ++counts[rec.age];
    auto out = open_output(cfg, "age_distribution.csv");
    out << "age_days,count\n";
    for (const auto& [age, n] : counts) out << age << ',' << n << '\n';
  }
  {
    auto out = open_output(cfg, "correlations_raw.csv");
    write_correlations(out, data.raw);
  }
  {
    auto out = open_output(cfg, "correlations_engineered.csv");
    write_correlations(out, data.engineered);
  }
  {
    const int sp = data.raw.column_index("superplastic");
    const int w = data.raw.column_index("water");
    auto out = open_output(cfg, "superplastic_water.csv");
    out << "superplastic,water,strength\n";
    for (Eigen::Index i = 0; i < data.raw.rows(); ++i)
      out << fx(data.raw.values(i, sp), 4) << ',' << fx(data.raw.values(i, w), 4) << ','
          << fx(data.raw.target(i), 4) << '\n';
  }
  {
    const int ratio = data.engineered.column_index(kWaterCementRatio);
    auto out = open_output(cfg, "strength_vs_ratio.csv");
    out << "water_cement_ratio,strength\n";
    for (Eigen::Index i = 0; i < data.engineered.rows(); ++i)
      out << fx(data.engineered.values(i, ratio)) << ',' << fx(data.engineered.target(i), 4) << '\n';
  }
  {
    // Histogram of standardized strength in half-sigma bins.
    const double mu = population_mean(data.engineered.target);
    const double sd = population_std(data.engineered.target);
    std::map<int, std::size_t> bins;
    for (Eigen::Index i = 0; i < data.engineered.rows(); ++i)
      ++bins[static_cast<int>(std::floor((data.engineered.target(i) - mu) / sd / 0.5))];
    auto out = open_output(cfg, "strength_standardized_hist.csv");
    out << "bin_low,bin_high,count\n";
    for (const auto& [b, n] : bins) out << fx(0.5 * b, 1) << ',' << fx(0.5 * (b + 1), 1) << ',' << n << '\n';
  }
}

void write_summary(const TrainReport& train, const AbramsReport& abrams, const AblationReport& ablation,
                   const MixReport& mix, const std::vector<ModelImportance>& importance, const PreparedData& data,
                   const RunConfig& cfg) {
  auto out = open_output(cfg, "summary.md");
  out << "# Concrete strength reproduction\n\n";
  out << "Records: " << data.all.records.size() << " total, " << data.filtered.records.size() << " at age "
      << cfg.age << " days, " << data.outliers_removed << " removed as outliers (|z| >= "
      << fx(cfg.outlier_threshold, 1) << ").\n\n";

  out << "## Model comparison (test RMSE, MPa, mean of " << train.seeds.size() << " seeds)\n\n";
  out << "| Model | Raw features | Engineered features | Improvement |\n|---|---|---|---|\n";
  for (const auto& row : train.rows)
    out << "| " << display_name(row.kind) << " | " << fx(row.raw_mean(), 3) << " | " << fx(row.engineered_mean(), 3)
        << " | " << fx(row.improvement_pct(), 1) << "% |\n";
  out << "\nMean improvement: " << fx(train.mean_improvement_pct(), 2) << "%\n\n";

  const auto& c = abrams.fit.coefficients;
  out << "## Abrams' law\n\n";
  out << "RMSE at A = " << fx(abrams.initial.A, 2) << ", B = " << fx(abrams.initial.B, 2) << ": "
      << fx(abrams.initial.fit_rmse, 3) << " MPa\n\n";
  out << "Fitted A = " << fx(c.A, 3) << " MPa, B = " << fx(c.B, 4) << ", RMSE = " << fx(c.fit_rmse, 3)
      << " MPa over " << abrams.rows << " records\n\n";

  out << "## Reduced training data (test RMSE, MPa, mean of " << ablation.seeds.size() << " seeds)\n\n";
  out << "| Reduction | PINN | DNN | Training rows |\n|---|---|---|---|\n";
  auto ablation_row = [&](const ReductionRow& row) {
    out << "| " << fx(100.0 * row.reduction, 0) << "% | " << fx(row.pinn_mean(), 3) << " +/- " << fx(row.pinn_std(), 3)
        << " | " << fx(row.dnn_mean(), 3) << " +/- " << fx(row.dnn_std(), 3) << " | " << row.train_rows << " |\n";
  };
  ablation_row(ablation.full_data);
  for (const auto& row : ablation.rows) ablation_row(row);

  out << "\n## Mix optimization (threshold " << fx(cfg.mix.threshold, 1) << " MPa, " << to_string(mix.model)
      << ", " << (mix.placeholder_prices ? "placeholder prices" : "prices from file") << ")\n\n";
  out << "| Seed | Strength | Cost | Baseline | Cost vs baseline | Feasible |\n|---|---|---|---|---|---|\n";
  for (const auto& run : mix.runs) {
    const auto& s = run.solution;
    out << "| " << run.seed << " | " << fx(s.predicted_strength, 2) << " | " << fx(s.procurement_cost, 3) << " | "
        << fx(s.baseline_cost, 3) << " | " << fx(100.0 * s.cost_vs_baseline, 1) << "% | "
        << (s.feasible ? "yes" : "no") << " |\n";
  }

  out << "\n## Permutation importance (" << to_string(cfg.importance.variant) << ")\n\n";
  for (const auto& m : importance) {
    out << display_name(m.kind) << ": ";
    const auto ranking = m.report.ranking();
    for (std::size_t k = 0; k < ranking.size(); ++k) out << (k ? ", " : "") << ranking[k];
    out << '\n';
  }
}

}  // namespace concrete
