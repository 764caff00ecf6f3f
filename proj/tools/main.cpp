#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "concrete/config.hpp"
#include "concrete/error.hpp"
#include "concrete/experiments.hpp"
#include "concrete/text.hpp"

using namespace concrete;

namespace {

struct Overrides {
  std::string config;
  std::string data;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string model;
  bool no_feature_engineering = false;
  std::optional<double> threshold;
  std::string prices;
  bool accept_placeholder_prices = false;
  bool engineered_only = false;
};

RunConfig build_config(const Overrides& o) {
  RunConfig cfg;
  std::string path = o.config;
  if (path.empty())
    if (const char* env = std::getenv(kConfigEnvVar)) path = env;
  if (!path.empty()) cfg = load_config(path);
  if (!o.data.empty()) cfg.data = o.data;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.model.empty()) {
    cfg.models = {o.model};
    cfg.mix.model = o.model;
    cfg.importance.models = {o.model};
  }
  if (o.no_feature_engineering) cfg.feature_engineering = false;
  if (o.threshold) cfg.mix.threshold = *o.threshold;
  if (!o.prices.empty()) cfg.mix.prices = o.prices;
  if (o.accept_placeholder_prices) cfg.mix.accept_placeholder_prices = true;
  validate(cfg);
  return cfg;
}

void print_train(const TrainReport& r) {
  for (const auto& row : r.rows) {
    std::cout << display_name(row.kind);
    if (r.raw_run) std::cout << "  raw " << format_fixed(row.raw_mean(), 3);
    if (r.engineered_run) std::cout << "  engineered " << format_fixed(row.engineered_mean(), 3);
    if (r.raw_run && r.engineered_run) std::cout << "  improvement " << format_fixed(row.improvement_pct(), 2) << '%';
    std::cout << '\n';
  }
  if (r.raw_run && r.engineered_run)
    std::cout << "mean improvement " << format_fixed(r.mean_improvement_pct(), 2) << "%\n";
}

int run(const std::string& command, const Overrides& o) {
  const RunConfig cfg = build_config(o);
  const PreparedData data = prepare_data(cfg);
  if (command == "train") {
    const auto r = train_models(data, cfg, {!o.engineered_only});
    write_train_outputs(r, data, cfg);
    print_train(r);
    return 0;
  }
  if (command == "fit-abrams") {
    const auto r = fit_abrams_report(data, cfg);
    write_abrams_outputs(r, data, cfg);
    const auto& c = r.fit.coefficients;
    std::cout << "A " << format_fixed(c.A, 4) << "  B " << format_fixed(c.B, 4) << "  rmse "
              << format_fixed(c.fit_rmse, 4) << '\n';
    return 0;
  }
  if (command == "ablation") {
    const auto r = run_ablation(data, cfg);
    write_ablation_outputs(r, cfg);
    std::cout << "full data  dnn " << format_fixed(r.full_data.dnn_mean(), 3) << '\n';
    for (const auto& row : r.rows)
      std::cout << format_fixed(100 * row.reduction, 0) << "%  pinn " << format_fixed(row.pinn_mean(), 3) << "  dnn "
                << format_fixed(row.dnn_mean(), 3) << '\n';
    return 0;
  }
  if (command == "optimize-mix") {
    const auto r = run_mix_optimization(data, cfg);
    write_mix_outputs(r, cfg);
    for (const auto& run : r.runs)
      std::cout << "seed " << run.seed << "  strength " << format_fixed(run.solution.predicted_strength, 2)
                << "  cost " << format_fixed(run.solution.procurement_cost, 3) << "  baseline "
                << format_fixed(run.solution.baseline_cost, 3) << (run.solution.feasible ? "" : "  INFEASIBLE")
                << '\n';
    if (r.feasible_count() == 0) {
      std::cerr << "error: Infeasible: no run reached " << format_fixed(cfg.mix.threshold, 2) << " MPa\n";
      return 3;
    }
    return 0;
  }
  if (command == "importance") {
    const auto r = run_importance(data, cfg);
    write_importance_outputs(r, cfg);
    for (const auto& m : r) {
      std::cout << display_name(m.kind) << ':';
      for (const auto& f : m.report.ranking()) std::cout << ' ' << f;
      std::cout << '\n';
    }
    return 0;
  }
  // reproduce-all; fail on missing prices before any work is done
  resolve_prices(cfg);
  write_dataset_outputs(data, cfg);
  const auto train = train_models(data, cfg);
  write_train_outputs(train, data, cfg);
  const auto abrams = fit_abrams_report(data, cfg);
  write_abrams_outputs(abrams, data, cfg);
  const auto ablation = run_ablation(data, cfg);
  write_ablation_outputs(ablation, cfg);
  const auto mix = run_mix_optimization(data, cfg);
  write_mix_outputs(mix, cfg);
  const auto importance = run_importance(data, cfg);
  write_importance_outputs(importance, cfg);
  write_summary(train, abrams, ablation, mix, importance, data, cfg);
  std::cout << "wrote " << (cfg.output_dir / "summary.md").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concrete compressive strength: models, Abrams' law, mix optimization"};
  app.require_subcommand(1);
  Overrides o;
  std::uint64_t seed = 0;
  double threshold = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON config file (default: $" + std::string(kConfigEnvVar) + ")");
    sub->add_option("--data", o.data, "dataset CSV");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", seed, "base seed");
    sub->add_option("--model", o.model, "linear | random_forest | gradient_boosting | dnn | pinn");
    sub->add_flag("--no-feature-engineering", o.no_feature_engineering, "train on raw features only");
    sub->add_option("--threshold", threshold, "target strength for mix optimization, MPa");
    sub->add_option("--prices", o.prices, "price file, 'material = price_per_kg' lines");
    sub->add_flag("--accept-placeholder-prices", o.accept_placeholder_prices,
                  "use the built-in illustrative prices when no price file is given");
  };
  std::vector<CLI::App*> subs;
  subs.push_back(app.add_subcommand("train", "compare models on raw and engineered features"));
  subs.back()->add_flag("--engineered-only", o.engineered_only, "skip the raw-feature runs");
  subs.push_back(app.add_subcommand("fit-abrams", "fit Abrams' law with particle swarm optimization"));
  subs.push_back(app.add_subcommand("ablation", "PINN vs DNN with reduced training data"));
  subs.push_back(app.add_subcommand("optimize-mix", "cheapest mix meeting a strength threshold"));
  subs.push_back(app.add_subcommand("importance", "permutation feature importance"));
  subs.push_back(app.add_subcommand("reproduce-all", "run every experiment and write summary.md"));
  for (auto* s : subs) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (auto* s : subs) {
    if (!s->parsed()) continue;
    if (s->count("--seed")) o.seed = seed;
    if (s->count("--threshold")) o.threshold = threshold;
    try {
      return run(s->get_name(), o);
    } catch (const Error& e) {
      std::cerr << "error: " << e.code() << ": " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: Internal: " << e.what() << '\n';
      return 2;
    }
  }
  return 1;
}
