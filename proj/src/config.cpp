#include "concrete/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "concrete/error.hpp"

namespace concrete {

using nlohmann::json;

namespace {

// Reads keys of `j` into targets, rejecting keys not listed.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw Error("InvalidConfig", "'" + name_ + "' must be an object");
  }

  void done() const {
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) throw Error("InvalidConfig", "unknown key '" + prefix() + key + "'");
  }

  template <typename T>
  void read(const std::string& key, T& target) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      target = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error("InvalidConfig", "'" + prefix() + key + "': " + e.what());
    }
  }

  void read_path(const std::string& key, std::filesystem::path& target, const std::filesystem::path& base) {
    std::string s;
    read(key, s);
    if (!s.empty()) target = resolve(s, base);
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string prefix() const { return name_.empty() ? "" : name_ + "."; }

  static std::filesystem::path resolve(const std::string& s, const std::filesystem::path& base) {
    std::filesystem::path p(s);
    return p.is_relative() && !base.empty() ? base / p : p;
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

void read_bounds(Section& s, const std::string& key, Bounds& b) {
  std::vector<double> pair;
  s.read(key, pair);
  if (pair.empty()) return;
  if (pair.size() != 2) throw Error("InvalidConfig", "'" + s.prefix() + key + "' must be [low, high]");
  b = {pair[0], pair[1]};
}

}  // namespace

std::vector<std::uint64_t> RunConfig::seeds(int count) const {
  std::vector<std::uint64_t> out;
  for (int k = 0; k < count; ++k) out.push_back(seed + static_cast<std::uint64_t>(k));
  return out;
}

RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error("InvalidConfig", std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  Section top(root, "");
  top.read_path("data", cfg.data, base_dir);
  top.read("age", cfg.age);
  top.read("train_fraction", cfg.train_fraction);
  top.read("seed", cfg.seed);
  top.read("repeats", cfg.repeats);
  top.read("feature_engineering", cfg.feature_engineering);
  top.read("outlier_threshold", cfg.outlier_threshold);
  top.read("models", cfg.models);
  top.read_path("output_dir", cfg.output_dir, base_dir);

  if (const json* j = top.child("random_forest")) {
    Section s(*j, "random_forest");
    s.read("n_estimators", cfg.model.forest.n_estimators);
    s.read("max_depth", cfg.model.forest.max_depth);
    s.done();
  }
  if (const json* j = top.child("gradient_boosting")) {
    Section s(*j, "gradient_boosting");
    s.read("n_estimators", cfg.model.boosting.n_estimators);
    s.read("learning_rate", cfg.model.boosting.learning_rate);
    s.read("max_depth", cfg.model.boosting.max_depth);
    s.read("min_samples_split", cfg.model.boosting.min_samples_split);
    s.done();
  }
  if (const json* j = top.child("dnn")) {
    Section s(*j, "dnn");
    s.read("epochs", cfg.model.dnn.epochs);
    s.read("validation_split", cfg.model.dnn.validation_split);
    s.read("learning_rate", cfg.model.dnn.learning_rate);
    s.read("batch_size", cfg.model.dnn.batch_size);
    s.read("hidden", cfg.model.dnn.hidden);
    std::string activation = to_string(cfg.model.dnn.activation);
    s.read("activation", activation);
    cfg.model.dnn.activation = parse_activation(activation);
    s.done();
  }
  if (const json* j = top.child("pinn")) {
    Section s(*j, "pinn");
    s.read("physics_weight", cfg.model.physics_weight);
    s.done();
  }
  if (const json* j = top.child("abrams")) {
    Section s(*j, "abrams");
    s.read("n_particles", cfg.abrams.swarm.n_particles);
    s.read("max_iters", cfg.abrams.swarm.max_iters);
    s.read("inertia", cfg.abrams.swarm.inertia);
    s.read("cognitive", cfg.abrams.swarm.cognitive);
    s.read("social", cfg.abrams.swarm.social);
    read_bounds(s, "A_bounds", cfg.abrams.swarm.bounds.at(0));
    read_bounds(s, "B_bounds", cfg.abrams.swarm.bounds.at(1));
    s.read("initial_A", cfg.abrams.initial_A);
    s.read("initial_B", cfg.abrams.initial_B);
    s.done();
  }
  if (const json* j = top.child("ablation")) {
    Section s(*j, "ablation");
    s.read("reductions", cfg.ablation.reductions);
    s.read("repeats", cfg.ablation.repeats);
    s.done();
  }
  if (const json* j = top.child("mix")) {
    Section s(*j, "mix");
    s.read("threshold", cfg.mix.threshold);
    std::filesystem::path prices;
    s.read_path("prices", prices, base_dir);
    if (!prices.empty()) cfg.mix.prices = prices;
    s.read("accept_placeholder_prices", cfg.mix.accept_placeholder_prices);
    s.read("model", cfg.mix.model);
    s.read("repeats", cfg.mix.repeats);
    s.read("lo_pct", cfg.mix.lo_pct);
    s.read("hi_pct", cfg.mix.hi_pct);
    s.read("strength_reward_fraction", cfg.mix.strength_reward_fraction);
    s.read("cost_reward_fraction", cfg.mix.cost_reward_fraction);
    s.read("deficit_penalty_fraction", cfg.mix.deficit_penalty_fraction);
    s.read("n_particles", cfg.mix.n_particles);
    s.read("max_iters", cfg.mix.max_iters);
    s.done();
  }
  if (const json* j = top.child("importance")) {
    Section s(*j, "importance");
    s.read("models", cfg.importance.models);
    s.read("n_repeats", cfg.importance.n_repeats);
    std::string variant = to_string(cfg.importance.variant);
    s.read("variant", variant);
    cfg.importance.variant = parse_importance_variant(variant);
    s.read("feature_engineering", cfg.importance.feature_engineering);
    s.done();
  }
  top.done();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("FileNotFound", "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

void validate(const RunConfig& cfg) {
  if (!std::filesystem::exists(cfg.data)) throw Error("FileNotFound", "dataset not found: " + cfg.data.string());
  if (cfg.age < 1 || cfg.age > 365) throw Error("InvalidConfig", "age must lie in [1, 365]");
  if (!(cfg.train_fraction > 0 && cfg.train_fraction < 1))
    throw Error("InvalidConfig", "train_fraction must lie in (0, 1)");
  if (cfg.repeats < 1 || cfg.ablation.repeats < 1 || cfg.mix.repeats < 1 || cfg.importance.n_repeats < 1)
    throw Error("InvalidConfig", "repeat counts must be >= 1");
  if (!(cfg.outlier_threshold > 0)) throw Error("InvalidConfig", "outlier_threshold must be > 0");
  if (cfg.models.empty()) throw Error("InvalidConfig", "model list is empty");
  for (const auto& m : cfg.models) parse_model_kind(m);
  for (const auto& m : cfg.importance.models) parse_model_kind(m);
  parse_model_kind(cfg.mix.model);
  validate(cfg.abrams.swarm);
  if (cfg.ablation.reductions.empty()) throw Error("InvalidConfig", "ablation reduction list is empty");
  for (double r : cfg.ablation.reductions)
    if (!(r >= 0 && r <= 0.9)) throw Error("InvalidConfig", "ablation reductions must lie in [0, 0.9]");
  if (!(cfg.mix.threshold >= 0)) throw Error("InvalidConfig", "mix threshold must be >= 0");
  if (cfg.mix.prices && !std::filesystem::exists(*cfg.mix.prices))
    throw Error("MissingPriceFile", "price file not found: " + cfg.mix.prices->string());
  if (!(cfg.mix.lo_pct >= 0 && cfg.mix.lo_pct <= cfg.mix.hi_pct && cfg.mix.hi_pct <= 100))
    throw Error("InvalidConfig", "mix percentiles must satisfy 0 <= lo <= hi <= 100");
  if (!(cfg.model.physics_weight >= 0)) throw Error("InvalidConfig", "physics_weight must be >= 0");
}

}  // namespace concrete
