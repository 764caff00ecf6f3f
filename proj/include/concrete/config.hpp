#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "concrete/importance.hpp"
#include "concrete/model.hpp"
#include "concrete/swarm.hpp"

namespace concrete {

struct AbramsSettings {
  SwarmConfig swarm = default_abrams_swarm();
  double initial_A = 10;  // reference point reported next to the fit
  double initial_B = 4;
};

struct AblationSettings {
  std::vector<double> reductions = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  int repeats = 3;
};

struct MixSettings {
  double threshold = 30;
  std::optional<std::filesystem::path> prices;
  bool accept_placeholder_prices = false;
  std::string model = "pinn";
  int repeats = 5;
  double lo_pct = 5;
  double hi_pct = 95;
  double strength_reward_fraction = 0.1;  // of baseline cost
  double cost_reward_fraction = 0.1;
  double deficit_penalty_fraction = 10.0;  // of baseline cost, per MPa
  std::size_t n_particles = 40;
  int max_iters = 200;
};

struct ImportanceSettings {
  std::vector<std::string> models = {"linear", "random_forest", "gradient_boosting"};
  int n_repeats = 5;
  ImportanceVariant variant = ImportanceVariant::Retrain;
  bool feature_engineering = false;
};

/// Everything a command needs. Defaults reproduce the published workflow.
struct RunConfig {
  std::filesystem::path data = "data/concrete.csv";
  int age = 28;
  double train_fraction = 0.9;
  std::uint64_t seed = 0;
  int repeats = 5;  // seeds seed, seed + 1, ... for the model comparison
  bool feature_engineering = true;
  double outlier_threshold = 3.0;
  std::vector<std::string> models = {"linear", "random_forest", "gradient_boosting", "dnn"};
  ModelSettings model;
  AbramsSettings abrams;
  AblationSettings ablation;
  MixSettings mix;
  ImportanceSettings importance;
  std::filesystem::path output_dir = "out";

  std::vector<std::uint64_t> seeds(int count) const;
};

/// Reads a JSON config; absent keys keep their defaults, unknown keys are
/// rejected. Relative paths are resolved against the config file's folder.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});

/// Checks numeric ranges and that referenced files exist.
void validate(const RunConfig& cfg);

/// Name of the environment variable holding the default config path.
inline constexpr const char* kConfigEnvVar = "CONCRETE_CONFIG";

}  // namespace concrete
