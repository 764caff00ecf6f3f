#include <doctest.h>

#include "concrete/config.hpp"
#include "concrete/error.hpp"
#include "support.hpp"

using namespace concrete;

namespace {

std::filesystem::path source_dir() { return CONCRETE_SOURCE_DIR; }

RunConfig valid_config() {
  RunConfig c;
  c.data = testing::dataset_path();
  return c;
}

}  // namespace

TEST_CASE("empty object keeps defaults") {
  const RunConfig c = parse_config("{}");
  const RunConfig d;
  CHECK_EQ(c.age, 28);
  CHECK_EQ(c.train_fraction, 0.9);
  CHECK_EQ(c.models, d.models);
  CHECK_EQ(c.model.forest.n_estimators, d.model.forest.n_estimators);
  CHECK_EQ(c.model.dnn.hidden, d.model.dnn.hidden);
  CHECK_EQ(c.ablation.reductions, d.ablation.reductions);
  CHECK_FALSE(c.mix.prices.has_value());
  CHECK_FALSE(c.mix.accept_placeholder_prices);
  CHECK_EQ(c.seeds(3), std::vector<std::uint64_t>{0, 1, 2});
}

TEST_CASE("overrides") {
  const RunConfig c = parse_config(R"({
    "seed": 7, "repeats": 2, "feature_engineering": false, "models": ["linear"],
    "dnn": {"epochs": 3, "hidden": [8], "activation": "tanh"},
    "abrams": {"A_bounds": [5, 50], "max_iters": 10},
    "mix": {"threshold": 40, "model": "dnn"},
    "importance": {"variant": "no_retrain", "n_repeats": 2}
  })");
  CHECK_EQ(c.seed, 7);
  CHECK_EQ(c.seeds(2), std::vector<std::uint64_t>{7, 8});
  CHECK_FALSE(c.feature_engineering);
  CHECK_EQ(c.models, std::vector<std::string>{"linear"});
  CHECK_EQ(c.model.dnn.epochs, 3);
  CHECK_EQ(c.model.dnn.hidden, std::vector<int>{8});
  CHECK_EQ(c.model.dnn.activation, Activation::Tanh);
  CHECK_EQ(c.abrams.swarm.bounds[0].low, 5);
  CHECK_EQ(c.abrams.swarm.bounds[0].high, 50);
  CHECK_EQ(c.abrams.swarm.max_iters, 10);
  CHECK_EQ(c.mix.threshold, 40);
  CHECK_EQ(c.mix.model, "dnn");
  CHECK_EQ(c.importance.variant, ImportanceVariant::NoRetrain);
}

TEST_CASE("malformed input is rejected") {
  CHECK_ERROR_CODE(parse_config("{"), "InvalidConfig");
  CHECK_ERROR_CODE(parse_config(R"({"seeds": 3})"), "InvalidConfig");
  CHECK_ERROR_CODE(parse_config(R"({"dnn": {"epoch": 3}})"), "InvalidConfig");
  CHECK_ERROR_CODE(parse_config(R"({"age": "old"})"), "InvalidConfig");
  CHECK_ERROR_CODE(parse_config(R"({"dnn": 4})"), "InvalidConfig");
  CHECK_ERROR_CODE(parse_config(R"({"abrams": {"A_bounds": [1, 2, 3]}})"), "InvalidConfig");
  CHECK_ERROR_CODE(parse_config(R"({"importance": {"variant": "drop"}})"), "InvalidConfig");
  CHECK_ERROR_CODE(load_config("/nonexistent/config.json"), "FileNotFound");
}

TEST_CASE("relative paths resolve against the config folder") {
  const RunConfig c = parse_config(R"({"data": "d/x.csv", "output_dir": "/abs/out", "mix": {"prices": "p.txt"}})",
                                   "/etc/conf");
  CHECK_EQ(c.data, std::filesystem::path("/etc/conf/d/x.csv"));
  CHECK_EQ(c.output_dir, std::filesystem::path("/abs/out"));
  CHECK_EQ(*c.mix.prices, std::filesystem::path("/etc/conf/p.txt"));
}

TEST_CASE("shipped default config loads and validates") {
  const RunConfig c = load_config(source_dir() / "config" / "default.json");
  CHECK_NOTHROW(validate(c));
  CHECK(std::filesystem::exists(c.data));
  CHECK_FALSE(c.mix.prices.has_value());
  CHECK_EQ(c.model.forest.max_depth, 3);
  CHECK_EQ(c.model.boosting.n_estimators, 100);
  CHECK_EQ(c.abrams.swarm.bounds[1].low, 1.01);
}

TEST_CASE("validation") {
  CHECK_NOTHROW(validate(valid_config()));
  auto fails_with = [](auto mutate, const char* code) {
    RunConfig c = valid_config();
    mutate(c);
    CHECK_ERROR_CODE(validate(c), code);
  };
  fails_with([](RunConfig& c) { c.data = "/nonexistent.csv"; }, "FileNotFound");
  fails_with([](RunConfig& c) { c.age = 0; }, "InvalidConfig");
  fails_with([](RunConfig& c) { c.train_fraction = 1.0; }, "InvalidConfig");
  fails_with([](RunConfig& c) { c.repeats = 0; }, "InvalidConfig");
  fails_with([](RunConfig& c) { c.models.clear(); }, "InvalidConfig");
  fails_with([](RunConfig& c) { c.models = {"svm"}; }, "UnknownModel");
  fails_with([](RunConfig& c) { c.mix.model = "svm"; }, "UnknownModel");
  fails_with([](RunConfig& c) { c.ablation.reductions.clear(); }, "InvalidConfig");
  fails_with([](RunConfig& c) { c.ablation.reductions = {0.95}; }, "InvalidConfig");
  fails_with([](RunConfig& c) { c.mix.prices = "/nonexistent/prices.txt"; }, "MissingPriceFile");
  fails_with([](RunConfig& c) { c.mix.lo_pct = 60; c.mix.hi_pct = 40; }, "InvalidConfig");
  fails_with([](RunConfig& c) { c.abrams.swarm.bounds[0] = {5, 5}; }, "InvalidBounds");
  fails_with([](RunConfig& c) { c.model.physics_weight = -1; }, "InvalidConfig");
}
