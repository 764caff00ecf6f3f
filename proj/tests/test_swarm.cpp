#include <doctest.h>

#include "concrete/error.hpp"
#include "concrete/swarm.hpp"
#include "support.hpp"

using namespace concrete;
using doctest::Approx;

namespace {

SwarmConfig box(std::size_t dims, double lo, double hi, std::uint64_t seed = 0) {
  SwarmConfig cfg;
  cfg.bounds.assign(dims, Bounds{lo, hi});
  cfg.seed = seed;
  return cfg;
}

double sphere(const Eigen::VectorXd& x) { return x.squaredNorm(); }

bool in_bounds(const Eigen::MatrixXd& positions, const SwarmConfig& cfg) {
  for (Eigen::Index p = 0; p < positions.rows(); ++p)
    for (Eigen::Index d = 0; d < positions.cols(); ++d) {
      const auto& b = cfg.bounds[static_cast<std::size_t>(d)];
      if (positions(p, d) < b.low || positions(p, d) > b.high) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("config validation") {
  SwarmConfig cfg = box(1, 5, 5);
  CHECK_ERROR_CODE(validate(cfg), "InvalidBounds");
  CHECK_ERROR_CODE(validate(box(1, 6, 5)), "InvalidBounds");
  CHECK_ERROR_CODE(validate(SwarmConfig{}), "InvalidBounds");
  CHECK_ERROR_CODE(validate(box(1, 0, std::numeric_limits<double>::infinity())), "InvalidBounds");
  cfg = box(2, 0, 1);
  cfg.n_particles = 1;
  CHECK_ERROR_CODE(validate(cfg), "InvalidSwarmConfig");
  cfg = box(2, 0, 1);
  cfg.inertia = 1.0;
  CHECK_ERROR_CODE(validate(cfg), "InvalidSwarmConfig");
  cfg = box(2, 0, 1);
  cfg.social = 0;
  CHECK_ERROR_CODE(validate(cfg), "InvalidSwarmConfig");
  CHECK_NOTHROW(validate(box(2, 0, 1)));
}

TEST_CASE("init") {
  const SwarmConfig cfg = box(2, -3, 7, 5);
  std::vector<double> seen;
  const SwarmState s = init(cfg, [&](const Eigen::VectorXd& x) {
    const double c = sphere(x);
    seen.push_back(c);
    return c;
  });
  CHECK_EQ(s.positions.rows(), 40);
  CHECK(in_bounds(s.positions, cfg));
  CHECK_LE(s.velocities.cwiseAbs().maxCoeff(), 5.0);
  REQUIRE_EQ(seen.size(), 40);
  CHECK_EQ(s.global_best_cost, *std::min_element(seen.begin(), seen.end()));
  CHECK_EQ(sphere(s.global_best_position), s.global_best_cost);
  CHECK_EQ(s.best_positions, s.positions);

  const SwarmState t = init(cfg, sphere);
  CHECK_EQ(t.positions, s.positions);
  CHECK_EQ(t.velocities, s.velocities);
  CHECK_NE(init(box(2, -3, 7, 6), sphere).positions, s.positions);
}

TEST_CASE("a swarm resting at the optimum stays there") {
  const SwarmConfig cfg = box(2, -1, 1);
  SwarmState s = init(cfg, sphere);
  s.positions.setZero();
  s.velocities.setZero();
  s.best_positions.setZero();
  s.best_costs.setZero();
  s.global_best_position.setZero(2);
  s.global_best_cost = 0;
  step(s, cfg, sphere);
  CHECK_EQ(s.positions, Eigen::MatrixXd::Zero(40, 2));
  CHECK_EQ(s.global_best_cost, 0.0);
  CHECK_EQ(s.global_best_position, Eigen::VectorXd::Zero(2));
}

TEST_CASE("hand-computed update with fixed coefficients") {
  SwarmConfig cfg = box(1, -10, 10);
  cfg.n_particles = 2;
  auto cost = [](const Eigen::VectorXd& x) { return std::abs(x(0) - 1.0); };
  SwarmState s = init(cfg, cost);
  s.positions << 4.0, -2.0;
  s.velocities << 1.0, 0.5;
  s.best_positions << 3.0, -2.0;
  s.best_costs << 2.0, 3.0;
  s.global_best_position = Eigen::VectorXd::Constant(1, 3.0);
  s.global_best_cost = 2.0;

  step(s, cfg, cost, [](std::size_t, std::size_t) { return std::pair{1.0, 1.0}; });
  const double w = 0.729, c = 1.49445;
  // particle 0: v = w*1 + c*(3-4) + c*(3-4); particle 1: v = w*0.5 + c*0 + c*(3+2)
  const double v0 = w * 1.0 + c * (3 - 4) + c * (3 - 4);
  const double v1 = w * 0.5 + c * (-2 + 2) + c * (3 + 2);
  CHECK_EQ(s.velocities(0, 0), Approx(v0));
  CHECK_EQ(s.positions(0, 0), Approx(4 + v0));
  CHECK_EQ(s.velocities(1, 0), Approx(v1));
  CHECK_EQ(s.positions(1, 0), Approx(-2 + v1));
  // Particle 0 improves (|1.74 - 1| < 2), particle 1 does not (4.84 > 3).
  CHECK_EQ(s.best_costs(0), Approx(std::abs(4 + v0 - 1)));
  CHECK_EQ(s.best_costs(1), 3.0);
  CHECK_EQ(s.best_positions(1, 0), -2.0);
  CHECK_EQ(s.global_best_cost, Approx(std::abs(4 + v0 - 1)));
  CHECK_EQ(s.global_best_position(0), Approx(4 + v0));
  CHECK_EQ(s.iteration, 1);

  // Overshooting a bound clamps the position and stops the particle.
  s.positions << 9.5, 0.0;
  s.velocities << 5.0, 0.0;
  s.best_positions << 9.5, 0.0;
  s.global_best_position(0) = 9.5;
  step(s, cfg, cost, [](std::size_t, std::size_t) { return std::pair{0.0, 0.0}; });
  CHECK_EQ(s.positions(0, 0), 10.0);
  CHECK_EQ(s.velocities(0, 0), 0.0);
}

TEST_CASE("non-finite cost") {
  const SwarmConfig cfg = box(1, -1, 1);
  CHECK_ERROR_CODE(init(cfg, [](const Eigen::VectorXd&) { return std::nan(""); }), "CostNotFinite");
  int calls = 0;
  SwarmState s = init(cfg, [&](const Eigen::VectorXd& x) { return ++calls > 40 ? INFINITY : x(0); });
  CHECK_ERROR_CODE(step(s, cfg, [&](const Eigen::VectorXd& x) { return ++calls > 40 ? INFINITY : x(0); }),
                   "CostNotFinite");
}

TEST_CASE("minimize: sphere, flat and two-basin quartic") {
  const SwarmResult sp = minimize(box(2, -5, 5), sphere);
  CHECK_LT(sp.best_cost, 1e-4);
  CHECK_EQ(sp.history.size(), 201);

  const SwarmConfig flat_cfg = box(3, -2, 2);
  const SwarmResult flat = minimize(flat_cfg, [](const Eigen::VectorXd&) { return 4.5; });
  CHECK_EQ(flat.best_cost, 4.5);
  CHECK(in_bounds(flat.best_position.transpose(), flat_cfg));

  const SwarmResult q = minimize(box(1, -2, 2), [](const Eigen::VectorXd& x) {
    return std::pow(x(0) * x(0) - 1, 2);
  });
  CHECK_LT(q.best_cost, 1e-6);
  CHECK_LT(std::abs(std::abs(q.best_position(0)) - 1), 1e-3);
}

TEST_CASE("minimize is bit-reproducible") {
  auto rosen = [](const Eigen::VectorXd& x) { return 100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2); };
  const SwarmResult a = minimize(box(2, -2, 2, 9), rosen);
  const SwarmResult b = minimize(box(2, -2, 2, 9), rosen);
  CHECK_EQ(a.history, b.history);
  CHECK_EQ(a.best_position, b.best_position);
}

TEST_CASE("property: monotone best cost and in-bounds positions on random costs") {
  Rng rng(2718);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dims = 1 + rng.below(5);
    SwarmConfig cfg;
    for (std::size_t d = 0; d < dims; ++d) {
      const double lo = rng.uniform(-100, 100);
      cfg.bounds.push_back({lo, lo + rng.uniform(0.01, 50)});
    }
    cfg.n_particles = 2 + rng.below(30);
    cfg.seed = rng.next();
    // Random multimodal cost: a weighted sum of cosines and a shifted bowl.
    Eigen::VectorXd centre(static_cast<Eigen::Index>(dims)), freq(static_cast<Eigen::Index>(dims));
    for (std::size_t d = 0; d < dims; ++d) {
      centre(static_cast<Eigen::Index>(d)) = rng.uniform(-120, 120);
      freq(static_cast<Eigen::Index>(d)) = rng.uniform(0, 3);
    }
    const double amp = rng.uniform(0, 10);
    auto cost = [&](const Eigen::VectorXd& x) {
      return (x - centre).squaredNorm() + amp * (x.array() * freq.array()).cos().sum();
    };
    SwarmState s = init(cfg, cost);
    double previous = s.global_best_cost;
    for (int it = 0; it < 30; ++it) {
      step(s, cfg, cost);
      CHECK_LE(s.global_best_cost, previous);
      CHECK(in_bounds(s.positions, cfg));
      for (Eigen::Index p = 0; p < s.best_costs.size(); ++p) CHECK_GE(s.best_costs(p), s.global_best_cost);
      previous = s.global_best_cost;
    }
  }
}

TEST_CASE("convex quadratics are solved for nearly every seed") {
  Rng rng(314);
  int solved = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Eigen::VectorXd centre(4), weight(4);
    for (Eigen::Index d = 0; d < 4; ++d) centre(d) = rng.uniform(-3, 3), weight(d) = rng.uniform(0.5, 5);
    const SwarmResult r = minimize(box(4, -5, 5, seed), [&](const Eigen::VectorXd& x) {
      return (weight.array() * (x - centre).array().square()).sum();
    });
    if (r.best_cost < 1e-6 && (r.best_position - centre).cwiseAbs().maxCoeff() < 1e-2) ++solved;
  }
  CHECK_GE(solved, 9);
}
