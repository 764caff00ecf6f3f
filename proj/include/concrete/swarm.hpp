#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "concrete/features.hpp"
#include "concrete/random.hpp"

namespace concrete {

/// Global-best particle swarm over a box. Defaults are the constricted
/// coefficients (inertia 0.729, c1 = c2 = 1.49445).
struct SwarmConfig {
  std::size_t n_particles = 40;
  std::vector<Bounds> bounds;
  int max_iters = 200;
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  std::uint64_t seed = 0;

  std::size_t n_dims() const { return bounds.size(); }
};

/// Throws "InvalidBounds" / "InvalidSwarmConfig".
void validate(const SwarmConfig& cfg);

using CostFunction = std::function<double(const Eigen::VectorXd&)>;

/// Rows are particles, columns are dimensions.
struct SwarmState {
  Eigen::MatrixXd positions;
  Eigen::MatrixXd velocities;
  Eigen::MatrixXd best_positions;
  Eigen::VectorXd best_costs;
  Eigen::VectorXd global_best_position;
  double global_best_cost = 0;
  int iteration = 0;
  std::vector<Rng> streams;  // one per particle
};

/// Uniform positions inside the box, uniform velocities in +-(high - low)/2,
/// personal/global bests from the first evaluation.
SwarmState init(const SwarmConfig& cfg, const CostFunction& cost);

/// Supplies (r1, r2) for a (particle, dimension) pair in place of the
/// particle's random stream. Test hook.
using CoefficientSource = std::function<std::pair<double, double>(std::size_t particle, std::size_t dim)>;

/// One synchronous update:
///   v <- w v + c1 r1 (pbest - x) + c2 r2 (gbest - x);  x <- clamp(x + v)
/// Dimensions that hit a bound have their velocity zeroed. Throws
/// "CostNotFinite" when the cost of a particle is NaN or infinite.
void step(SwarmState& s, const SwarmConfig& cfg, const CostFunction& cost,
          const CoefficientSource& coefficients = nullptr);

struct SwarmResult {
  Eigen::VectorXd best_position;
  double best_cost = 0;
  std::vector<double> history;  // global best after init, then after each step
};

SwarmResult minimize(const SwarmConfig& cfg, const CostFunction& cost);

}  // namespace concrete
