#include "concrete/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "concrete/error.hpp"

namespace concrete {

namespace {

double evaluate(const CostFunction& cost, const Eigen::VectorXd& x, std::size_t particle) {
  const double c = cost(x);
  if (!std::isfinite(c))
    throw Error("CostNotFinite", "cost of particle " + std::to_string(particle) + " is not finite");
  return c;
}

void refresh_global_best(SwarmState& s) {
  Eigen::Index best = 0;
  for (Eigen::Index p = 1; p < s.best_costs.size(); ++p)
    if (s.best_costs(p) < s.best_costs(best)) best = p;
  if (s.iteration == 0 || s.best_costs(best) < s.global_best_cost) {
    s.global_best_cost = s.best_costs(best);
    s.global_best_position = s.best_positions.row(best).transpose();
  }
}

}  // namespace

void validate(const SwarmConfig& cfg) {
  if (cfg.bounds.empty()) throw Error("InvalidBounds", "swarm needs at least one dimension");
  for (std::size_t d = 0; d < cfg.bounds.size(); ++d) {
    const auto& b = cfg.bounds[d];
    if (!(std::isfinite(b.low) && std::isfinite(b.high) && b.low < b.high))
      throw Error("InvalidBounds", "dimension " + std::to_string(d) + ": need finite low < high");
  }
  if (cfg.n_particles < 2) throw Error("InvalidSwarmConfig", "need at least 2 particles");
  if (!(cfg.inertia > 0 && cfg.inertia < 1)) throw Error("InvalidSwarmConfig", "inertia must lie in (0, 1)");
  if (!(cfg.cognitive > 0 && cfg.social > 0)) throw Error("InvalidSwarmConfig", "c1 and c2 must be > 0");
  if (cfg.max_iters < 0) throw Error("InvalidSwarmConfig", "max_iters must be >= 0");
}

SwarmState init(const SwarmConfig& cfg, const CostFunction& cost) {
  validate(cfg);
  const auto n = static_cast<Eigen::Index>(cfg.n_particles);
  const auto dims = static_cast<Eigen::Index>(cfg.n_dims());
  SwarmState s;
  s.positions.resize(n, dims);
  s.velocities.resize(n, dims);
  s.best_costs.resize(n);
  for (Eigen::Index p = 0; p < n; ++p) {
    s.streams.push_back(Rng::stream(cfg.seed, static_cast<std::uint64_t>(p)));
    auto& rng = s.streams.back();
    for (Eigen::Index d = 0; d < dims; ++d) {
      const auto& b = cfg.bounds[static_cast<std::size_t>(d)];
      const double half_span = (b.high - b.low) / 2;
      s.positions(p, d) = rng.uniform(b.low, b.high);
      s.velocities(p, d) = rng.uniform(-half_span, half_span);
    }
    s.best_costs(p) = evaluate(cost, s.positions.row(p).transpose(), static_cast<std::size_t>(p));
  }
  s.best_positions = s.positions;
  refresh_global_best(s);
  return s;
}

void step(SwarmState& s, const SwarmConfig& cfg, const CostFunction& cost, const CoefficientSource& coefficients) {
  const Eigen::Index n = s.positions.rows();
  const Eigen::Index dims = s.positions.cols();
  for (Eigen::Index p = 0; p < n; ++p) {
    auto& rng = s.streams[static_cast<std::size_t>(p)];
    for (Eigen::Index d = 0; d < dims; ++d) {
      double r1, r2;
      if (coefficients) {
        std::tie(r1, r2) = coefficients(static_cast<std::size_t>(p), static_cast<std::size_t>(d));
      } else {
        r1 = rng.uniform01();
        r2 = rng.uniform01();
      }
      const double x = s.positions(p, d);
      double v = cfg.inertia * s.velocities(p, d) + cfg.cognitive * r1 * (s.best_positions(p, d) - x) +
                 cfg.social * r2 * (s.global_best_position(d) - x);
      const auto& b = cfg.bounds[static_cast<std::size_t>(d)];
      double next = x + v;
      if (next <= b.low || next >= b.high) {
        next = std::clamp(next, b.low, b.high);
        v = 0;
      }
      s.positions(p, d) = next;
      s.velocities(p, d) = v;
    }
  }
  for (Eigen::Index p = 0; p < n; ++p) {
    const double c = evaluate(cost, s.positions.row(p).transpose(), static_cast<std::size_t>(p));
    if (c < s.best_costs(p)) {
      s.best_costs(p) = c;
      s.best_positions.row(p) = s.positions.row(p);
    }
  }
  ++s.iteration;
  refresh_global_best(s);
}

SwarmResult minimize(const SwarmConfig& cfg, const CostFunction& cost) {
  SwarmState s = init(cfg, cost);
  SwarmResult r;
  r.history.push_back(s.global_best_cost);
  for (int it = 0; it < cfg.max_iters; ++it) {
    step(s, cfg, cost);
    r.history.push_back(s.global_best_cost);
  }
  r.best_position = s.global_best_position;
  r.best_cost = s.global_best_cost;
  return r;
}

}  // namespace concrete
