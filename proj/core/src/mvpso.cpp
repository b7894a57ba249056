#include "masec/mvpso.hpp"

#include <algorithm>
#include <thread>

namespace masec {

namespace {

RVec uniform_vector(int n, double lo, double hi, Rng& rng) {
  RVec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

RVec unit_draws(int n, Rng& rng) {
  RVec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform();
  return v;
}

struct Evaluated {
  RVec position;
  RVec velocity;
  double fitness = 0.0;
  double ssr = 0.0;
};

// Moves one particle to its best projected candidate.
Evaluated best_candidate(const Particle& particle, const RMat& psi, const SsrEvaluator& evaluator,
                         const SystemConfig& config) {
  const auto candidates = candidate_velocities(psi, config.swarm.combination_weights);
  Evaluated best;
  bool have = false;
  for (const auto& z : candidates) {
    RVec u = project(particle.position + z, config);
    const double ssr = evaluator(u);
    const double fit = ssr - penalty(u, config);
    if (!have || fit > best.fitness) {
      best = {std::move(u), z, fit, ssr};
      have = true;
    }
    best.ssr = std::max(best.ssr, ssr);
  }
  return best;
}

std::vector<double> step_inertia(const SwarmState& state, const SystemConfig& config,
                                 const SwarmOptions& options) {
  const auto& s = config.swarm;
  if (!options.decreasing_inertia) return s.component_inertia;
  const double w = inertia_schedule(state.iteration, s.iterations, s.omega_max, s.omega_min);
  return std::vector<double>(s.component_inertia.size(), w);
}

void adopt(Particle& p, Evaluated&& e) {
  p.position = std::move(e.position);
  p.velocity = std::move(e.velocity);
  if (e.fitness > p.pbest_fitness) {
    p.pbest_fitness = e.fitness;
    p.pbest_position = p.position;
  }
}

void record(SwarmResult& r, const SwarmState& s, const SystemConfig& config) {
  r.fitness_trace.push_back(s.gbest_fitness);
  r.penalty_trace.push_back(penalty(s.gbest_position, config));
}

void finish(SwarmResult& r, const SwarmState& s, const SystemConfig& config) {
  r.position = s.gbest_position;
  r.layout = AntennaLayout::from_vector(s.gbest_position, config.num_tx, config.num_rx);
  r.fitness = s.gbest_fitness;
  r.penalty = penalty(s.gbest_position, config);
  r.penalty_dominance_violated = r.max_ssr >= config.swarm.tau_t + config.swarm.tau_r;
}

}  // namespace

int close_pairs(const std::vector<Point2>& points, double min_distance) {
  int n = 0;
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j)
      if (distance(points[i], points[j]) < min_distance) ++n;
  return n;
}

double penalty(const RVec& u, const SystemConfig& config) {
  if (u.size() != config.position_dim()) throw DimensionError("position vector length mismatch");
  const auto layout = AntennaLayout::from_vector(u, config.num_tx, config.num_rx);
  return config.swarm.tau_t * close_pairs(layout.tx, config.min_distance) +
         config.swarm.tau_r * close_pairs(layout.rx, config.min_distance);
}

double fitness(const RVec& u, const SsrEvaluator& evaluator, const SystemConfig& config) {
  return evaluator(u) - penalty(u, config);
}

RVec project(const RVec& u, const SystemConfig& config) {
  const double h = config.region_size / 2.0;
  return u.cwiseMax(-h).cwiseMin(h);
}

double inertia_schedule(int q, int total, double omega_max, double omega_min) {
  if (total <= 0) throw ConfigError("inertia schedule needs Q >= 1");
  if (q < 0 || q > total) throw ConfigError("inertia schedule index out of range");
  return omega_max - (omega_max - omega_min) * q / total;
}

RMat velocity_components(const Particle& particle, const RVec& gbest, const std::vector<double>& inertia,
                         double c1, double c2, const RVec& e1, const RVec& e2) {
  const RVec to_pbest = particle.pbest_position - particle.position;
  const RVec to_gbest = gbest - particle.position;
  RMat psi(particle.position.size(), static_cast<Eigen::Index>(inertia.size()));
  for (size_t j = 0; j < inertia.size(); ++j)
    psi.col(j) = inertia[j] * particle.velocity + c1 * e1.cwiseProduct(to_pbest) + c2 * e2.cwiseProduct(to_gbest);
  return psi;
}

RMat velocity_components(const Particle& particle, const RVec& gbest, const std::vector<double>& inertia,
                         double c1, double c2, Rng& rng) {
  const int n = static_cast<int>(particle.position.size());
  const RVec e1 = unit_draws(n, rng);
  const RVec e2 = unit_draws(n, rng);
  return velocity_components(particle, gbest, inertia, c1, c2, e1, e2);
}

std::vector<RVec> candidate_velocities(const RMat& psi, const std::vector<std::vector<double>>& weights) {
  std::vector<RVec> out;
  out.reserve(weights.size());
  for (const auto& c : weights) {
    if (static_cast<Eigen::Index>(c.size()) != psi.cols())
      throw DimensionError("combination weights must have one entry per velocity component");
    out.push_back(psi * Eigen::Map<const RVec>(c.data(), static_cast<Eigen::Index>(c.size())));
  }
  return out;
}

SwarmState initialize_swarm(const SsrEvaluator& evaluator, const SystemConfig& config, Rng& rng,
                            const SwarmOptions& options) {
  const auto& s = config.swarm;
  if (s.particles < 1 || s.iterations < 1) throw ConfigError("swarm needs N >= 1 and Q >= 1");
  const int dim = config.position_dim();
  const double h = config.region_size / 2.0;
  SwarmState state;
  state.particles.resize(s.particles);
  for (int n = 0; n < s.particles; ++n) {
    Particle& p = state.particles[n];
    p.position = uniform_vector(dim, -h, h, rng);
    if (n == 0 && options.incumbent) {
      if (options.incumbent->size() != dim) throw DimensionError("incumbent length mismatch");
      p.position = project(*options.incumbent, config);
    }
    p.velocity = s.random_initial_velocity ? uniform_vector(dim, -h, h, rng) : RVec::Zero(dim);
    p.pbest_position = p.position;
    p.pbest_fitness = fitness(p.position, evaluator, config);
    if (n == 0 || p.pbest_fitness > state.gbest_fitness) {
      state.gbest_fitness = p.pbest_fitness;
      state.gbest_position = p.position;
    }
  }
  return state;
}

StepStats swarm_step(SwarmState& state, const SsrEvaluator& evaluator, const SystemConfig& config,
                     Rng& rng, const SwarmOptions& options) {
  const auto& s = config.swarm;
  const auto inertia = step_inertia(state, config, options);
  StepStats stats;
  const int n_particles = static_cast<int>(state.particles.size());

  if (!s.parallel_update) {
    for (auto& p : state.particles) {
      const RMat psi = velocity_components(p, state.gbest_position, inertia, s.c1, s.c2, rng);
      Evaluated e = best_candidate(p, psi, evaluator, config);
      stats.max_ssr = std::max(stats.max_ssr, e.ssr);
      adopt(p, std::move(e));
      if (p.pbest_fitness > state.gbest_fitness) {
        state.gbest_fitness = p.pbest_fitness;
        state.gbest_position = p.pbest_position;
      }
    }
  } else {
    std::vector<RMat> psi(n_particles);
    for (int n = 0; n < n_particles; ++n)
      psi[n] = velocity_components(state.particles[n], state.gbest_position, inertia, s.c1, s.c2, rng);
    std::vector<Evaluated> moved(n_particles);
    const int threads = std::clamp(s.threads, 1, n_particles);
    auto work = [&](int t) {
      for (int n = t; n < n_particles; n += threads)
        moved[n] = best_candidate(state.particles[n], psi[n], evaluator, config);
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(work, t);
    work(0);
    for (auto& th : pool) th.join();
    for (int n = 0; n < n_particles; ++n) {
      stats.max_ssr = std::max(stats.max_ssr, moved[n].ssr);
      adopt(state.particles[n], std::move(moved[n]));
    }
    for (const auto& p : state.particles)
      if (p.pbest_fitness > state.gbest_fitness) {
        state.gbest_fitness = p.pbest_fitness;
        state.gbest_position = p.pbest_position;
      }
  }
  ++state.iteration;
  return stats;
}

SwarmResult optimize_positions(const SsrEvaluator& evaluator, const SystemConfig& config, Rng& rng,
                               const SwarmOptions& options) {
  SwarmResult r;
  SwarmState state = initialize_swarm(evaluator, config, rng, options);
  for (const auto& p : state.particles) r.max_ssr = std::max(r.max_ssr, p.pbest_fitness + penalty(p.position, config));
  record(r, state, config);
  for (int q = 0; q < config.swarm.iterations; ++q) {
    const StepStats st = swarm_step(state, evaluator, config, rng, options);
    r.max_ssr = std::max(r.max_ssr, st.max_ssr);
    record(r, state, config);
  }
  finish(r, state, config);
  return r;
}

SwarmResult standard_pso(const SsrEvaluator& evaluator, const SystemConfig& config, Rng& rng,
                         const std::optional<RVec>& incumbent) {
  const auto& s = config.swarm;
  SwarmOptions init_options;
  init_options.incumbent = incumbent;
  SwarmState state = initialize_swarm(evaluator, config, rng, init_options);
  SwarmResult r;
  for (const auto& p : state.particles) r.max_ssr = std::max(r.max_ssr, p.pbest_fitness + penalty(p.position, config));
  record(r, state, config);
  const int dim = config.position_dim();
  for (int q = 0; q < s.iterations; ++q) {
    const double w = inertia_schedule(q, s.iterations, s.omega_max, s.omega_min);
    for (auto& p : state.particles) {
      const RVec e1 = unit_draws(dim, rng);
      const RVec e2 = unit_draws(dim, rng);
      p.velocity = w * p.velocity + s.c1 * e1.cwiseProduct(p.pbest_position - p.position) +
                   s.c2 * e2.cwiseProduct(state.gbest_position - p.position);
      p.position = project(p.position + p.velocity, config);
      const double ssr = evaluator(p.position);
      r.max_ssr = std::max(r.max_ssr, ssr);
      const double fit = ssr - penalty(p.position, config);
      if (fit > p.pbest_fitness) {
        p.pbest_fitness = fit;
        p.pbest_position = p.position;
      }
      if (p.pbest_fitness > state.gbest_fitness) {
        state.gbest_fitness = p.pbest_fitness;
        state.gbest_position = p.pbest_position;
      }
    }
    ++state.iteration;
    record(r, state, config);
  }
  finish(r, state, config);
  return r;
}

}  // namespace masec
