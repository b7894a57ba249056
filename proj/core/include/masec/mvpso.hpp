#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "masec/channel.hpp"
#include "masec/config.hpp"
#include "masec/rng.hpp"
#include "masec/types.hpp"

namespace masec {

struct Particle {
  RVec position;  // u
  RVec velocity;  // z
  RVec pbest_position;
  double pbest_fitness = 0.0;
};

struct SwarmState {
  std::vector<Particle> particles;
  RVec gbest_position;
  double gbest_fitness = 0.0;
  int iteration = 0;
};

/// R_SSR at a stacked position vector, channels rematerialized there.
using SsrEvaluator = std::function<double(const RVec& u)>;

/// Number of pairs closer than `min_distance`.
int close_pairs(const std::vector<Point2>& points, double min_distance);

/// tau_t * (#tx pairs closer than D) + tau_r * (#rx pairs closer than D).
double penalty(const RVec& u, const SystemConfig& config);

/// R_SSR(u) - penalty(u).
double fitness(const RVec& u, const SsrEvaluator& evaluator, const SystemConfig& config);

/// Entrywise clamp to [-A/2, A/2].
RVec project(const RVec& u, const SystemConfig& config);

/// omega_max - (omega_max - omega_min) q / Q.
double inertia_schedule(int q, int total, double omega_max, double omega_min);

/// Velocity components psi_j = omega_j z + c1 e1 (pbest - u) + c2 e2 (gbest - u),
/// one column per inertia weight.
RMat velocity_components(const Particle& particle, const RVec& gbest, const std::vector<double>& inertia,
                         double c1, double c2, const RVec& e1, const RVec& e2);
/// Draws e1 then e2 (one uniform per entry each) from `rng`.
RMat velocity_components(const Particle& particle, const RVec& gbest, const std::vector<double>& inertia,
                         double c1, double c2, Rng& rng);

/// Candidate i = Psi c_i.
std::vector<RVec> candidate_velocities(const RMat& psi, const std::vector<std::vector<double>>& weights);

struct SwarmOptions {
  /// Particle 0 starts here instead of at a random position.
  std::optional<RVec> incumbent;
  /// Replace the per-component inertia with the decreasing schedule.
  bool decreasing_inertia = false;
};

/// Random initial state: positions uniform on the box, velocities zero (or
/// uniform on [-A/2, A/2] when configured).
SwarmState initialize_swarm(const SsrEvaluator& evaluator, const SystemConfig& config, Rng& rng,
                            const SwarmOptions& options = {});

struct StepStats {
  double max_ssr = -std::numeric_limits<double>::infinity();
};

/// One iteration of the multi-velocity update over every particle.
StepStats swarm_step(SwarmState& state, const SsrEvaluator& evaluator, const SystemConfig& config,
                     Rng& rng, const SwarmOptions& options = {});

struct SwarmResult {
  AntennaLayout layout;
  RVec position;
  double fitness = 0.0;
  double penalty = 0.0;
  std::vector<double> fitness_trace;  // gbest, q = 0..Q
  std::vector<double> penalty_trace;
  double max_ssr = 0.0;
  /// Some evaluated SSR reached tau_t + tau_r, so the penalty no longer
  /// dominates; raise tau.
  bool penalty_dominance_violated = false;
};

SwarmResult optimize_positions(const SsrEvaluator& evaluator, const SystemConfig& config, Rng& rng,
                               const SwarmOptions& options = {});

/// Textbook PSO with a single velocity and the decreasing inertia schedule.
SwarmResult standard_pso(const SsrEvaluator& evaluator, const SystemConfig& config, Rng& rng,
                         const std::optional<RVec>& incumbent = std::nullopt);

}  // namespace masec
