#pragma once

#include <optional>
#include <vector>

#include "masec/channel.hpp"
#include "masec/config.hpp"
#include "masec/mvpso.hpp"
#include "masec/objective.hpp"
#include "masec/receiver.hpp"
#include "masec/rng.hpp"
#include "masec/sca.hpp"

namespace masec {

/// How sub-problem 1 (antenna positions) is handled.
enum class PositionSearch {
  kMvpso,        // multi-velocity swarm
  kStandardPso,  // single velocity, decreasing inertia
  kFrozen,       // layout kept at its start value
  kAlternating,  // per-antenna grid search (APO)
  kSelection,    // best subset of a fixed port grid (AS)
};

enum class ReceiverRule { kOptimal, kZeroForcing };

struct AoStrategy {
  PositionSearch positions = PositionSearch::kMvpso;
  ReceiverRule receiver = ReceiverRule::kOptimal;
  ScaOptions sca;
  SiCovariance si_covariance = SiCovariance::kAggregate;
  double apo_step = 0.1;      // grid step of the alternating search, in wavelengths
  int selection_ports = 0;    // ports per side for kSelection; 0 means 2N
  bool keep_swarm_traces = false;
  bool extrapolate = true;    // accelerate across rounds along the last AO step
  bool polish = false;        // compass search around the swarm's best layout
  bool cold_start = true;     // also run SCA from the default start each round, keep the better
};

struct AoRecord {
  int iteration = 0;
  double ssr_positions = 0.0;  // after sub-1
  double ssr_transmit = 0.0;   // after sub-2
  double ssr_receive = 0.0;    // after sub-3 and extrapolation
  double penalty = 0.0;
  double max_rank_residual = 0.0;
  double wall_seconds = 0.0;
};

struct AoResult {
  AntennaLayout layout;
  TxSolution solution;
  double ssr = 0.0;
  SsrBreakdown breakdown;
  double initial_ssr = 0.0;
  std::vector<AoRecord> trace;
  std::vector<SwarmResult> swarms;  // one per AO iteration when kept
  int iterations = 0;
  bool converged = false;
  double max_rank_residual = 0.0;
  bool penalty_dominance_violated = false;
};

/// n points on a centred grid spanning [-A/2, A/2]^2: ceil(sqrt(n)) columns,
/// as many rows as needed, filled row by row. Throws ConfigError when the
/// spacing falls below `min_distance`.
std::vector<Point2> grid_points(int n, double aperture, double min_distance);

/// Grid layout on both sides (the FPA array and the AO starting point).
AntennaLayout grid_layout(const SystemConfig& config);

/// Matched DL beams with equal power over K_D + 1 slots, the last slot on
/// AN, full UL power and MRC receivers (ZF under that rule).
TxSolution initial_solution(const ChannelSet& channels, const SystemConfig& config,
                            const AoStrategy& strategy = {});

/// Sub-problem 3: closed-form receivers. A user's receiver is replaced only
/// when its UL SINR improves. Under ZF the receivers are always replaced.
std::vector<CVec> update_receivers(const ChannelSet& channels, const TxSolution& solution,
                                   const SystemConfig& config, const AoStrategy& strategy);

/// Clamped SSR of `solution` at `layout`; ZF receivers are recomputed at the
/// layout when the strategy asks for them.
double layout_ssr(const AntennaLayout& layout, const ChannelGains& gains, const TxSolution& solution,
                  const SystemConfig& config, const AoStrategy& strategy);

/// Per-antenna exhaustive search over a grid of step `step`, transmit side
/// first, ascending index, repeated until a full sweep makes no move.
AntennaLayout alternating_position_search(const AntennaLayout& start, const ChannelGains& gains,
                                          const TxSolution& solution, const SystemConfig& config,
                                          const AoStrategy& strategy);

/// Exhaustive joint choice of N_t of the transmit ports and N_r of the
/// receive ports. Throws ConfigError beyond 1e5 combinations.
AntennaLayout select_antennas(const std::vector<Point2>& tx_ports, const std::vector<Point2>& rx_ports,
                              const ChannelGains& gains, const TxSolution& solution,
                              const SystemConfig& config, const AoStrategy& strategy);

/// Alternating optimization: positions, then transmit beamformers and
/// powers, then receivers, until the SSR gain drops below eps_AO or C
/// iterations. Every sub-step is kept only if it does not lower the SSR,
/// so the SSR trace is non-decreasing.
AoResult run_ao(const ChannelGains& gains, const SystemConfig& config, const AoStrategy& strategy,
                const Rng& rng, const std::optional<AntennaLayout>& start = std::nullopt);

}  // namespace masec
