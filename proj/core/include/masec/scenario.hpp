#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "masec/channel.hpp"
#include "masec/config.hpp"
#include "masec/rng.hpp"
#include "masec/schemes.hpp"

namespace masec {

/// One random system instance: terminal positions in metres (base station at
/// the origin), the distances they imply and one channel draw.
struct Scenario {
  SystemConfig config;
  std::uint64_t seed = 0;
  std::vector<Point2> ul_users;
  std::vector<Point2> dl_users;
  std::vector<Point2> eves;
  LinkDistances distances;
  ChannelGains gains;
};

/// Area-uniform point in the disk of `radius` around the origin, never at
/// the centre.
Point2 sample_in_disk(double radius, Rng& rng);

/// Terminal i of each kind draws its position and channels from its own
/// stream, so growing K_U, K_D or K_E keeps the existing terminals.
Scenario build_scenario(const SystemConfig& config, std::uint64_t seed);

/// Seed of trial `index` under `master`.
std::uint64_t trial_seed(std::uint64_t master, int index);

struct SchemeStats {
  SchemeId scheme = SchemeId::kProposed;
  int n = 0;
  int failures = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for n = 1
  double q10 = 0.0;
  double median = 0.0;
  double q90 = 0.0;
  double mean_ul = 0.0;
  double mean_dl = 0.0;
};

struct MonteCarloStats {
  std::vector<SchemeStats> schemes;  // in request order
  std::vector<TrialResult> trials;   // trial-major, then scheme in request order

  const SchemeStats& of(SchemeId id) const;
};

/// Summary of successful trials; failed ones only counted.
SchemeStats summarize(SchemeId scheme, const std::vector<TrialResult>& trials);

/// Runs every scheme on n_trials scenarios. Trials are spread over
/// `parallelism` threads; results do not depend on it.
MonteCarloStats monte_carlo(const SystemConfig& config, const std::vector<SchemeId>& schemes, int n_trials,
                            int parallelism, std::uint64_t master_seed, const SchemeOptions& options = {});

}  // namespace masec
