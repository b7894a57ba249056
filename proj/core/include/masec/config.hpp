#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "masec/types.hpp"

namespace masec {

/// Swarm search settings for antenna placement.
struct SwarmParams {
  int particles = 100;   // N
  int iterations = 100;  // Q
  /// Inertia weight of each velocity component (one per component).
  std::vector<double> component_inertia = {0.9, 0.75, 0.4};
  /// One weight vector per candidate velocity; each has one entry per
  /// velocity component.
  std::vector<std::vector<double>> combination_weights = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  double c1 = 1.4;
  double c2 = 1.4;
  double tau_t = 10.0;
  double tau_r = 10.0;
  /// Linearly decreasing inertia used by the standard-PSO baseline.
  double omega_max = 0.9;
  double omega_min = 0.4;
  bool random_initial_velocity = false;
  /// Evaluate particles against a frozen global best and reduce at the end
  /// of each step instead of updating the global best inside the loop.
  bool parallel_update = false;
  int threads = 1;

  int candidates() const { return static_cast<int>(combination_weights.size()); }
  int components() const { return static_cast<int>(component_inertia.size()); }
};

struct ScaParams {
  int max_iterations = 100;  // M
  double tolerance = 1e-3;   // eps_SCA
  int inner_max_iterations = 2000;
  double inner_tolerance = 1e-7;
  double rank_tolerance = 1e-6;
};

struct AoParams {
  int max_iterations = 100;  // C
  double tolerance = 1e-3;   // eps_AO
};

/// Physical and solver constants. All values are linear (W, ratios);
/// lengths at the base station are in wavelengths, so `wavelength` is 1.
struct SystemConfig {
  double wavelength = 1.0;
  double region_size = 4.0;   // A
  double min_distance = 0.5;  // D
  int num_tx = 6;
  int num_rx = 6;
  int num_paths = 6;  // L
  double si_loss = 1e-9;        // rho, -90 dB
  double ref_path_loss = 1e-4;  // rho0, -40 dB
  double path_loss_exp = 2.8;
  double cell_radius = 600.0;
  double noise_ul = 1e-12;  // -90 dBm
  double noise_dl = 1e-12;
  double noise_eve = 1e-12;
  double p_max_dl = 10.0;  // 40 dBm
  double p_max_ul = 0.01;  // 10 dBm
  int k_ul = 4;
  int k_dl = 4;
  int k_eve = 4;
  SwarmParams swarm;
  ScaParams sca;
  AoParams ao;
  std::uint64_t seed = 1;

  /// Throws ConfigError on the first violated invariant.
  void validate() const;

  int position_dim() const { return 2 * (num_tx + num_rx); }
};

/// Default simulation parameters of the reference system.
SystemConfig table1_config();

/// Reduced configuration used for desk-scale Monte-Carlo runs: 4 antennas
/// per side, two of each terminal type, 50 particles x 50 iterations, 30
/// SCA and 30 AO iterations.
SystemConfig desk_config();

double db_to_linear(double db);
double dbm_to_watts(double dbm);
double linear_to_db(double x);

/// Reads a config document. Keys mirror the field names; `<name>_db` and
/// `<name>_dbm` variants are accepted for ratios and powers and converted
/// once here. Starts from `base` and overrides present keys only.
SystemConfig config_from_json(const nlohmann::json& doc, const SystemConfig& base = table1_config());
nlohmann::json config_to_json(const SystemConfig& config);

}  // namespace masec
