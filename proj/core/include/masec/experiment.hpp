#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "masec/config.hpp"
#include "masec/schemes.hpp"

namespace masec {

enum class ExperimentKind { kConvergence, kGainmap, kSweep };

enum class SweepParameter { kRegionSize, kNumAntennas, kKUl, kKDl, kKEve, kSiLossDb, kFriError };

std::string_view kind_name(ExperimentKind kind);
ExperimentKind parse_kind(std::string_view name);
/// Names accepted on input: region_size, num_antennas, K_U, K_D, K_E,
/// si_loss_db, fri_error.
std::string_view parameter_name(SweepParameter p);
SweepParameter parse_parameter(std::string_view name);
std::string_view fri_kind_name(FriErrorKind kind);
FriErrorKind parse_fri_kind(std::string_view name);

/// Column header of the swept value in sweep.csv, e.g. A_over_lambda.
std::string_view parameter_column(SweepParameter p);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kSweep;
  SystemConfig config = desk_config();
  SweepParameter parameter = SweepParameter::kRegionSize;
  std::vector<double> values;
  FriErrorKind fri_kind = FriErrorKind::kPathResponse;
  std::vector<SchemeId> schemes = {SchemeId::kProposed};
  int trials = 1;
  std::uint64_t seed = 1;
  int parallelism = 1;
  std::string output = "out";
  /// Gain map: links among ub, bd, be, terminal index and raster step (in wavelengths).
  std::vector<std::string> links = {"ub", "bd", "be"};
  int terminal = 0;
  double step = 0.02;

  /// Throws ConfigError on the first inconsistency.
  void validate() const;
};

nlohmann::json spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const nlohmann::json& doc);

/// `spec.config` with one sweep value applied.
SystemConfig apply_sweep_value(const ExperimentSpec& spec, double value);

struct ExperimentOutcome {
  int failures = 0;
  std::vector<std::string> files;  // relative to the output directory
};

/// Writes the experiment's CSVs and manifest.json into spec.output.
///   sweep:       sweep.csv (value, scheme, mean_ssr, std_ssr, n) and trials.csv
///   convergence: convergence_ao.csv, convergence_mvpso.csv, convergence_sca.csv
///   gainmap:     gainmap_<link>.csv (x, y, gain_db)
ExperimentOutcome run_experiment(const ExperimentSpec& spec);

/// Reads manifest.json and reruns its spec into `output` (the manifest's own
/// directory when empty), optionally at another parallelism (0 keeps it).
ExperimentOutcome replay_manifest(const std::filesystem::path& manifest, const std::string& output = "",
                                  int parallelism = 0);

}  // namespace masec
