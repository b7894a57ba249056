#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "masec/ao.hpp"
#include "masec/channel.hpp"

namespace masec {

struct Scenario;

enum class SchemeId { kProposed, kFpa, kAs, kRp, kApo, kPso, kZf, kNoAn, kHd };

std::string_view scheme_name(SchemeId id);
/// Case-insensitive; throws ConfigError for unknown names.
SchemeId parse_scheme(std::string_view name);
std::vector<SchemeId> all_schemes();

struct SchemeOptions {
  /// Design with erroneous field-response information; the SSR is still
  /// evaluated on the true channels.
  std::optional<FriError> fri_error;
  int random_layouts = 100;  // RP candidates
  bool keep_trace = false;
};

struct TrialResult {
  SchemeId scheme = SchemeId::kProposed;
  std::uint64_t seed = 0;
  int trial = 0;
  double ssr = 0.0;
  double ul_ssr = 0.0;
  double dl_ssr = 0.0;
  int iterations = 0;
  bool converged = false;
  double max_rank_residual = 0.0;
  double wall_seconds = 0.0;
  bool ok = true;
  std::string error;
};

struct SchemeRun {
  TrialResult result;
  /// AO run behind the result (the UL phase for HD, the best candidate for RP).
  std::optional<AoResult> ao;
};

/// Maps each scheme to its AO configuration and runs it on `scenario`.
SchemeRun run_scheme_detailed(SchemeId id, const Scenario& scenario, const SchemeOptions& options = {});
TrialResult run_scheme(SchemeId id, const Scenario& scenario, const SchemeOptions& options = {});

/// Random layout satisfying the region and minimum-distance constraints.
AntennaLayout random_feasible_layout(const SystemConfig& config, Rng& rng);

/// The channel draw restricted to one link direction for the half-duplex
/// phases: UL keeps the UL users (no DL users, no self-interference), DL
/// keeps the DL users.
ChannelGains uplink_phase(const ChannelGains& gains);
ChannelGains downlink_phase(const ChannelGains& gains);

}  // namespace masec
