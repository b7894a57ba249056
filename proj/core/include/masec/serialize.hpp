#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "masec/ao.hpp"
#include "masec/channel.hpp"
#include "masec/mvpso.hpp"
#include "masec/scenario.hpp"
#include "masec/sca.hpp"
#include "masec/schemes.hpp"

namespace masec {

/// Shortest decimal that round-trips the double.
std::string format_double(double x);

/// Complex numbers are [re, im] pairs; vectors and matrices nest them.
nlohmann::json to_json(const ChannelGains& gains);
ChannelGains gains_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const AntennaLayout& layout);
AntennaLayout layout_from_json(const nlohmann::json& doc);

/// iteration,ssr_positions,ssr_transmit,ssr_receive,penalty,max_rank_residual
/// Row 0 holds the initial SSR.
void write_ao_trace_csv(std::ostream& out, const AoResult& result);
/// iteration,gbest_fitness,gbest_penalty
void write_swarm_trace_csv(std::ostream& out, const SwarmResult& result);
/// iteration,F_tilde,max_rank_residual
void write_sca_trace_csv(std::ostream& out, const ScaResult& result);
/// trial,seed,scheme,ssr,ul_ssr,dl_ssr,iterations,converged,max_rank_residual,ok,error
void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials, bool header = true);

}  // namespace masec
