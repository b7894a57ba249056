#include "masec/schemes.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <limits>

#include "masec/scenario.hpp"

namespace masec {

namespace {

constexpr SchemeId kAll[] = {SchemeId::kProposed, SchemeId::kFpa, SchemeId::kAs,
                             SchemeId::kRp,       SchemeId::kApo, SchemeId::kPso,
                             SchemeId::kZf,       SchemeId::kNoAn, SchemeId::kHd};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

AoStrategy strategy_for(SchemeId id) {
  AoStrategy s;
  switch (id) {
    case SchemeId::kProposed:
    case SchemeId::kHd:
      break;
    case SchemeId::kFpa:
    case SchemeId::kRp:
      s.positions = PositionSearch::kFrozen;
      break;
    case SchemeId::kAs:
      s.positions = PositionSearch::kSelection;
      break;
    case SchemeId::kApo:
      s.positions = PositionSearch::kAlternating;
      break;
    case SchemeId::kPso:
      s.positions = PositionSearch::kStandardPso;
      break;
    case SchemeId::kZf:
      s.receiver = ReceiverRule::kZeroForcing;
      break;
    case SchemeId::kNoAn:
      s.sca.allow_an = false;
      break;
  }
  return s;
}

// SSR of a design on the true channels.
SsrBreakdown true_ssr(const AoResult& r, const ChannelGains& gains, const SystemConfig& config) {
  const ChannelSet ch = materialize(r.layout, gains, config.wavelength);
  return ssr(build_context(ch, r.solution, config));
}

SsrBreakdown scored(const AoResult& r, const ChannelGains& truth, const SystemConfig& config, bool perturbed) {
  return perturbed ? true_ssr(r, truth, config) : r.breakdown;
}

}  // namespace

std::string_view scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::kProposed: return "Proposed";
    case SchemeId::kFpa: return "FPA";
    case SchemeId::kAs: return "AS";
    case SchemeId::kRp: return "RP";
    case SchemeId::kApo: return "APO";
    case SchemeId::kPso: return "PSO";
    case SchemeId::kZf: return "ZF";
    case SchemeId::kNoAn: return "NoAN";
    case SchemeId::kHd: return "HD";
  }
  return "?";
}

SchemeId parse_scheme(std::string_view name) {
  const std::string n = lower(name);
  for (SchemeId id : kAll)
    if (lower(scheme_name(id)) == n) return id;
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

std::vector<SchemeId> all_schemes() { return {std::begin(kAll), std::end(kAll)}; }

AntennaLayout random_feasible_layout(const SystemConfig& config, Rng& rng) {
  const double h = config.region_size / 2.0;
  auto side = [&](int n) {
    std::vector<Point2> pts;
    int tries = 0;
    while (static_cast<int>(pts.size()) < n) {
      if (++tries > 100000) throw ConfigError("could not place antennas at the minimum distance; region too small");
      const Point2 p{rng.uniform(-h, h), rng.uniform(-h, h)};
      bool ok = true;
      for (const auto& q : pts) ok = ok && distance(p, q) >= config.min_distance;
      if (ok) pts.push_back(p);
    }
    return pts;
  };
  AntennaLayout l;
  l.tx = side(config.num_tx);
  l.rx = side(config.num_rx);
  return l;
}

ChannelGains uplink_phase(const ChannelGains& g) {
  ChannelGains out = g;
  out.si_prm.setZero();
  out.bd_angles.clear();
  out.bd_prv.clear();
  out.bd_variance.clear();
  out.h_ud = CMat::Zero(g.k_ul(), 0);
  return out;
}

ChannelGains downlink_phase(const ChannelGains& g) {
  ChannelGains out = g;
  out.ub_angles.clear();
  out.ub_prv.clear();
  out.ub_variance.clear();
  out.h_ud = CMat::Zero(0, g.k_dl());
  out.h_ue = CMat::Zero(0, g.k_eve());
  return out;
}

SchemeRun run_scheme_detailed(SchemeId id, const Scenario& sc, const SchemeOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const SystemConfig& config = sc.config;
  const Rng root(sc.seed);
  const bool perturbed = options.fri_error.has_value();
  ChannelGains design = sc.gains;
  if (perturbed) {
    Rng err = root.split({30});
    design = perturb_fri(sc.gains, *options.fri_error, err);
  }
  AoStrategy strategy = strategy_for(id);
  strategy.keep_swarm_traces = options.keep_trace;
  const Rng ao_rng = root.split({40, static_cast<std::uint64_t>(id)});

  SchemeRun run;
  TrialResult& r = run.result;
  r.scheme = id;
  r.seed = sc.seed;

  if (id == SchemeId::kHd) {
    double ul = 0.0, dl = 0.0;
    int iterations = 0;
    bool converged = true;
    if (config.k_ul > 0) {
      SystemConfig c = config;
      c.k_dl = 0;
      c.si_loss = 0.0;
      AoStrategy s = strategy;
      s.sca.allow_an = false;
      const ChannelGains truth = uplink_phase(sc.gains);
      AoResult a = run_ao(uplink_phase(design), c, s, ao_rng.split({1}));
      ul = scored(a, truth, c, perturbed).total;
      iterations += a.iterations;
      converged = converged && a.converged;
      r.max_rank_residual = std::max(r.max_rank_residual, a.max_rank_residual);
      run.ao = std::move(a);
    }
    if (config.k_dl > 0) {
      SystemConfig c = config;
      c.k_ul = 0;
      const ChannelGains truth = downlink_phase(sc.gains);
      AoResult a = run_ao(downlink_phase(design), c, strategy, ao_rng.split({2}));
      dl = scored(a, truth, c, perturbed).total;
      iterations += a.iterations;
      converged = converged && a.converged;
      r.max_rank_residual = std::max(r.max_rank_residual, a.max_rank_residual);
      if (!run.ao) run.ao = std::move(a);
    }
    r.ul_ssr = 0.5 * ul;
    r.dl_ssr = 0.5 * dl;
    r.ssr = r.ul_ssr + r.dl_ssr;
    r.iterations = iterations;
    r.converged = converged;
  } else if (id == SchemeId::kRp) {
    SystemConfig c = config;
    c.ao.max_iterations = 1;
    Rng layouts = root.split({50});
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < options.random_layouts; ++i) {
      const AntennaLayout start = random_feasible_layout(config, layouts);
      AoResult a = run_ao(design, c, strategy, ao_rng, start);
      const SsrBreakdown b = scored(a, sc.gains, config, perturbed);
      r.max_rank_residual = std::max(r.max_rank_residual, a.max_rank_residual);
      if (b.total > best) {
        best = b.total;
        r.ssr = b.total;
        r.ul_ssr = b.ul_total();
        r.dl_ssr = b.dl_total();
        run.ao = std::move(a);
      }
    }
    r.iterations = options.random_layouts;
    r.converged = true;
  } else {
    AoResult a = run_ao(design, config, strategy, ao_rng);
    const SsrBreakdown b = scored(a, sc.gains, config, perturbed);
    r.ssr = b.total;
    r.ul_ssr = b.ul_total();
    r.dl_ssr = b.dl_total();
    r.iterations = a.iterations;
    r.converged = a.converged;
    r.max_rank_residual = a.max_rank_residual;
    run.ao = std::move(a);
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

TrialResult run_scheme(SchemeId id, const Scenario& scenario, const SchemeOptions& options) {
  return run_scheme_detailed(id, scenario, options).result;
}

}  // namespace masec
