#include "masec/ao.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace masec {

namespace {

std::vector<CVec> receivers_for(const ChannelSet& ch, const TxSolution& sol, const AoStrategy& strategy) {
  if (strategy.receiver != ReceiverRule::kZeroForcing) return sol.b;
  std::vector<CVec> b;
  for (int k = 0; k < ch.k_ul(); ++k) b.push_back(zf_receiver(ch, k));
  return b;
}

double evaluate(const ChannelSet& ch, TxSolution sol, const SystemConfig& config, const AoStrategy& strategy) {
  sol.b = receivers_for(ch, sol, strategy);
  return ssr(build_context(ch, sol, config)).total;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

bool clear_of(const std::vector<Point2>& side, size_t skip, const Point2& p, double d) {
  for (size_t j = 0; j < side.size(); ++j)
    if (j != skip && distance(side[j], p) < d) return false;
  return true;
}

struct RoundState {
  AntennaLayout layout;
  ScaPoint cov;
};

bool continuous_positions(PositionSearch s) {
  return s == PositionSearch::kMvpso || s == PositionSearch::kStandardPso;
}

// Tries current + t (current - previous) for a shrinking t; keeps the best
// candidate only if it beats `current`.
bool extrapolate_round(const RoundState& prev, const ChannelGains& gains, const SystemConfig& config,
                       const AoStrategy& strategy, double& boost, AntennaLayout& layout, ChannelSet& ch,
                       TxSolution& sol, double& current) {
  const ScaPoint now = covariance_of(sol);
  const bool move = continuous_positions(strategy.positions);
  struct Candidate {
    AntennaLayout layout;
    ChannelSet ch;
    TxSolution sol;
    double value;
  };
  auto at = [&](double t) -> std::optional<Candidate> {
    AntennaLayout cand = layout;
    if (move) {
      auto step = [t](std::vector<Point2>& pts, const std::vector<Point2>& old) {
        for (size_t i = 0; i < pts.size(); ++i) {
          pts[i].x += t * (pts[i].x - old[i].x);
          pts[i].y += t * (pts[i].y - old[i].y);
        }
      };
      step(cand.tx, prev.layout.tx);
      step(cand.rx, prev.layout.rx);
      if (!cand.feasible(config)) return std::nullopt;
    }
    std::vector<CMat> W(now.W.size());
    for (size_t k = 0; k < W.size(); ++k) W[k] = now.W[k] + t * (now.W[k] - prev.cov.W[k]);
    const CMat V = now.V + t * (now.V - prev.cov.V);
    std::vector<double> p(now.p.size());
    for (size_t k = 0; k < p.size(); ++k) p[k] = now.p[k] + t * (now.p[k] - prev.cov.p[k]);
    const ScaPoint proj = project_feasible_exact(W, V, p, config, strategy.sca);

    TxSolution trial;
    for (const auto& m : proj.W) trial.w.push_back(extract_rank_one(m).vector);
    trial.v = strategy.sca.allow_an ? extract_rank_one(proj.V).vector : CVec(CVec::Zero(proj.V.rows()));
    trial.p = proj.p;
    trial.b = sol.b;
    ChannelSet moved = move ? materialize(cand, gains, config.wavelength) : ch;
    trial.b = receivers_for(moved, trial, strategy);
    trial.b = update_receivers(moved, trial, config, strategy);
    const double v = ssr(build_context(moved, trial, config)).total;
    return Candidate{std::move(cand), std::move(moved), std::move(trial), v};
  };

  std::optional<Candidate> best;
  double t_best = 0.0;
  for (double t = boost; t >= 1.0 / 64; t /= 2.0) {
    auto c = at(t);
    if (c && c->value > current) {
      best = std::move(c);
      t_best = t;
      break;
    }
  }
  if (!best) {
    boost = std::max(boost / 2.0, 1.0 / 64);
    return false;
  }
  // Keep doubling while the objective keeps improving.
  if (t_best == boost) {
    for (double t = 2.0 * t_best; t <= 64.0; t *= 2.0) {
      auto c = at(t);
      if (!c || c->value <= best->value) break;
      best = std::move(c);
      t_best = t;
    }
  }
  boost = std::min(2.0 * t_best, 64.0);
  layout = std::move(best->layout);
  ch = std::move(best->ch);
  sol = std::move(best->sol);
  current = best->value;
  return true;
}

// Coordinate-wise compass search with halving steps; feasible moves only.
AntennaLayout polish_layout(const AntennaLayout& start, const ChannelGains& gains, const TxSolution& solution,
                            const SystemConfig& config, const AoStrategy& strategy) {
  RVec u = start.to_vector();
  auto value = [&](const RVec& x) {
    return layout_ssr(AntennaLayout::from_vector(x, config.num_tx, config.num_rx), gains, solution, config,
                      strategy);
  };
  double best = value(u);
  const double h = config.region_size / 2.0;
  int budget = 4000;
  for (double step = config.region_size / 40.0; step > 1e-5 * config.wavelength && budget > 0;) {
    bool moved = false;
    for (Eigen::Index i = 0; i < u.size() && budget > 0; ++i) {
      for (double dir : {1.0, -1.0}) {
        RVec x = u;
        x[i] += dir * step;
        if (std::abs(x[i]) > h) continue;
        const AntennaLayout l = AntennaLayout::from_vector(x, config.num_tx, config.num_rx);
        if (!l.feasible(config)) continue;
        --budget;
        const double v = value(x);
        if (v > best) {
          best = v;
          u = std::move(x);
          moved = true;
          break;
        }
      }
    }
    if (!moved) step /= 2.0;
  }
  return AntennaLayout::from_vector(u, config.num_tx, config.num_rx);
}

}  // namespace

std::vector<Point2> grid_points(int n, double aperture, double min_distance) {
  if (n < 1) throw ConfigError("grid needs at least one element");
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int rows = (n + cols - 1) / cols;
  const double dx = cols > 1 ? aperture / (cols - 1) : 0.0;
  const double dy = rows > 1 ? aperture / (rows - 1) : 0.0;
  if ((cols > 1 && dx < min_distance) || (rows > 1 && dy < min_distance))
    throw ConfigError("cannot place " + std::to_string(n) + " antennas on a grid with spacing >= " +
                      std::to_string(min_distance) + " inside an aperture of " + std::to_string(aperture));
  const double x0 = cols > 1 ? -aperture / 2.0 : 0.0;
  const double y0 = rows > 1 ? -aperture / 2.0 : 0.0;
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i) pts.push_back({x0 + (i % cols) * dx, y0 + (i / cols) * dy});
  return pts;
}

AntennaLayout grid_layout(const SystemConfig& config) {
  return {grid_points(config.num_tx, config.region_size, config.min_distance),
          grid_points(config.num_rx, config.region_size, config.min_distance)};
}

TxSolution initial_solution(const ChannelSet& ch, const SystemConfig& config, const AoStrategy& strategy) {
  const int nt = ch.num_tx();
  const double amp = std::sqrt(config.p_max_dl / (ch.k_dl() + 1));
  TxSolution s;
  for (int k = 0; k < ch.k_dl(); ++k) s.w.push_back(amp * mrc_receiver(ch.h_bd[k]));
  s.v = strategy.sca.allow_an ? CVec(CVec::Constant(nt, amp / std::sqrt(static_cast<double>(nt))))
                              : CVec(CVec::Zero(nt));
  s.p.assign(ch.k_ul(), config.p_max_ul);
  for (int k = 0; k < ch.k_ul(); ++k) s.b.push_back(mrc_receiver(ch.h_ub[k]));
  s.b = receivers_for(ch, s, strategy);
  return s;
}

std::vector<CVec> update_receivers(const ChannelSet& ch, const TxSolution& sol, const SystemConfig& config,
                                   const AoStrategy& strategy) {
  if (strategy.receiver == ReceiverRule::kZeroForcing) return receivers_for(ch, sol, strategy);
  std::vector<CVec> b = sol.b;
  const ObjectiveContext before = build_context(ch, sol, config);
  for (int k = 0; k < ch.k_ul(); ++k) {
    TxSolution trial = sol;
    trial.b[k] = optimal_receiver(ch, sol.w, sol.v, sol.p, k, config, strategy.si_covariance);
    const ObjectiveContext after = build_context(ch, trial, config);
    if (sinr_ul(after, k) > sinr_ul(before, k)) b[k] = trial.b[k];
  }
  return b;
}

double layout_ssr(const AntennaLayout& layout, const ChannelGains& gains, const TxSolution& solution,
                  const SystemConfig& config, const AoStrategy& strategy) {
  return evaluate(materialize(layout, gains, config.wavelength), solution, config, strategy);
}

AntennaLayout alternating_position_search(const AntennaLayout& start, const ChannelGains& gains,
                                          const TxSolution& solution, const SystemConfig& config,
                                          const AoStrategy& strategy) {
  const double h = config.region_size / 2.0;
  const int steps = static_cast<int>(std::floor(config.region_size / strategy.apo_step + 1e-9));
  std::vector<double> axis;
  for (int i = 0; i <= steps; ++i) axis.push_back(-h + i * strategy.apo_step);

  AntennaLayout cur = start;
  double best = layout_ssr(cur, gains, solution, config, strategy);
  bool moved = true;
  while (moved) {
    moved = false;
    for (int side = 0; side < 2; ++side) {
      const size_t count = side == 0 ? cur.tx.size() : cur.rx.size();
      for (size_t i = 0; i < count; ++i) {
        auto& pts = side == 0 ? cur.tx : cur.rx;
        Point2 keep = pts[i];
        Point2 choice = keep;
        for (double x : axis)
          for (double y : axis) {
            const Point2 p{x, y};
            if (!clear_of(pts, i, p, config.min_distance)) continue;
            pts[i] = p;
            const double v = layout_ssr(cur, gains, solution, config, strategy);
            if (v > best) {
              best = v;
              choice = p;
            }
          }
        pts[i] = choice;
        if (!(choice == keep)) moved = true;
      }
    }
  }
  return cur;
}

AntennaLayout select_antennas(const std::vector<Point2>& tx_ports, const std::vector<Point2>& rx_ports,
                              const ChannelGains& gains, const TxSolution& solution,
                              const SystemConfig& config, const AoStrategy& strategy) {
  const int nt = config.num_tx, nr = config.num_rx;
  const int pt = static_cast<int>(tx_ports.size()), pr = static_cast<int>(rx_ports.size());
  if (pt < nt || pr < nr) throw ConfigError("antenna selection needs at least N ports per side");
  const double combos = binomial(pt, nt) * binomial(pr, nr);
  if (combos > 1e5)
    throw ConfigError("antenna selection would enumerate " + std::to_string(static_cast<long long>(combos)) +
                      " subsets; use at most 4 antennas per side");
  const auto tx_sets = subsets(pt, nt);
  const auto rx_sets = subsets(pr, nr);
  AntennaLayout best_layout;
  double best = -std::numeric_limits<double>::infinity();
  AntennaLayout cand;
  cand.tx.resize(nt);
  cand.rx.resize(nr);
  for (const auto& ts : tx_sets) {
    for (int i = 0; i < nt; ++i) cand.tx[i] = tx_ports[ts[i]];
    for (const auto& rs : rx_sets) {
      for (int i = 0; i < nr; ++i) cand.rx[i] = rx_ports[rs[i]];
      const double v = layout_ssr(cand, gains, solution, config, strategy);
      if (v > best) {
        best = v;
        best_layout = cand;
      }
    }
  }
  return best_layout;
}

AoResult run_ao(const ChannelGains& gains, const SystemConfig& config, const AoStrategy& strategy,
                const Rng& rng, const std::optional<AntennaLayout>& start) {
  config.validate();
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const double lambda = config.wavelength;

  std::vector<Point2> tx_ports, rx_ports;
  if (strategy.positions == PositionSearch::kSelection) {
    const int per_tx = strategy.selection_ports > 0 ? strategy.selection_ports : 2 * config.num_tx;
    const int per_rx = strategy.selection_ports > 0 ? strategy.selection_ports : 2 * config.num_rx;
    tx_ports = grid_points(per_tx, config.region_size, config.min_distance);
    rx_ports = grid_points(per_rx, config.region_size, config.min_distance);
  }

  AoResult out;
  if (start) {
    out.layout = *start;
  } else if (strategy.positions == PositionSearch::kSelection) {
    out.layout.tx.assign(tx_ports.begin(), tx_ports.begin() + config.num_tx);
    out.layout.rx.assign(rx_ports.begin(), rx_ports.begin() + config.num_rx);
  } else {
    out.layout = grid_layout(config);
  }
  if (static_cast<int>(out.layout.tx.size()) != config.num_tx ||
      static_cast<int>(out.layout.rx.size()) != config.num_rx)
    throw DimensionError("start layout does not match the antenna counts");

  ChannelSet ch = materialize(out.layout, gains, lambda);
  out.solution = initial_solution(ch, config, strategy);
  double current = ssr(build_context(ch, out.solution, config)).total;
  out.initial_ssr = current;

  std::optional<RoundState> prev;
  double boost = 1.0;
  for (int c = 1; c <= config.ao.max_iterations; ++c) {
    AoRecord rec;
    rec.iteration = c;
    const double before = current;

    // Sub-problem 1: antenna positions with the transmit/receive design fixed.
    AntennaLayout proposal = out.layout;
    switch (strategy.positions) {
      case PositionSearch::kFrozen:
        break;
      case PositionSearch::kMvpso:
      case PositionSearch::kStandardPso: {
        const TxSolution fixed = out.solution;
        SsrEvaluator eval = [&](const RVec& u) {
          return layout_ssr(AntennaLayout::from_vector(u, config.num_tx, config.num_rx), gains, fixed, config,
                            strategy);
        };
        Rng swarm_rng = rng.split({static_cast<std::uint64_t>(c)});
        SwarmResult sr;
        if (strategy.positions == PositionSearch::kMvpso) {
          SwarmOptions opt;
          opt.incumbent = out.layout.to_vector();
          sr = optimize_positions(eval, config, swarm_rng, opt);
        } else {
          sr = standard_pso(eval, config, swarm_rng, out.layout.to_vector());
        }
        out.penalty_dominance_violated = out.penalty_dominance_violated || sr.penalty_dominance_violated;
        proposal = sr.layout;
        if (strategy.polish && proposal.feasible(config))
          proposal = polish_layout(proposal, gains, fixed, config, strategy);
        rec.penalty = sr.penalty;
        if (strategy.keep_swarm_traces) out.swarms.push_back(std::move(sr));
        break;
      }
      case PositionSearch::kAlternating:
        proposal = alternating_position_search(out.layout, gains, out.solution, config, strategy);
        break;
      case PositionSearch::kSelection:
        proposal = select_antennas(tx_ports, rx_ports, gains, out.solution, config, strategy);
        break;
    }
    if (!(proposal == out.layout) && proposal.feasible(config)) {
      const ChannelSet moved = materialize(proposal, gains, lambda);
      TxSolution sol = out.solution;
      sol.b = receivers_for(moved, sol, strategy);
      const double v = ssr(build_context(moved, sol, config)).total;
      if (v >= current) {
        out.layout = proposal;
        ch = moved;
        out.solution = sol;
        current = v;
      }
    }
    rec.ssr_positions = current;

    // Sub-problem 2: transmit covariances and UL powers by SCA.
    const ScaPoint init = c == 1 ? default_sca_init(ch, config, strategy.sca) : covariance_of(out.solution);
    std::vector<ScaPoint> starts{init};
    if (strategy.cold_start && c > 1) starts.push_back(default_sca_init(ch, config, strategy.sca));
    for (const ScaPoint& st : starts) {
      ScaResult tx = optimize_tx(ch, out.solution.b, st, config, strategy.sca);
      TxSolution sol{tx.w, tx.v, tx.p, out.solution.b};
      const double v = ssr(build_context(ch, sol, config)).total;
      if (v >= current) {
        out.solution = std::move(sol);
        current = v;
        rec.max_rank_residual = tx.max_rank_residual;
      }
    }
    out.max_rank_residual = std::max(out.max_rank_residual, rec.max_rank_residual);
    rec.ssr_transmit = current;

    // Sub-problem 3: receive beamformers.
    out.solution.b = update_receivers(ch, out.solution, config, strategy);
    current = ssr(build_context(ch, out.solution, config)).total;
    if (strategy.extrapolate && strategy.positions != PositionSearch::kSelection &&
        strategy.positions != PositionSearch::kAlternating) {
      const RoundState here{out.layout, covariance_of(out.solution)};
      if (prev) extrapolate_round(*prev, gains, config, strategy, boost, out.layout, ch, out.solution, current);
      prev = here;
    }
    rec.ssr_receive = current;
    rec.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    out.trace.push_back(rec);
    out.iterations = c;
    if (current - before < config.ao.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.breakdown = ssr(build_context(ch, out.solution, config));
  out.ssr = out.breakdown.total;
  return out;
}

}  // namespace masec
