#include "masec/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

namespace masec {

namespace {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

}  // namespace

Point2 sample_in_disk(double radius, Rng& rng) {
  const double r = radius * std::sqrt(1.0 - rng.uniform());
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  return {r * std::cos(phi), r * std::sin(phi)};
}

Scenario build_scenario(const SystemConfig& config, std::uint64_t seed) {
  config.validate();
  Scenario sc;
  sc.config = config;
  sc.seed = seed;
  const Rng root(seed);
  auto place = [&](int n, std::uint64_t kind) {
    std::vector<Point2> pts;
    for (int i = 0; i < n; ++i) {
      Rng s = root.split({10, kind, static_cast<std::uint64_t>(i)});
      pts.push_back(sample_in_disk(config.cell_radius, s));
    }
    return pts;
  };
  sc.ul_users = place(config.k_ul, 0);
  sc.dl_users = place(config.k_dl, 1);
  sc.eves = place(config.k_eve, 2);

  const Point2 bs{0.0, 0.0};
  auto& d = sc.distances;
  for (const auto& p : sc.ul_users) d.ul.push_back(distance(bs, p));
  for (const auto& p : sc.dl_users) d.dl.push_back(distance(bs, p));
  for (const auto& p : sc.eves) d.eve.push_back(distance(bs, p));
  d.ul_to_dl.resize(config.k_ul, config.k_dl);
  d.ul_to_eve.resize(config.k_ul, config.k_eve);
  for (int u = 0; u < config.k_ul; ++u) {
    for (int k = 0; k < config.k_dl; ++k) d.ul_to_dl(u, k) = distance(sc.ul_users[u], sc.dl_users[k]);
    for (int e = 0; e < config.k_eve; ++e) d.ul_to_eve(u, e) = distance(sc.ul_users[u], sc.eves[e]);
  }
  sc.gains = sample_geometry_channels(config, d, root.split({20}));
  return sc;
}

std::uint64_t trial_seed(std::uint64_t master, int index) {
  return derive_seed(master, {static_cast<std::uint64_t>(index)});
}

const SchemeStats& MonteCarloStats::of(SchemeId id) const {
  for (const auto& s : schemes)
    if (s.scheme == id) return s;
  throw ConfigError("scheme '" + std::string(scheme_name(id)) + "' was not run");
}

SchemeStats summarize(SchemeId scheme, const std::vector<TrialResult>& trials) {
  SchemeStats s;
  s.scheme = scheme;
  std::vector<double> v;
  double ul = 0.0, dl = 0.0;
  for (const auto& t : trials) {
    if (t.scheme != scheme) continue;
    if (!t.ok) {
      ++s.failures;
      continue;
    }
    v.push_back(t.ssr);
    ul += t.ul_ssr;
    dl += t.dl_ssr;
  }
  s.n = static_cast<int>(v.size());
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / s.n;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = s.n > 1 ? std::sqrt(ss / (s.n - 1)) : 0.0;
  s.q10 = quantile(v, 0.1);
  s.median = quantile(v, 0.5);
  s.q90 = quantile(v, 0.9);
  s.mean_ul = ul / s.n;
  s.mean_dl = dl / s.n;
  return s;
}

MonteCarloStats monte_carlo(const SystemConfig& config, const std::vector<SchemeId>& schemes, int n_trials,
                            int parallelism, std::uint64_t master_seed, const SchemeOptions& options) {
  if (n_trials < 1) throw ConfigError("need at least one trial");
  config.validate();
  const int ns = static_cast<int>(schemes.size());
  const int jobs = n_trials * ns;
  MonteCarloStats out;
  out.trials.resize(jobs);

  auto run_job = [&](int j) {
    const int trial = j / ns;
    const SchemeId id = schemes[j % ns];
    TrialResult& r = out.trials[j];
    r.scheme = id;
    r.trial = trial;
    r.seed = trial_seed(master_seed, trial);
    try {
      const Scenario sc = build_scenario(config, r.seed);
      r = run_scheme(id, sc, options);
      r.trial = trial;
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
  };
  const int threads = std::clamp(parallelism, 1, std::max(jobs, 1));
  std::vector<std::thread> pool;
  auto worker = [&](int t) {
    for (int j = t; j < jobs; j += threads) run_job(j);
  };
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker, t);
  worker(0);
  for (auto& th : pool) th.join();

  for (SchemeId id : schemes) out.schemes.push_back(summarize(id, out.trials));
  return out;
}

}  // namespace masec
