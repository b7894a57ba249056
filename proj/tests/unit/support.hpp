#pragma once

#include <cmath>

#include "masec/channel.hpp"
#include "masec/config.hpp"
#include "masec/objective.hpp"
#include "masec/rng.hpp"
#include "masec/schemes.hpp"

namespace masec::test {

inline LinkDistances random_distances(const SystemConfig& c, Rng& rng) {
  auto r = [&] { return c.cell_radius * std::sqrt(1.0 - rng.uniform()); };
  LinkDistances d;
  for (int i = 0; i < c.k_ul; ++i) d.ul.push_back(r());
  for (int i = 0; i < c.k_dl; ++i) d.dl.push_back(r());
  for (int i = 0; i < c.k_eve; ++i) d.eve.push_back(r());
  d.ul_to_dl = RMat::NullaryExpr(c.k_ul, c.k_dl, [&] { return r() + 1.0; });
  d.ul_to_eve = RMat::NullaryExpr(c.k_ul, c.k_eve, [&] { return r() + 1.0; });
  return d;
}

inline ChannelGains random_gains(const SystemConfig& c, Rng& rng) {
  return sample_geometry_channels(c, random_distances(c, rng), rng.split({1}));
}

inline CVec random_cvec(int n, double variance, Rng& rng) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.complex_normal(variance);
  return v;
}

inline CMat random_hermitian(int n, Rng& rng) {
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.complex_normal(1.0);
  CMat h = a + a.adjoint();
  return h / h.norm();
}

inline TxSolution random_solution(const ChannelSet& ch, const SystemConfig& c, Rng& rng) {
  TxSolution s;
  const double share = c.p_max_dl / (ch.k_dl() + 1) / ch.num_tx();
  for (int k = 0; k < ch.k_dl(); ++k) s.w.push_back(random_cvec(ch.num_tx(), share, rng));
  s.v = random_cvec(ch.num_tx(), share, rng);
  for (int k = 0; k < ch.k_ul(); ++k) s.p.push_back(c.p_max_ul * rng.uniform(0.1, 1.0));
  for (int k = 0; k < ch.k_ul(); ++k) s.b.push_back(random_cvec(ch.num_rx(), 1.0, rng).normalized());
  return s;
}

struct Instance {
  SystemConfig config;
  ChannelGains gains;
  AntennaLayout layout;
  ChannelSet channels;
  TxSolution solution;
};

inline Instance random_instance(const SystemConfig& c, std::uint64_t seed) {
  Rng rng(seed);
  Instance in;
  in.config = c;
  in.gains = random_gains(c, rng);
  in.layout = random_feasible_layout(c, rng);
  in.channels = materialize(in.layout, in.gains, c.wavelength);
  in.solution = random_solution(in.channels, c, rng);
  return in;
}

// Small enough for full AO runs inside a unit test.
inline SystemConfig tiny_config() {
  SystemConfig c = desk_config();
  c.num_tx = c.num_rx = 3;
  c.num_paths = 4;
  c.k_ul = c.k_dl = c.k_eve = 1;
  c.swarm.particles = 8;
  c.swarm.iterations = 6;
  c.sca.max_iterations = 10;
  c.ao.max_iterations = 4;
  return c;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace masec::test
