#include "masec/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace masec {

namespace {

constexpr double kPi = std::numbers::pi;

LinkAngles draw_angles(int paths, Rng& rng) {
  LinkAngles a;
  a.elevation.resize(paths);
  a.azimuth.resize(paths);
  for (int l = 0; l < paths; ++l) {
    a.elevation[l] = rng.uniform(0.0, kPi);
    a.azimuth[l] = rng.uniform(0.0, kPi);
  }
  return a;
}

CVec draw_prv(int paths, double variance, Rng& rng) {
  CVec p(paths);
  for (int l = 0; l < paths; ++l) p[l] = rng.complex_normal(variance);
  return p;
}

void check_distance(double d, const char* what) {
  if (!(d > 0.0)) throw std::invalid_argument(std::string("nonpositive ") + what + " distance");
}

void perturb_angles(std::vector<double>& angles, double delta, Rng& rng) {
  for (double& a : angles) a = std::clamp(a + rng.uniform(-delta, delta), 0.0, kPi);
}

void perturb_angles(LinkAngles& a, double delta, Rng& rng) {
  perturb_angles(a.elevation, delta, rng);
  perturb_angles(a.azimuth, delta, rng);
}

void perturb_vector(CVec& v, double variance, Rng& rng) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += rng.complex_normal(variance);
}

}  // namespace

bool AntennaLayout::in_region(double region_size) const {
  const double half = region_size / 2.0;
  auto inside = [half](const Point2& p) {
    return p.x >= -half && p.x <= half && p.y >= -half && p.y <= half;
  };
  return std::all_of(tx.begin(), tx.end(), inside) && std::all_of(rx.begin(), rx.end(), inside);
}

bool AntennaLayout::feasible(const SystemConfig& config) const {
  if (!in_region(config.region_size)) return false;
  auto spaced = [&](const std::vector<Point2>& pts) {
    for (size_t a = 0; a < pts.size(); ++a)
      for (size_t b = a + 1; b < pts.size(); ++b)
        if (distance(pts[a], pts[b]) < config.min_distance) return false;
    return true;
  };
  return spaced(tx) && spaced(rx);
}

RVec AntennaLayout::to_vector() const {
  RVec u(2 * (tx.size() + rx.size()));
  Eigen::Index i = 0;
  for (const auto& p : tx) {
    u[i++] = p.x;
    u[i++] = p.y;
  }
  for (const auto& p : rx) {
    u[i++] = p.x;
    u[i++] = p.y;
  }
  return u;
}

AntennaLayout AntennaLayout::from_vector(const RVec& u, int num_tx, int num_rx) {
  if (u.size() != 2 * (num_tx + num_rx)) throw DimensionError("position vector length mismatch");
  AntennaLayout layout;
  layout.tx.resize(num_tx);
  layout.rx.resize(num_rx);
  for (int n = 0; n < num_tx; ++n) layout.tx[n] = {u[2 * n], u[2 * n + 1]};
  for (int n = 0; n < num_rx; ++n) layout.rx[n] = {u[2 * (num_tx + n)], u[2 * (num_tx + n) + 1]};
  return layout;
}

double phase_offset(const Point2& pos, double elevation, double azimuth) {
  return pos.x * std::sin(elevation) * std::cos(azimuth) + pos.y * std::cos(elevation);
}

CVec field_response_vector(const Point2& pos, const LinkAngles& angles, double wavelength) {
  const int paths = angles.size();
  if (static_cast<int>(angles.azimuth.size()) != paths) throw DimensionError("angle list mismatch");
  CVec g(paths);
  const double k = 2.0 * kPi / wavelength;
  for (int l = 0; l < paths; ++l) {
    const double phase = k * phase_offset(pos, angles.elevation[l], angles.azimuth[l]);
    g[l] = cd(std::cos(phase), std::sin(phase));
  }
  return g;
}

CMat field_response_matrix(std::span<const Point2> positions, const LinkAngles& angles,
                           double wavelength) {
  CMat m(angles.size(), static_cast<Eigen::Index>(positions.size()));
  for (size_t n = 0; n < positions.size(); ++n)
    m.col(static_cast<Eigen::Index>(n)) = field_response_vector(positions[n], angles, wavelength);
  return m;
}

CMat assemble_si_channel(const AntennaLayout& layout, const ChannelGains& gains, double wavelength) {
  if (gains.si_prm.rows() != gains.si_rx.size() || gains.si_prm.cols() != gains.si_tx.size())
    throw DimensionError("path-response matrix does not match the SI path counts");
  const CMat f = field_response_matrix(layout.rx, gains.si_rx, wavelength);
  const CMat g = field_response_matrix(layout.tx, gains.si_tx, wavelength);
  return f.adjoint() * gains.si_prm * g;
}

CVec assemble_link_channel(std::span<const Point2> positions, const LinkAngles& angles,
                           const CVec& prv, LinkSide /*side*/, double wavelength) {
  if (prv.size() != angles.size()) throw DimensionError("path-response vector length mismatch");
  return field_response_matrix(positions, angles, wavelength).adjoint() * prv;
}

ChannelSet materialize(const AntennaLayout& layout, const ChannelGains& gains, double wavelength) {
  if (gains.ub_angles.size() != gains.ub_prv.size() || gains.bd_angles.size() != gains.bd_prv.size() ||
      gains.be_angles.size() != gains.be_prv.size())
    throw DimensionError("per-terminal angle and path-response lists differ in length");
  ChannelSet set;
  set.h_si = assemble_si_channel(layout, gains, wavelength);
  set.h_ub.reserve(gains.ub_prv.size());
  for (size_t k = 0; k < gains.ub_prv.size(); ++k)
    set.h_ub.push_back(assemble_link_channel(layout.rx, gains.ub_angles[k], gains.ub_prv[k],
                                             LinkSide::kReceive, wavelength));
  set.h_bd.reserve(gains.bd_prv.size());
  for (size_t k = 0; k < gains.bd_prv.size(); ++k)
    set.h_bd.push_back(assemble_link_channel(layout.tx, gains.bd_angles[k], gains.bd_prv[k],
                                             LinkSide::kTransmit, wavelength));
  set.h_be.reserve(gains.be_prv.size());
  for (size_t k = 0; k < gains.be_prv.size(); ++k)
    set.h_be.push_back(assemble_link_channel(layout.tx, gains.be_angles[k], gains.be_prv[k],
                                             LinkSide::kTransmit, wavelength));
  set.h_ud = gains.h_ud;
  set.h_ue = gains.h_ue;
  return set;
}

ChannelGains sample_geometry_channels(const SystemConfig& config, const LinkDistances& d,
                                      const Rng& rng) {
  const int paths = config.num_paths;
  const int ku = static_cast<int>(d.ul.size());
  const int kd = static_cast<int>(d.dl.size());
  const int ke = static_cast<int>(d.eve.size());
  if (d.ul_to_dl.rows() != ku || d.ul_to_dl.cols() != kd || d.ul_to_eve.rows() != ku ||
      d.ul_to_eve.cols() != ke)
    throw DimensionError("user-to-user distance matrices do not match terminal counts");

  auto large_scale = [&](double dist) {
    return config.ref_path_loss * std::pow(dist, -config.path_loss_exp);
  };

  ChannelGains g;
  {
    Rng s = rng.split({1});
    g.si_tx = draw_angles(paths, s);
    g.si_rx = draw_angles(paths, s);
    g.si_prm_variance = config.si_loss / paths;
    g.si_prm = CMat::Zero(paths, paths);
    for (int l = 0; l < paths; ++l) g.si_prm(l, l) = s.complex_normal(g.si_prm_variance);
  }
  for (int k = 0; k < ku; ++k) {
    check_distance(d.ul[k], "UL user");
    Rng s = rng.split({2, static_cast<std::uint64_t>(k)});
    const double var = large_scale(d.ul[k]) / paths;
    g.ub_angles.push_back(draw_angles(paths, s));
    g.ub_prv.push_back(draw_prv(paths, var, s));
    g.ub_variance.push_back(var);
  }
  for (int k = 0; k < kd; ++k) {
    check_distance(d.dl[k], "DL user");
    Rng s = rng.split({3, static_cast<std::uint64_t>(k)});
    const double var = large_scale(d.dl[k]) / paths;
    g.bd_angles.push_back(draw_angles(paths, s));
    g.bd_prv.push_back(draw_prv(paths, var, s));
    g.bd_variance.push_back(var);
  }
  for (int k = 0; k < ke; ++k) {
    check_distance(d.eve[k], "Eve");
    Rng s = rng.split({4, static_cast<std::uint64_t>(k)});
    const double var = large_scale(d.eve[k]) / paths;
    g.be_angles.push_back(draw_angles(paths, s));
    g.be_prv.push_back(draw_prv(paths, var, s));
    g.be_variance.push_back(var);
  }
  g.h_ud = CMat::Zero(ku, kd);
  g.h_ue = CMat::Zero(ku, ke);
  for (int u = 0; u < ku; ++u) {
    for (int k = 0; k < kd; ++k) {
      check_distance(d.ul_to_dl(u, k), "user-to-user");
      Rng s = rng.split({5, static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(k)});
      g.h_ud(u, k) = s.complex_normal(large_scale(d.ul_to_dl(u, k)));
    }
    for (int e = 0; e < ke; ++e) {
      check_distance(d.ul_to_eve(u, e), "user-to-Eve");
      Rng s = rng.split({6, static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(e)});
      g.h_ue(u, e) = s.complex_normal(large_scale(d.ul_to_eve(u, e)));
    }
  }
  return g;
}

ChannelGains perturb_fri(const ChannelGains& gains, const FriError& error, Rng& rng) {
  if (error.magnitude < 0.0) throw std::invalid_argument("FRI error magnitude must be >= 0");
  ChannelGains out = gains;
  if (error.magnitude == 0.0) return out;
  const double m = error.magnitude;
  switch (error.kind) {
    case FriErrorKind::kPathResponse: {
      // A diagonal PRM stays diagonal; its zero pattern is structural.
      const bool diagonal = gains.si_prm.isDiagonal(0.0);
      for (Eigen::Index r = 0; r < out.si_prm.rows(); ++r)
        for (Eigen::Index c = 0; c < out.si_prm.cols(); ++c)
          if (!diagonal || r == c) out.si_prm(r, c) += rng.complex_normal(m * gains.si_prm_variance);
      for (size_t k = 0; k < out.ub_prv.size(); ++k) perturb_vector(out.ub_prv[k], m * gains.ub_variance[k], rng);
      for (size_t k = 0; k < out.bd_prv.size(); ++k) perturb_vector(out.bd_prv[k], m * gains.bd_variance[k], rng);
      for (size_t k = 0; k < out.be_prv.size(); ++k) perturb_vector(out.be_prv[k], m * gains.be_variance[k], rng);
      break;
    }
    case FriErrorKind::kDepartureAngle:
      perturb_angles(out.si_tx, m, rng);
      for (auto& a : out.bd_angles) perturb_angles(a, m, rng);
      for (auto& a : out.be_angles) perturb_angles(a, m, rng);
      break;
    case FriErrorKind::kArrivalAngle:
      perturb_angles(out.si_rx, m, rng);
      for (auto& a : out.ub_angles) perturb_angles(a, m, rng);
      break;
  }
  return out;
}

}  // namespace masec
