#include <gtest/gtest.h>

#include <numbers>

#include "masec/ao.hpp"
#include "masec/channel.hpp"
#include "support.hpp"

using namespace masec;
using masec::test::random_gains;

namespace {

constexpr double kPi = std::numbers::pi;

cd wave(const Point2& r, double th, double ph) {
  return std::polar(1.0, 2 * kPi * (r.x * std::sin(th) * std::cos(ph) + r.y * std::cos(th)));
}

LinkAngles angles(std::vector<double> el, std::vector<double> az) { return {std::move(el), std::move(az)}; }

}  // namespace

TEST(PhaseOffset, OriginIsZero) {
  EXPECT_EQ(phase_offset({0, 0}, 0.3, 2.1), 0.0);
  EXPECT_EQ(phase_offset({0, 0}, 2.9, 0.0), 0.0);
}

TEST(PhaseOffset, UnitXAtBroadside) { EXPECT_NEAR(phase_offset({1, 0}, kPi / 2, 0), 1.0, 1e-15); }

TEST(PhaseOffset, ScalarOracle) {
  // 0.3 sin(1.1) cos(2.0) - 0.7 cos(1.1)
  EXPECT_NEAR(phase_offset({0.3, -0.7}, 1.1, 2.0), -0.42877922207703306, 1e-12);
}

TEST(FieldResponse, OriginIsAllOnes) {
  const CVec g = field_response_vector({0, 0}, angles({0.1, 1.2, 3.0}, {0.5, 2.2, 1.0}));
  for (auto x : g) EXPECT_EQ(x, cd(1.0, 0.0));
}

TEST(FieldResponse, UnitModulus) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const Point2 p{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const CVec g = field_response_vector(p, angles({rng.uniform(0, kPi), rng.uniform(0, kPi)},
                                                   {rng.uniform(0, kPi), rng.uniform(0, kPi)}));
    for (auto x : g) EXPECT_NEAR(std::abs(x), 1.0, 1e-14);
  }
}

TEST(FieldResponse, HalfWavelengthFlipsSign) {
  const CVec g = field_response_vector({0.5, 0}, angles({kPi / 2}, {0.0}));
  EXPECT_NEAR(g[0].real(), -1.0, 1e-15);
  EXPECT_NEAR(g[0].imag(), 0.0, 1e-15);
}

TEST(FieldResponse, AngleListMismatch) {
  EXPECT_THROW(field_response_vector({0, 0}, angles({0.1, 0.2}, {0.3})), DimensionError);
}

TEST(SiChannel, SingleAntennaSinglePathAtOrigin) {
  ChannelGains g;
  g.si_tx = angles({0.7}, {1.3});
  g.si_rx = angles({2.1}, {0.4});
  g.si_prm = CMat::Constant(1, 1, cd(0.3, -0.2));
  const CMat h = assemble_si_channel({{{0, 0}}, {{0, 0}}}, g);
  EXPECT_EQ(h(0, 0), cd(0.3, -0.2));
}

TEST(SiChannel, PerPathOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    SystemConfig c = desk_config();
    c.num_tx = c.num_rx = 2;
    c.num_paths = 2;
    const ChannelGains g = random_gains(c, rng);
    const AntennaLayout lay = random_feasible_layout(c, rng);
    const CMat h = assemble_si_channel(lay, g);
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n) {
        cd ref = 0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            ref += std::conj(wave(lay.rx[m], g.si_rx.elevation[a], g.si_rx.azimuth[a])) * g.si_prm(a, b) *
                   wave(lay.tx[n], g.si_tx.elevation[b], g.si_tx.azimuth[b]);
        EXPECT_LE(std::abs(h(m, n) - ref), 1e-12 * std::abs(ref));
      }
  }
}

TEST(SiChannel, CommonShiftKeepsMagnitudes) {
  Rng rng(11);
  SystemConfig c = desk_config();
  c.num_paths = 1;  // a single path pair makes the shift a pure per-entry phase
  const ChannelGains g = random_gains(c, rng);
  const AntennaLayout lay = random_feasible_layout(c, rng);
  AntennaLayout moved = lay;
  const Point2 d{0.37, -0.81};
  for (auto& p : moved.tx) p = {p.x + d.x, p.y + d.y};
  for (auto& p : moved.rx) p = {p.x + d.x, p.y + d.y};
  const CMat a = assemble_si_channel(lay, g), b = assemble_si_channel(moved, g);
  EXPECT_LE((a.cwiseAbs() - b.cwiseAbs()).norm(), 1e-12 * a.norm());
}

TEST(SiChannel, DimensionMismatch) {
  ChannelGains g;
  g.si_tx = angles({0.1}, {0.1});
  g.si_rx = angles({0.1, 0.2}, {0.1, 0.2});
  g.si_prm = CMat::Zero(1, 1);
  EXPECT_THROW(assemble_si_channel({{{0, 0}}, {{0, 0}}}, g), DimensionError);
}

TEST(LinkChannel, SingleAntennaAtOriginSumsConjugatedPrv) {
  const CVec prv = (CVec(3) << cd(1, 2), cd(-0.5, 0.1), cd(0, -1)).finished();
  const std::vector<Point2> pos{{0, 0}};
  const CVec h = assemble_link_channel(pos, angles({0.2, 1.0, 2.0}, {0.3, 0.4, 0.5}), prv, LinkSide::kTransmit);
  EXPECT_NEAR(std::abs(h[0] - prv.sum()), 0.0, 1e-15);
}

TEST(LinkChannel, OnePathUnitPrvIsConjugatedFrv) {
  const std::vector<Point2> pos{{0.3, 0.1}, {-1.2, 0.8}};
  const LinkAngles a = angles({1.1}, {0.6});
  const CVec h = assemble_link_channel(pos, a, CVec::Ones(1), LinkSide::kReceive);
  for (int n = 0; n < 2; ++n) EXPECT_NEAR(std::abs(h[n] - std::conj(field_response_vector(pos[n], a)[0])), 0, 1e-15);
}

TEST(LinkChannel, PerPathOracle) {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    std::vector<Point2> pos;
    for (int n = 0; n < 3; ++n) pos.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2)});
    LinkAngles a;
    for (int l = 0; l < 3; ++l) {
      a.elevation.push_back(rng.uniform(0, kPi));
      a.azimuth.push_back(rng.uniform(0, kPi));
    }
    const CVec prv = masec::test::random_cvec(3, 1.0, rng);
    const CVec h = assemble_link_channel(pos, a, prv, LinkSide::kTransmit);
    for (int n = 0; n < 3; ++n) {
      cd ref = 0;
      for (int l = 0; l < 3; ++l) ref += std::conj(wave(pos[n], a.elevation[l], a.azimuth[l])) * prv[l];
      EXPECT_LE(std::abs(h[n] - ref), 1e-12 * std::abs(ref));
    }
  }
}

TEST(LinkChannel, PrvLengthMismatch) {
  const std::vector<Point2> pos{{0, 0}};
  EXPECT_THROW(assemble_link_channel(pos, angles({0.1}, {0.1}), CVec::Ones(2), LinkSide::kTransmit), DimensionError);
}

TEST(Materialize, DeterministicAndComposed) {
  Rng rng(8);
  const SystemConfig c = desk_config();
  const ChannelGains g = random_gains(c, rng);
  const AntennaLayout lay = random_feasible_layout(c, rng);
  const ChannelSet a = materialize(lay, g), b = materialize(lay, g);
  EXPECT_EQ(a.h_si, b.h_si);
  EXPECT_EQ(a.h_ub, b.h_ub);
  EXPECT_EQ(a.h_si, assemble_si_channel(lay, g));
  EXPECT_EQ(a.h_bd[1], assemble_link_channel(lay.tx, g.bd_angles[1], g.bd_prv[1], LinkSide::kTransmit));
  EXPECT_EQ(a.h_ub[0], assemble_link_channel(lay.rx, g.ub_angles[0], g.ub_prv[0], LinkSide::kReceive));
}

TEST(Materialize, NoEves) {
  Rng rng(9);
  SystemConfig c = desk_config();
  c.k_eve = 0;
  const ChannelSet ch = materialize(grid_layout(c), random_gains(c, rng));
  EXPECT_TRUE(ch.h_be.empty());
  EXPECT_EQ(ch.k_ul(), 2);
  EXPECT_EQ(ch.k_dl(), 2);
}

TEST(Materialize, InfeasibleLayoutStillEvaluates) {
  Rng rng(10);
  const SystemConfig c = desk_config();
  AntennaLayout lay;
  lay.tx.assign(4, {0, 0});
  lay.rx.assign(4, {0.1, 0});
  EXPECT_NO_THROW(materialize(lay, random_gains(c, rng)));
}

TEST(GeometryChannels, SiPrmMomentAndDiagonal) {
  SystemConfig c = desk_config();
  c.k_ul = c.k_dl = c.k_eve = 0;
  LinkDistances d;
  d.ul_to_dl = RMat(0, 0);
  d.ul_to_eve = RMat(0, 0);
  double sum = 0;
  int n = 0;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    const ChannelGains g = sample_geometry_channels(c, d, Rng(s));
    for (int i = 0; i < c.num_paths; ++i)
      for (int j = 0; j < c.num_paths; ++j)
        if (i != j) ASSERT_EQ(g.si_prm(i, j), cd(0.0));
        else {
          sum += std::norm(g.si_prm(i, i));
          ++n;
        }
  }
  EXPECT_NEAR(sum / n / (c.si_loss / c.num_paths), 1.0, 0.03);  // 1.2e5 draws
}

TEST(GeometryChannels, PrvMomentAt100m) {
  SystemConfig c = desk_config();
  c.k_ul = 1;
  c.k_dl = c.k_eve = 0;
  LinkDistances d;
  d.ul = {100.0};
  d.ul_to_dl = RMat(1, 0);
  d.ul_to_eve = RMat(1, 0);
  double sum = 0;
  int n = 0;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    const ChannelGains g = sample_geometry_channels(c, d, Rng(s));
    for (auto x : g.ub_prv[0]) {
      sum += std::norm(x);
      ++n;
    }
  }
  const double expected = c.ref_path_loss * std::pow(100.0, -c.path_loss_exp) / c.num_paths;
  EXPECT_NEAR(sum / n / expected, 1.0, 0.03);
}

TEST(GeometryChannels, AnglesInRange) {
  Rng rng(2);
  const SystemConfig c = desk_config();
  const ChannelGains g = random_gains(c, rng);
  for (const auto& a : g.bd_angles)
    for (int l = 0; l < a.size(); ++l) {
      EXPECT_GE(a.elevation[l], 0.0);
      EXPECT_LE(a.elevation[l], kPi);
      EXPECT_GE(a.azimuth[l], 0.0);
      EXPECT_LE(a.azimuth[l], kPi);
    }
}

TEST(GeometryChannels, NonpositiveDistanceRejected) {
  SystemConfig c = desk_config();
  c.k_ul = 1;
  c.k_dl = c.k_eve = 0;
  LinkDistances d;
  d.ul = {0.0};
  d.ul_to_dl = RMat(1, 0);
  d.ul_to_eve = RMat(1, 0);
  EXPECT_ANY_THROW(sample_geometry_channels(c, d, Rng(1)));
}

TEST(PerturbFri, ZeroErrorIsIdentity) {
  Rng rng(4);
  const ChannelGains g = random_gains(desk_config(), rng);
  for (auto kind : {FriErrorKind::kPathResponse, FriErrorKind::kDepartureAngle, FriErrorKind::kArrivalAngle}) {
    Rng r(1);
    const ChannelGains p = perturb_fri(g, {kind, 0.0}, r);
    EXPECT_EQ(p.si_prm, g.si_prm);
    EXPECT_EQ(p.bd_prv, g.bd_prv);
    EXPECT_EQ(p.bd_angles[0].elevation, g.bd_angles[0].elevation);
    EXPECT_EQ(p.ub_angles[0].azimuth, g.ub_angles[0].azimuth);
  }
}

TEST(PerturbFri, NegativeRejected) {
  Rng rng(4);
  const ChannelGains g = random_gains(desk_config(), rng);
  EXPECT_ANY_THROW(perturb_fri(g, {FriErrorKind::kPathResponse, -0.1}, rng));
}

TEST(PerturbFri, OnlyOneFamilyChanges) {
  Rng rng(4);
  const ChannelGains g = random_gains(desk_config(), rng);
  Rng r(2);
  const ChannelGains aod = perturb_fri(g, {FriErrorKind::kDepartureAngle, 0.3}, r);
  EXPECT_NE(aod.bd_angles[0].elevation, g.bd_angles[0].elevation);
  EXPECT_EQ(aod.ub_angles[0].elevation, g.ub_angles[0].elevation);
  EXPECT_EQ(aod.bd_prv, g.bd_prv);
  const ChannelGains aoa = perturb_fri(g, {FriErrorKind::kArrivalAngle, 0.3}, r);
  EXPECT_NE(aoa.ub_angles[0].azimuth, g.ub_angles[0].azimuth);
  EXPECT_EQ(aoa.bd_angles[0].azimuth, g.bd_angles[0].azimuth);
}

TEST(PerturbFri, FullAngleErrorStaysClipped) {
  Rng rng(4);
  const ChannelGains g = random_gains(desk_config(), rng);
  Rng r(2);
  const ChannelGains p = perturb_fri(g, {FriErrorKind::kDepartureAngle, kPi}, r);
  for (const auto& a : p.be_angles)
    for (int l = 0; l < a.size(); ++l) {
      EXPECT_GE(a.elevation[l], 0.0);
      EXPECT_LE(a.elevation[l], kPi);
    }
}

TEST(PerturbFri, PrvErrorVarianceMoment) {
  SystemConfig c = desk_config();
  Rng rng(6);
  const ChannelGains g = random_gains(c, rng);
  const double eta = 0.5;
  double sum = 0;
  int n = 0;
  Rng r(7);
  for (int t = 0; t < 20000; ++t) {
    const ChannelGains p = perturb_fri(g, {FriErrorKind::kPathResponse, eta}, r);
    for (int l = 0; l < c.num_paths; ++l) {
      sum += std::norm(p.bd_prv[0][l] - g.bd_prv[0][l]);
      ++n;
    }
  }
  EXPECT_NEAR(sum / n / (eta * g.bd_variance[0]), 1.0, 0.03);
}
