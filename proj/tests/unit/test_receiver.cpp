#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "masec/receiver.hpp"
#include "support.hpp"

using namespace masec;
using namespace masec::test;

namespace {

double rayleigh(const CVec& b, const CVec& h, const CMat& a) {
  return std::norm(b.dot(h)) / b.dot(a * b).real();
}

double parallel(const CVec& a, const CVec& b) { return std::abs(a.dot(b)) / (a.norm() * b.norm()); }

}  // namespace

TEST(InterferenceMatrix, SingleUserNoSiIsNoise) {
  SystemConfig c = desk_config();
  c.k_ul = 1;
  c.si_loss = 0.0;
  const Instance in = random_instance(c, 1);
  const CMat a = interference_matrix(in.channels, in.solution.w, in.solution.v, in.solution.p, 0, c);
  EXPECT_LE((a - c.noise_ul * CMat::Identity(c.num_rx, c.num_rx)).norm(), 1e-30);
}

TEST(InterferenceMatrix, AllSilentIsNoise) {
  const SystemConfig c = desk_config();
  Instance in = random_instance(c, 2);
  for (auto& w : in.solution.w) w.setZero();
  in.solution.v.setZero();
  std::fill(in.solution.p.begin(), in.solution.p.end(), 0.0);
  for (auto si : {SiCovariance::kAggregate, SiCovariance::kPerStream}) {
    const CMat a = interference_matrix(in.channels, in.solution.w, in.solution.v, in.solution.p, 1, c, si);
    EXPECT_EQ(a, CMat(c.noise_ul * CMat::Identity(c.num_rx, c.num_rx)));
  }
}

TEST(InterferenceMatrix, HermitianPositiveDefinite) {
  const SystemConfig c = desk_config();
  const Instance in = random_instance(c, 3);
  const CMat a = interference_matrix(in.channels, in.solution.w, in.solution.v, in.solution.p, 0, c);
  EXPECT_LE((a - a.adjoint()).norm(), 1e-14 * a.norm());
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(OptimalReceiver, WhiteInterferenceGivesMrc) {
  SystemConfig c = desk_config();
  c.k_ul = 1;
  c.si_loss = 0.0;
  const Instance in = random_instance(c, 4);
  const CVec b = optimal_receiver(in.channels, in.solution.w, in.solution.v, in.solution.p, 0, c);
  EXPECT_NEAR(b.norm(), 1.0, 1e-14);
  EXPECT_NEAR(parallel(b, in.channels.h_ub[0]), 1.0, 1e-12);
}

TEST(OptimalReceiver, BeatsRandomCombiners) {
  const SystemConfig c = desk_config();
  Rng rng(5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance in = random_instance(c, seed);
    const auto& s = in.solution;
    for (int k = 0; k < c.k_ul; ++k) {
      const CMat a = interference_matrix(in.channels, s.w, s.v, s.p, k, c);
      const CVec b = optimal_receiver(in.channels, s.w, s.v, s.p, k, c);
      const double best = rayleigh(b, in.channels.h_ub[k], a);
      for (int t = 0; t < 200; ++t)
        EXPECT_LE(rayleigh(random_cvec(c.num_rx, 1.0, rng), in.channels.h_ub[k], a), best * (1 + 1e-12));
    }
  }
}

TEST(ZfReceiver, SingleUserIsMrc) {
  SystemConfig c = desk_config();
  c.k_ul = 1;
  const Instance in = random_instance(c, 6);
  EXPECT_NEAR(parallel(zf_receiver(in.channels, 0), in.channels.h_ub[0]), 1.0, 1e-12);
}

TEST(ZfReceiver, OrthogonalChannels) {
  ChannelSet ch;
  ch.h_si = CMat::Zero(3, 1);
  ch.h_ub = {(CVec(3) << 1, cd(0, 1), 0).finished(), (CVec(3) << cd(0, 1), 1, 0).finished()};
  for (int k = 0; k < 2; ++k) EXPECT_NEAR(parallel(zf_receiver(ch, k), ch.h_ub[k]), 1.0, 1e-14);
}

TEST(ZfReceiver, NullsOtherUsers) {
  const Instance in = random_instance(desk_config(), 7);
  for (int k = 0; k < in.channels.k_ul(); ++k) {
    const CVec b = zf_receiver(in.channels, k);
    EXPECT_NEAR(b.norm(), 1.0, 1e-14);
    for (int i = 0; i < in.channels.k_ul(); ++i)
      if (i != k) EXPECT_LE(std::abs(b.dot(in.channels.h_ub[i])), 1e-10 * in.channels.h_ub[i].norm());
  }
}

TEST(ZfReceiver, RankDeficientThrows) {
  ChannelSet ch;
  ch.h_si = CMat::Zero(2, 1);
  const CVec h = (CVec(2) << 1, 2).finished();
  ch.h_ub = {h, cd(0, 3) * h};
  EXPECT_THROW(zf_receiver(ch, 0), SolverError);
  ch.h_si = CMat::Zero(1, 1);
  ch.h_ub = {CVec::Ones(1), CVec::Ones(1)};
  EXPECT_THROW(zf_receiver(ch, 0), SolverError);
}

TEST(MrcReceiver, ZeroChannelGivesFirstAxis) {
  const CVec b = mrc_receiver(CVec::Zero(3));
  EXPECT_EQ(b, (CVec(3) << 1, 0, 0).finished());
}
