#include <gtest/gtest.h>

#include <sstream>

#include "masec/objective.hpp"
#include "support.hpp"

using namespace masec;
using namespace masec::test;

namespace {

// Quotient-form SINRs straight from the channels.
double oracle_ul(const ChannelSet& ch, const TxSolution& s, const SystemConfig& c, int k) {
  const CVec& b = s.b[k];
  double interf = b.squaredNorm() * c.noise_ul;
  for (int i = 0; i < ch.k_ul(); ++i)
    if (i != k) interf += std::norm(b.dot(ch.h_ub[i])) * s.p[i];
  const CVec si = ch.h_si.adjoint() * b;
  for (const auto& w : s.w) interf += c.si_loss * std::norm(si.dot(w));
  interf += c.si_loss * std::norm(si.dot(s.v));
  return std::norm(b.dot(ch.h_ub[k])) * s.p[k] / interf;
}

double oracle_dl(const ChannelSet& ch, const TxSolution& s, const SystemConfig& c, int k) {
  double interf = c.noise_dl + std::norm(ch.h_bd[k].dot(s.v));
  for (int i = 0; i < ch.k_dl(); ++i)
    if (i != k) interf += std::norm(ch.h_bd[k].dot(s.w[i]));
  for (int u = 0; u < ch.k_ul(); ++u) interf += std::norm(ch.h_ud(u, k)) * s.p[u];
  return std::norm(ch.h_bd[k].dot(s.w[k])) / interf;
}

double oracle_eve_dl(const ChannelSet& ch, const TxSolution& s, const SystemConfig& c, int k) {
  double sum = 0;
  for (int e = 0; e < ch.k_eve(); ++e)
    sum += std::norm(ch.h_be[e].dot(s.w[k])) / (std::norm(ch.h_be[e].dot(s.v)) + c.noise_eve);
  return sum;
}

double oracle_eve_ul(const ChannelSet& ch, const TxSolution& s, const SystemConfig& c, int k) {
  double sum = 0;
  for (int e = 0; e < ch.k_eve(); ++e)
    sum += std::norm(ch.h_ue(k, e)) * s.p[k] / (std::norm(ch.h_be[e].dot(s.v)) + c.noise_eve);
  return sum;
}

SystemConfig unit_noise() {
  SystemConfig c = desk_config();
  c.noise_ul = c.noise_dl = c.noise_eve = 1.0;
  c.si_loss = 0.0;
  return c;
}

}  // namespace

TEST(BuildContext, ZeroAnGivesZeroV) {
  Instance in = random_instance(desk_config(), 1);
  in.solution.v.setZero();
  const ObjectiveContext ctx = build_context(in.channels, in.solution, in.config);
  EXPECT_EQ(ctx.point.V.norm(), 0.0);
}

TEST(BuildContext, NoResidualSi) {
  SystemConfig c = desk_config();
  c.si_loss = 0.0;
  const Instance in = random_instance(c, 2);
  const ObjectiveContext ctx = build_context(in.channels, in.solution, c);
  for (const auto& s : ctx.si_eff) EXPECT_EQ(s.norm(), 0.0);
}

TEST(BuildContext, TraceEqualsQuadraticForm) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance in = random_instance(desk_config(), seed);
    const ObjectiveContext ctx = build_context(in.channels, in.solution, in.config);
    for (int k = 0; k < ctx.k_dl(); ++k) {
      const double tr = (ctx.point.W[k] * ctx.bd_cov(k)).trace().real();
      EXPECT_LE(rel(tr, std::norm(in.channels.h_bd[k].dot(in.solution.w[k]))), 1e-12);
    }
  }
}

TEST(BuildContext, DimensionMismatch) {
  Instance in = random_instance(desk_config(), 3);
  in.solution.w.pop_back();
  EXPECT_THROW(build_context(in.channels, in.solution, in.config), DimensionError);
}

TEST(SinrUl, MatchedFilterSingleUser) {
  const SystemConfig c = unit_noise();
  ChannelSet ch;
  ch.h_si = CMat::Zero(2, 2);
  ch.h_ub = {(CVec(2) << cd(1, 0), cd(0, 1)).finished()};
  ch.h_ud = CMat::Zero(1, 0);
  ch.h_ue = CMat::Zero(1, 0);
  TxSolution s;
  s.v = CVec::Zero(2);
  s.p = {1.0};
  s.b = {ch.h_ub[0].normalized()};
  const ObjectiveContext ctx = build_context(ch, s, c);
  EXPECT_NEAR(sinr_ul(ctx, 0), 2.0, 1e-14);
  s.p = {0.0};
  EXPECT_EQ(sinr_ul(build_context(ch, s, c), 0), 0.0);
}

TEST(SinrDl, SingleUserArithmetic) {
  const SystemConfig c = unit_noise();
  ChannelSet ch;
  ch.h_si = CMat::Zero(2, 2);
  ch.h_bd = {(CVec(2) << 1, 0).finished()};
  ch.h_ud = CMat::Zero(0, 1);
  ch.h_ue = CMat::Zero(0, 0);
  TxSolution s;
  s.w = {(CVec(2) << 2, 0).finished()};
  s.v = CVec::Zero(2);
  EXPECT_NEAR(sinr_dl(build_context(ch, s, c), 0), 4.0, 1e-14);
  s.w[0].setZero();
  EXPECT_EQ(sinr_dl(build_context(ch, s, c), 0), 0.0);
}

TEST(SinrEve, NoEvesGiveZeroAndSsrIsSumRate) {
  SystemConfig c = desk_config();
  c.k_eve = 0;
  const Instance in = random_instance(c, 4);
  const ObjectiveContext ctx = build_context(in.channels, in.solution, c);
  double sum = 0;
  for (int k = 0; k < ctx.k_ul(); ++k) {
    EXPECT_EQ(sinr_eve_ul(ctx, k), 0.0);
    sum += std::log2(1 + sinr_ul(ctx, k));
  }
  for (int k = 0; k < ctx.k_dl(); ++k) {
    EXPECT_EQ(sinr_eve_dl(ctx, k), 0.0);
    sum += std::log2(1 + sinr_dl(ctx, k));
  }
  EXPECT_LE(rel(ssr(ctx).total, sum), 1e-14);
}

TEST(SinrEve, SingleEveNoAn) {
  const SystemConfig c = unit_noise();
  ChannelSet ch;
  ch.h_si = CMat::Zero(2, 2);
  ch.h_bd = {(CVec(2) << 1, 0).finished()};
  ch.h_be = {(CVec(2) << cd(0.5, 0.5), cd(-1, 0.2)).finished()};
  ch.h_ud = CMat::Zero(0, 1);
  ch.h_ue = CMat::Zero(0, 1);
  TxSolution s;
  s.w = {(CVec(2) << cd(1, -1), cd(0.3, 2)).finished()};
  s.v = CVec::Zero(2);
  EXPECT_NEAR(sinr_eve_dl(build_context(ch, s, c), 0), std::norm(ch.h_be[0].dot(s.w[0])), 1e-13);
}

TEST(Sinr, TraceFormsMatchQuotientForms) {
  SystemConfig c = desk_config();
  c.k_eve = 3;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance in = random_instance(c, seed);
    const ObjectiveContext ctx = build_context(in.channels, in.solution, c);
    for (int k = 0; k < ctx.k_ul(); ++k) {
      EXPECT_LE(rel(sinr_ul(ctx, k), oracle_ul(in.channels, in.solution, c, k)), 1e-10);
      EXPECT_LE(rel(sinr_eve_ul(ctx, k), oracle_eve_ul(in.channels, in.solution, c, k)), 1e-10);
    }
    for (int k = 0; k < ctx.k_dl(); ++k) {
      EXPECT_LE(rel(sinr_dl(ctx, k), oracle_dl(in.channels, in.solution, c, k)), 1e-10);
      EXPECT_LE(rel(sinr_eve_dl(ctx, k), oracle_eve_dl(in.channels, in.solution, c, k)), 1e-10);
    }
  }
}

TEST(Ssr, FormulaOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance in = random_instance(desk_config(), seed);
    const auto& ch = in.channels;
    const auto& s = in.solution;
    double ref = 0;
    for (int k = 0; k < ch.k_ul(); ++k)
      ref += std::max(0.0, std::log2(1 + oracle_ul(ch, s, in.config, k)) -
                               std::log2(1 + oracle_eve_ul(ch, s, in.config, k)));
    for (int k = 0; k < ch.k_dl(); ++k)
      ref += std::max(0.0, std::log2(1 + oracle_dl(ch, s, in.config, k)) -
                               std::log2(1 + oracle_eve_dl(ch, s, in.config, k)));
    const SsrBreakdown b = ssr(build_context(ch, s, in.config));
    EXPECT_NEAR(b.total, ref, 1e-10 * std::max(1.0, ref));
    for (const auto& t : b.ul) EXPECT_GE(t.secrecy, 0.0);
    for (const auto& t : b.dl) EXPECT_GE(t.secrecy, 0.0);
  }
}

TEST(Ssr, ClampsWhenEvesDominate) {
  Instance in = random_instance(desk_config(), 5);
  for (auto& h : in.channels.h_be) h *= 1e4;
  in.channels.h_ue *= 1e4;
  for (auto& h : in.channels.h_bd) h *= 1e-4;
  for (auto& h : in.channels.h_ub) h *= 1e-4;
  in.solution.v.setZero();
  EXPECT_EQ(ssr(build_context(in.channels, in.solution, in.config)).total, 0.0);
}

TEST(Ssr, GlobalPhaseInvariance) {
  const Instance in = random_instance(desk_config(), 6);
  TxSolution r = in.solution;
  r.w[0] *= std::polar(1.0, 0.7);
  r.v *= std::polar(1.0, -2.1);
  r.b[1] *= std::polar(1.0, 1.3);
  EXPECT_LE(rel(ssr_value(in.channels, in.solution, in.config), ssr_value(in.channels, r, in.config)), 1e-12);
}

TEST(FG, DifferenceIsUnclampedSsr) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance in = random_instance(desk_config(), seed);
    const ObjectiveContext ctx = build_context(in.channels, in.solution, in.config);
    EXPECT_NEAR(f_value(ctx) - g_value(ctx), ssr(ctx).unclamped(), 1e-10 * std::max(1.0, std::abs(f_value(ctx))));
  }
}

TEST(FG, ConsistentUnderRescaling) {
  SystemConfig c = desk_config();
  c.k_eve = 1;
  Instance in = random_instance(c, 7);
  const ObjectiveContext a = build_context(in.channels, in.solution, c);
  for (auto& h : in.channels.h_bd) h *= 3.0;
  for (auto& h : in.channels.h_be) h *= 3.0;
  for (auto& h : in.channels.h_ub) h *= 3.0;
  in.channels.h_ue *= 3.0;
  const ObjectiveContext b = build_context(in.channels, in.solution, c);
  EXPECT_GT(std::abs(f_value(a) - f_value(b)), 1e-6);
  EXPECT_NEAR(f_value(b) - g_value(b), ssr(b).unclamped(), 1e-9);
}

TEST(FG, ZeroEveChannelClosedForm) {
  SystemConfig c = unit_noise();
  c.noise_eve = 0.25;
  ChannelSet ch;
  ch.h_si = CMat::Zero(1, 1);
  ch.h_bd = {CVec::Constant(1, cd(1.5, 0))};
  ch.h_be = {CVec::Zero(1)};
  ch.h_ud = CMat::Zero(0, 1);
  ch.h_ue = CMat::Zero(0, 1);
  TxSolution s;
  s.w = {CVec::Constant(1, cd(2, 0))};
  s.v = CVec::Zero(1);
  const ObjectiveContext ctx = build_context(ch, s, c);
  // f = log2(|hw|^2 + 1) + log2(sigma_E^2), g = log2(1) + log2(sigma_E^2)
  EXPECT_NEAR(f_value(ctx), std::log2(9.0 + 1.0) + std::log2(0.25), 1e-14);
  EXPECT_NEAR(g_value(ctx), std::log2(0.25), 1e-14);
}

TEST(FG, ConcaveAlongSegments) {
  const SystemConfig c = desk_config();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance in = random_instance(c, seed);
    Rng rng(100 + seed);
    const TxSolution s2 = random_solution(in.channels, c, rng);
    const ScaPoint a = covariance_of(in.solution), b = covariance_of(s2);
    ScaPoint m = a;
    for (size_t k = 0; k < a.W.size(); ++k) m.W[k] = 0.5 * (a.W[k] + b.W[k]);
    m.V = 0.5 * (a.V + b.V);
    for (size_t k = 0; k < a.p.size(); ++k) m.p[k] = 0.5 * (a.p[k] + b.p[k]);
    const auto& bs = in.solution.b;
    const auto ca = build_context(in.channels, bs, a, c), cb = build_context(in.channels, bs, b, c),
               cm = build_context(in.channels, bs, m, c);
    EXPECT_GE(f_value(cm), 0.5 * (f_value(ca) + f_value(cb)) - 1e-9);
    EXPECT_GE(g_value(cm), 0.5 * (g_value(ca) + g_value(cb)) - 1e-9);
  }
}

TEST(Ssr, CsvRows) {
  const Instance in = random_instance(desk_config(), 8);
  std::ostringstream out;
  write_ssr_csv(out, ssr(build_context(in.channels, in.solution, in.config)));
  std::string line;
  std::istringstream lines(out.str());
  std::getline(lines, line);
  EXPECT_EQ(line, "direction,user,rate,eve_rate,secrecy");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, in.config.k_ul + in.config.k_dl);
}
