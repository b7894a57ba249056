#include "masec/objective.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace masec {

namespace {

// Sum_e a_e prod_{i != e} d_i.
double cross_product_sum(const std::vector<double>& a, const std::vector<double>& d) {
  double total = 0.0;
  for (size_t e = 0; e < d.size(); ++e) {
    double term = a[e];
    for (size_t i = 0; i < d.size(); ++i)
      if (i != e) term *= d[i];
    total += term;
  }
  return total;
}

double product(const std::vector<double>& d) {
  double p = 1.0;
  for (double x : d) p *= x;
  return p;
}

}  // namespace

std::vector<double> eve_denominators(const ObjectiveContext& ctx) {
  std::vector<double> d(ctx.k_eve());
  for (int e = 0; e < ctx.k_eve(); ++e) d[e] = quad_form(ctx.h_be[e], ctx.point.V) + ctx.noise_eve;
  return d;
}

double ul_power_sum(const ObjectiveContext& ctx, int k, bool include_self) {
  double total = 0.0;
  for (int i = 0; i < ctx.k_ul(); ++i)
    if (include_self || i != k) total += ctx.ub_gain(k, i) * ctx.point.p[i];
  for (const auto& w : ctx.point.W) total += quad_form(ctx.si_eff[k], w);
  total += quad_form(ctx.si_eff[k], ctx.point.V);
  return total + ctx.b_norm2[k] * ctx.noise_ul;
}

double dl_power_sum(const ObjectiveContext& ctx, int k, bool include_self) {
  double total = 0.0;
  for (int i = 0; i < ctx.k_dl(); ++i)
    if (include_self || i != k) total += quad_form(ctx.h_bd[k], ctx.point.W[i]);
  total += quad_form(ctx.h_bd[k], ctx.point.V);
  for (int u = 0; u < ctx.k_ul(); ++u) total += ctx.ud_gain(u, k) * ctx.point.p[u];
  return total + ctx.noise_dl;
}

namespace {

void check_dims(const ChannelSet& ch, const std::vector<CVec>& b, const ScaPoint& pt) {
  if (static_cast<int>(b.size()) != ch.k_ul() || static_cast<int>(pt.p.size()) != ch.k_ul())
    throw DimensionError("receive beamformers / UL powers do not match K_U");
  if (static_cast<int>(pt.W.size()) != ch.k_dl()) throw DimensionError("W count does not match K_D");
  for (const auto& bk : b)
    if (bk.size() != ch.num_rx()) throw DimensionError("receive beamformer length mismatch");
  for (const auto& w : pt.W)
    if (w.rows() != ch.num_tx() || w.cols() != ch.num_tx()) throw DimensionError("W size mismatch");
  if (pt.V.rows() != ch.num_tx() || pt.V.cols() != ch.num_tx()) throw DimensionError("V size mismatch");
}

}  // namespace

double TxSolution::transmit_power() const {
  double total = v.squaredNorm();
  for (const auto& wk : w) total += wk.squaredNorm();
  return total;
}

double ScaPoint::total_trace() const {
  double total = V.trace().real();
  for (const auto& wk : W) total += wk.trace().real();
  return total;
}

ScaPoint covariance_of(const TxSolution& s) {
  ScaPoint pt;
  pt.W.reserve(s.w.size());
  for (const auto& wk : s.w) pt.W.push_back(wk * wk.adjoint());
  pt.V = s.v * s.v.adjoint();
  pt.p = s.p;
  return pt;
}

double quad_form(const CVec& h, const CMat& x) { return h.dot(x * h).real(); }

ObjectiveContext build_context(const ChannelSet& ch, const TxSolution& s, const SystemConfig& config) {
  for (const auto& wk : s.w)
    if (wk.size() != ch.num_tx()) throw DimensionError("transmit beamformer length mismatch");
  if (s.v.size() != ch.num_tx()) throw DimensionError("AN vector length mismatch");
  return build_context(ch, s.b, covariance_of(s), config);
}

ObjectiveContext build_context(const ChannelSet& ch, const std::vector<CVec>& b, const ScaPoint& pt,
                               const SystemConfig& config) {
  check_dims(ch, b, pt);
  ObjectiveContext ctx;
  const int ku = ch.k_ul();
  ctx.num_tx = ch.num_tx();
  ctx.ub_gain.resize(ku, ku);
  ctx.b_norm2.resize(ku);
  ctx.si_eff.reserve(ku);
  const double root_rho = std::sqrt(config.si_loss);
  for (int k = 0; k < ku; ++k) {
    for (int i = 0; i < ku; ++i) ctx.ub_gain(k, i) = std::norm(b[k].dot(ch.h_ub[i]));
    ctx.si_eff.push_back(root_rho * (ch.h_si.adjoint() * b[k]));
    ctx.b_norm2[k] = b[k].squaredNorm();
  }
  ctx.h_bd = ch.h_bd;
  ctx.h_be = ch.h_be;
  ctx.ud_gain = ch.h_ud.cwiseAbs2();
  ctx.ue_gain = ch.h_ue.cwiseAbs2();
  ctx.noise_ul = config.noise_ul;
  ctx.noise_dl = config.noise_dl;
  ctx.noise_eve = config.noise_eve;
  ctx.point = pt;
  return ctx;
}

double sinr_ul(const ObjectiveContext& ctx, int k) {
  return ctx.ub_gain(k, k) * ctx.point.p[k] / ul_power_sum(ctx, k, false);
}

double sinr_dl(const ObjectiveContext& ctx, int k) {
  return quad_form(ctx.h_bd[k], ctx.point.W[k]) / dl_power_sum(ctx, k, false);
}

double sinr_eve_ul(const ObjectiveContext& ctx, int k) {
  if (ctx.k_eve() == 0) return 0.0;
  const auto d = eve_denominators(ctx);
  std::vector<double> a(ctx.k_eve());
  for (int e = 0; e < ctx.k_eve(); ++e) a[e] = ctx.ue_gain(k, e) * ctx.point.p[k];
  return cross_product_sum(a, d) / product(d);
}

double sinr_eve_dl(const ObjectiveContext& ctx, int k) {
  if (ctx.k_eve() == 0) return 0.0;
  const auto d = eve_denominators(ctx);
  std::vector<double> a(ctx.k_eve());
  for (int e = 0; e < ctx.k_eve(); ++e) a[e] = quad_form(ctx.h_be[e], ctx.point.W[k]);
  return cross_product_sum(a, d) / product(d);
}

double SsrBreakdown::ul_total() const {
  double t = 0.0;
  for (const auto& s : ul) t += s.secrecy;
  return t;
}

double SsrBreakdown::dl_total() const {
  double t = 0.0;
  for (const auto& s : dl) t += s.secrecy;
  return t;
}

double SsrBreakdown::unclamped() const {
  double t = 0.0;
  for (const auto& s : ul) t += s.rate - s.eve_rate;
  for (const auto& s : dl) t += s.rate - s.eve_rate;
  return t;
}

SsrBreakdown ssr(const ObjectiveContext& ctx) {
  SsrBreakdown out;
  auto term = [](double gamma, double gamma_eve) {
    SecrecyTerm t;
    t.rate = std::log2(1.0 + gamma);
    t.eve_rate = std::log2(1.0 + gamma_eve);
    t.secrecy = std::max(t.rate - t.eve_rate, 0.0);
    return t;
  };
  for (int k = 0; k < ctx.k_ul(); ++k) out.ul.push_back(term(sinr_ul(ctx, k), sinr_eve_ul(ctx, k)));
  for (int k = 0; k < ctx.k_dl(); ++k) out.dl.push_back(term(sinr_dl(ctx, k), sinr_eve_dl(ctx, k)));
  out.total = out.ul_total() + out.dl_total();
  return out;
}

double ssr_value(const ChannelSet& channels, const TxSolution& solution, const SystemConfig& config) {
  return ssr(build_context(channels, solution, config)).total;
}

double f_value(const ObjectiveContext& ctx) {
  double f = 0.0;
  for (int k = 0; k < ctx.k_dl(); ++k) f += std::log2(dl_power_sum(ctx, k, true));
  for (int k = 0; k < ctx.k_ul(); ++k) f += std::log2(ul_power_sum(ctx, k, true));
  const auto d = eve_denominators(ctx);
  f += (ctx.k_dl() + ctx.k_ul()) * std::log2(product(d));
  return f;
}

double g_value(const ObjectiveContext& ctx) {
  double g = 0.0;
  const auto d = eve_denominators(ctx);
  const double pd = product(d);
  std::vector<double> a(ctx.k_eve());
  for (int k = 0; k < ctx.k_dl(); ++k) {
    g += std::log2(dl_power_sum(ctx, k, false));
    for (int e = 0; e < ctx.k_eve(); ++e) a[e] = quad_form(ctx.h_be[e], ctx.point.W[k]);
    g += std::log2(pd + cross_product_sum(a, d));
  }
  for (int k = 0; k < ctx.k_ul(); ++k) {
    g += std::log2(ul_power_sum(ctx, k, false));
    for (int e = 0; e < ctx.k_eve(); ++e) a[e] = ctx.ue_gain(k, e) * ctx.point.p[k];
    g += std::log2(pd + cross_product_sum(a, d));
  }
  return g;
}

void write_ssr_csv(std::ostream& out, const SsrBreakdown& b) {
  const auto old = out.precision(17);
  out << "direction,user,rate,eve_rate,secrecy\n";
  auto row = [&](const char* dir, size_t k, const SecrecyTerm& t) {
    out << dir << ',' << k << ',' << t.rate << ',' << t.eve_rate << ',' << t.secrecy << '\n';
  };
  for (size_t k = 0; k < b.ul.size(); ++k) row("UL", k, b.ul[k]);
  for (size_t k = 0; k < b.dl.size(); ++k) row("DL", k, b.dl[k]);
  out.precision(old);
}

}  // namespace masec
