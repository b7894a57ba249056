#include "masec/sca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace masec {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

GradientBundle zero_bundle(int nt, int kd, int ku) {
  GradientBundle g;
  g.dW.assign(kd, CMat::Zero(nt, nt));
  g.dV = CMat::Zero(nt, nt);
  g.dp.assign(ku, 0.0);
  return g;
}

double inner(const CMat& a, const CMat& b) {
  return (a.array().conjugate() * b.array()).real().sum();
}

// <G, x - y> in the real trace inner product.
double inner_diff(const GradientBundle& g, const ScaPoint& x, const ScaPoint& y) {
  double s = inner(g.dV, x.V - y.V);
  for (size_t k = 0; k < g.dW.size(); ++k) s += inner(g.dW[k], x.W[k] - y.W[k]);
  for (size_t u = 0; u < g.dp.size(); ++u) s += g.dp[u] * (x.p[u] - y.p[u]);
  return s;
}

double inner_grad_diff(const GradientBundle& a, const GradientBundle& b, const ScaPoint& x,
                       const ScaPoint& y) {
  double s = inner(a.dV - b.dV, x.V - y.V);
  for (size_t k = 0; k < a.dW.size(); ++k) s += inner(a.dW[k] - b.dW[k], x.W[k] - y.W[k]);
  for (size_t u = 0; u < a.dp.size(); ++u) s += (a.dp[u] - b.dp[u]) * (x.p[u] - y.p[u]);
  return s;
}

// Squared distance in coordinates normalized by the power budgets.
double scaled_dist2(const ScaPoint& x, const ScaPoint& y, double pd, double pu) {
  double s = (x.V - y.V).squaredNorm();
  for (size_t k = 0; k < x.W.size(); ++k) s += (x.W[k] - y.W[k]).squaredNorm();
  s /= pd * pd;
  double sp = 0.0;
  for (size_t u = 0; u < x.p.size(); ++u) sp += (x.p[u] - y.p[u]) * (x.p[u] - y.p[u]);
  return s + sp / (pu * pu);
}

double scaled_grad_norm(const GradientBundle& g, double pd, double pu) {
  double s = g.dV.squaredNorm();
  for (const auto& d : g.dW) s += d.squaredNorm();
  s *= pd * pd;
  double sp = 0.0;
  for (double d : g.dp) sp += d * d;
  return std::sqrt(s + sp * pu * pu);
}

GradientBundle subtract(GradientBundle a, const GradientBundle& b) {
  for (size_t k = 0; k < a.dW.size(); ++k) a.dW[k] -= b.dW[k];
  a.dV -= b.dV;
  for (size_t u = 0; u < a.dp.size(); ++u) a.dp[u] -= b.dp[u];
  return a;
}

CMat hermitian_part(const CMat& m) { return (m + m.adjoint()) / 2.0; }

// Threshold theta >= 0 so that sum max(l - theta, 0) <= cap, with equality
// whenever theta > 0.
double capped_simplex_threshold(std::vector<double> lambda, double cap) {
  double positive = 0.0;
  for (double l : lambda) positive += std::max(l, 0.0);
  if (positive <= cap) return 0.0;
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (size_t i = 0; i < lambda.size(); ++i) {
    cumulative += lambda[i];
    const double t = (cumulative - cap) / static_cast<double>(i + 1);
    if (i + 1 == lambda.size() || lambda[i + 1] <= t) {
      theta = t;
      break;
    }
  }
  return std::max(theta, 0.0);
}

std::vector<double> clamp_powers(const std::vector<double>& p, double pmax) {
  std::vector<double> out(p.size());
  for (size_t u = 0; u < p.size(); ++u) out[u] = std::clamp(p[u], 0.0, pmax);
  return out;
}

double relaxed_value(const ObjectiveContext& ctx, const ScaPoint& base, double base_g,
                     const GradientBundle& gg) {
  return f_value(ctx) - g_tilde(ctx.point, base, base_g, gg);
}

}  // namespace

GradientBundle grad_g(const ObjectiveContext& ctx) {
  const int kd = ctx.k_dl(), ku = ctx.k_ul(), ke = ctx.k_eve();
  GradientBundle out = zero_bundle(ctx.num_tx, kd, ku);
  const auto d = eve_denominators(ctx);
  std::vector<CMat> hbe(ke);
  for (int e = 0; e < ke; ++e) hbe[e] = ctx.be_cov(e);
  std::vector<double> a(ke);

  auto eve_chain = [&](double& scale_sum, CMat& dv, const std::vector<double>& a_e,
                       std::vector<double>& d_a) {
    double s = 1.0;
    for (int e = 0; e < ke; ++e) s += a_e[e] / d[e];
    for (int e = 0; e < ke; ++e) {
      d_a[e] = 1.0 / (kLn2 * d[e] * s);
      dv += (1.0 - (a_e[e] / d[e]) / s) / (kLn2 * d[e]) * hbe[e];
    }
    scale_sum = s;
  };

  std::vector<double> d_a(ke);
  for (int k = 0; k < kd; ++k) {
    const CMat hbd = ctx.bd_cov(k);
    const double c = 1.0 / (kLn2 * dl_power_sum(ctx, k, false));
    for (int i = 0; i < kd; ++i)
      if (i != k) out.dW[i] += c * hbd;
    out.dV += c * hbd;
    for (int u = 0; u < ku; ++u) out.dp[u] += c * ctx.ud_gain(u, k);

    for (int e = 0; e < ke; ++e) a[e] = quad_form(ctx.h_be[e], ctx.point.W[k]);
    double s = 0.0;
    eve_chain(s, out.dV, a, d_a);
    for (int e = 0; e < ke; ++e) out.dW[k] += d_a[e] * hbe[e];
  }
  for (int k = 0; k < ku; ++k) {
    const CMat hsi = ctx.si_cov(k);
    const double c = 1.0 / (kLn2 * ul_power_sum(ctx, k, false));
    for (int i = 0; i < ku; ++i)
      if (i != k) out.dp[i] += c * ctx.ub_gain(k, i);
    for (int i = 0; i < kd; ++i) out.dW[i] += c * hsi;
    out.dV += c * hsi;

    for (int e = 0; e < ke; ++e) a[e] = ctx.ue_gain(k, e) * ctx.point.p[k];
    double s = 0.0;
    eve_chain(s, out.dV, a, d_a);
    for (int e = 0; e < ke; ++e) out.dp[k] += d_a[e] * ctx.ue_gain(k, e);
  }
  return out;
}

GradientBundle grad_g(const ScaPoint& point, const ChannelSet& channels, const std::vector<CVec>& b,
                      const SystemConfig& config) {
  return grad_g(build_context(channels, b, point, config));
}

GradientBundle grad_f(const ObjectiveContext& ctx) {
  const int kd = ctx.k_dl(), ku = ctx.k_ul(), ke = ctx.k_eve();
  GradientBundle out = zero_bundle(ctx.num_tx, kd, ku);
  for (int k = 0; k < kd; ++k) {
    const CMat hbd = ctx.bd_cov(k);
    const double c = 1.0 / (kLn2 * dl_power_sum(ctx, k, true));
    for (int i = 0; i < kd; ++i) out.dW[i] += c * hbd;
    out.dV += c * hbd;
    for (int u = 0; u < ku; ++u) out.dp[u] += c * ctx.ud_gain(u, k);
  }
  for (int k = 0; k < ku; ++k) {
    const CMat hsi = ctx.si_cov(k);
    const double c = 1.0 / (kLn2 * ul_power_sum(ctx, k, true));
    for (int i = 0; i < ku; ++i) out.dp[i] += c * ctx.ub_gain(k, i);
    for (int i = 0; i < kd; ++i) out.dW[i] += c * hsi;
    out.dV += c * hsi;
  }
  const auto d = eve_denominators(ctx);
  for (int e = 0; e < ke; ++e) out.dV += (kd + ku) / (kLn2 * d[e]) * ctx.be_cov(e);
  return out;
}

double g_tilde(const ScaPoint& point, const ScaPoint& base, double base_value,
               const GradientBundle& grads) {
  return base_value + inner_diff(grads, point, base);
}

ScaPoint project_feasible(const std::vector<CMat>& W, const CMat& V, const std::vector<double>& p,
                          const SystemConfig& config) {
  auto clip = [](const CMat& m) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(m));
    const RVec lam = es.eigenvalues().cwiseMax(0.0);
    return CMat(es.eigenvectors() * lam.cast<cd>().asDiagonal() * es.eigenvectors().adjoint());
  };
  ScaPoint out;
  for (const auto& w : W) out.W.push_back(clip(w));
  out.V = clip(V);
  const double total = out.total_trace();
  if (total > config.p_max_dl) {
    const double scale = config.p_max_dl / total;
    for (auto& w : out.W) w *= scale;
    out.V *= scale;
  }
  out.p = clamp_powers(p, config.p_max_ul);
  return out;
}

ScaPoint project_feasible_exact(const std::vector<CMat>& W, const CMat& V,
                                const std::vector<double>& p, const SystemConfig& config,
                                const ScaOptions& options) {
  std::vector<Eigen::SelfAdjointEigenSolver<CMat>> solvers;
  solvers.reserve(W.size() + 1);
  for (const auto& w : W) solvers.emplace_back(hermitian_part(w));
  if (options.allow_an) solvers.emplace_back(hermitian_part(V));
  std::vector<double> all;
  for (const auto& es : solvers)
    for (int i = 0; i < es.eigenvalues().size(); ++i) all.push_back(es.eigenvalues()[i]);
  const double theta = capped_simplex_threshold(all, config.p_max_dl);
  auto rebuild = [theta](const Eigen::SelfAdjointEigenSolver<CMat>& es) {
    const RVec lam = (es.eigenvalues().array() - theta).cwiseMax(0.0).matrix();
    return CMat(es.eigenvectors() * lam.cast<cd>().asDiagonal() * es.eigenvectors().adjoint());
  };
  ScaPoint out;
  for (size_t k = 0; k < W.size(); ++k) out.W.push_back(rebuild(solvers[k]));
  out.V = options.allow_an ? rebuild(solvers.back()) : CMat::Zero(V.rows(), V.cols());
  out.p = clamp_powers(p, config.p_max_ul);
  return out;
}

RelaxedSolution solve_relaxed_subproblem(const ScaPoint& base, const ObjectiveContext& ctx,
                                         const SystemConfig& config, const ScaOptions& options) {
  const double pd = config.p_max_dl;
  const double pu = config.p_max_ul;
  const ScaParams& prm = config.sca;

  ObjectiveContext work = ctx;
  work.point = base;
  const double base_g = g_value(work);
  const GradientBundle gg = grad_g(work);
  const double base_value = f_value(work) - base_g;

  auto step = [&](const ScaPoint& x, const GradientBundle& g, double s) {
    std::vector<CMat> w(x.W.size());
    for (size_t k = 0; k < w.size(); ++k) w[k] = x.W[k] + (s * pd * pd) * g.dW[k];
    const CMat v = x.V + (s * pd * pd) * g.dV;
    std::vector<double> p(x.p.size());
    for (size_t u = 0; u < p.size(); ++u) p[u] = x.p[u] + s * pu * pu * g.dp[u];
    return project_feasible_exact(w, v, p, config, options);
  };

  work.point = project_feasible_exact(base.W, base.V, base.p, config, options);
  double fx = relaxed_value(work, base, base_g, gg);
  GradientBundle gx = subtract(grad_f(work), gg);
  ScaPoint x = work.point;

  RelaxedSolution out;
  const double gnorm = scaled_grad_norm(gx, pd, pu);
  double s = gnorm > 0.0 ? 1.0 / gnorm : 1.0;
  int it = 0;
  for (; it < prm.inner_max_iterations; ++it) {
    ScaPoint y;
    double fy = 0.0;
    double dist2 = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      y = step(x, gx, s);
      dist2 = scaled_dist2(y, x, pd, pu);
      if (dist2 == 0.0) break;
      work.point = y;
      fy = relaxed_value(work, base, base_g, gg);
      const double slack = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fx));
      if (fy >= fx + inner_diff(gx, y, x) - dist2 / (2.0 * s) - slack) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) {
      out.converged = dist2 == 0.0 || std::sqrt(dist2) / s < prm.inner_tolerance;
      break;
    }
    const bool stationary = std::sqrt(dist2) / s < prm.inner_tolerance;
    GradientBundle gy = subtract(grad_f(work), gg);
    const double curvature = -inner_grad_diff(gy, gx, y, x);
    if (fy >= fx) {
      x = std::move(y);
      fx = fy;
    }
    gx = std::move(gy);
    if (stationary) {
      out.converged = true;
      ++it;
      break;
    }
    s = curvature > 0.0 ? dist2 / curvature : 2.0 * s;
    s = std::clamp(s, 1e-30, 1e30);
  }
  out.iterations = it;
  if (fx >= base_value) {
    out.point = std::move(x);
    out.value = fx;
  } else {
    out.point = base;
    out.value = base_value;
  }
  return out;
}

RelaxedSolution solve_relaxed_subproblem(const ScaPoint& base, const ChannelSet& channels,
                                         const std::vector<CVec>& b, const SystemConfig& config,
                                         const ScaOptions& options) {
  return solve_relaxed_subproblem(base, build_context(channels, b, base, config), config, options);
}

RankOneFactor extract_rank_one(const CMat& m) {
  RankOneFactor out;
  const int n = static_cast<int>(m.rows());
  out.vector = CVec::Zero(n);
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(m));
  const double l1 = es.eigenvalues()[n - 1];
  if (l1 <= 0.0) return out;
  out.vector = std::sqrt(l1) * es.eigenvectors().col(n - 1);
  out.residual_ratio = n > 1 ? std::max(es.eigenvalues()[n - 2], 0.0) / l1 : 0.0;
  return out;
}

ScaPoint default_sca_init(const ChannelSet& channels, const SystemConfig& config,
                          const ScaOptions& options) {
  const int nt = channels.num_tx();
  const int kd = channels.k_dl();
  const double share = config.p_max_dl / (kd + 1);
  ScaPoint pt;
  for (int k = 0; k < kd; ++k) {
    CVec h = channels.h_bd[k];
    const double n = h.norm();
    if (n > 0.0) {
      h /= n;
    } else {
      h = CVec::Zero(nt);
      h[0] = 1.0;
    }
    pt.W.push_back(share * h * h.adjoint());
  }
  pt.V = options.allow_an ? CMat(share / nt * CMat::Identity(nt, nt)) : CMat::Zero(nt, nt);
  pt.p.assign(channels.k_ul(), config.p_max_ul);
  return pt;
}

ScaResult optimize_tx(const ChannelSet& channels, const std::vector<CVec>& b, const ScaPoint& init,
                      const SystemConfig& config, const ScaOptions& options) {
  ScaResult out;
  ScaPoint x = project_feasible_exact(init.W, init.V, init.p, config, options);
  ObjectiveContext ctx = build_context(channels, b, x, config);
  double prev = f_value(ctx) - g_value(ctx);
  out.fg_trace.push_back(prev);
  double boost = 1.0;
  for (int m = 0; m < config.sca.max_iterations; ++m) {
    ctx.point = x;
    const double gx = g_value(ctx);
    const GradientBundle gg = grad_g(ctx);
    RelaxedSolution rel = solve_relaxed_subproblem(x, ctx, config, options);
    out.inner_converged = out.inner_converged && rel.converged;
    ScaPoint y = std::move(rel.point);
    bool halved = false;
    // Halve y toward x until the expansion of g bounds g at y.
    for (int h = 0;; ++h) {
      ctx.point = y;
      const double gy = g_value(ctx);
      const double gt = g_tilde(y, x, gx, gg);
      if (gt >= gy - 1e-10) {
        rel.value = f_value(ctx) - gt;
        break;
      }
      if (h == 40) {
        y = x;
        ctx.point = y;
        rel.value = f_value(ctx) - gx;
        break;
      }
      halved = true;
      for (size_t k = 0; k < y.W.size(); ++k) y.W[k] = 0.5 * (y.W[k] + x.W[k]);
      y.V = 0.5 * (y.V + x.V);
      for (size_t u = 0; u < y.p.size(); ++u) y.p[u] = 0.5 * (y.p[u] + x.p[u]);
    }
    ctx.point = y;
    double fy = f_value(ctx) - g_value(ctx);
    if (options.extrapolate) {
      // Line search along y - x on f - g; the new base stays at least as good as y.
      bool first = true;
      for (double t = boost; t >= 1.0 / 64; t /= 2.0, first = false) {
        std::vector<CMat> w(y.W.size());
        for (size_t k = 0; k < w.size(); ++k) w[k] = y.W[k] + t * (y.W[k] - x.W[k]);
        std::vector<double> p(y.p.size());
        for (size_t u = 0; u < p.size(); ++u) p[u] = y.p[u] + t * (y.p[u] - x.p[u]);
        ScaPoint z = project_feasible_exact(w, y.V + t * (y.V - x.V), p, config, options);
        ctx.point = z;
        const double fz = f_value(ctx) - g_value(ctx);
        if (fz > fy) {
          y = std::move(z);
          fy = fz;
          boost = first ? std::min(2.0 * t, 64.0) : t;
          break;
        }
      }
      ctx.point = y;
    }
    x = std::move(y);
    out.objective_trace.push_back(rel.value);
    out.fg_trace.push_back(fy);
    ++out.iterations;
    const double gain = rel.value - prev;
    prev = out.fg_trace.back();
    if (gain < config.sca.tolerance && !halved) break;
  }
  out.relaxed = x;
  for (const auto& w : x.W) {
    RankOneFactor r = extract_rank_one(w);
    out.w.push_back(r.vector);
    out.rank_residuals.push_back(r.residual_ratio);
  }
  RankOneFactor rv = extract_rank_one(x.V);
  out.v = rv.vector;
  out.rank_residuals.push_back(rv.residual_ratio);
  out.p = x.p;
  for (double r : out.rank_residuals) out.max_rank_residual = std::max(out.max_rank_residual, r);
  return out;
}

}  // namespace masec
