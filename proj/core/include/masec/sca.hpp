#pragma once

#include <vector>

#include "masec/channel.hpp"
#include "masec/config.hpp"
#include "masec/objective.hpp"
#include "masec/types.hpp"

namespace masec {

/// Gradients with respect to each covariance and power, under the real
/// trace inner product <A, B> = Re Tr{A^H B}.
struct GradientBundle {
  std::vector<CMat> dW;
  CMat dV;
  std::vector<double> dp;
};

/// Options that change the feasible set of the transmit sub-problem.
struct ScaOptions {
  /// When false, V is pinned to zero and the whole budget goes to the W_k.
  bool allow_an = true;
  /// After each convex step from x to y, search along y - x on the true
  /// objective f - g and move the next expansion point there if it is better.
  bool extrapolate = true;
};

/// Analytic gradient of g at ctx.point.
GradientBundle grad_g(const ObjectiveContext& ctx);
GradientBundle grad_g(const ScaPoint& point, const ChannelSet& channels, const std::vector<CVec>& b,
                      const SystemConfig& config);
/// Analytic gradient of f at ctx.point.
GradientBundle grad_f(const ObjectiveContext& ctx);

/// First-order expansion of g around `base`; an upper bound on g because g
/// is concave.
double g_tilde(const ScaPoint& point, const ScaPoint& base, double base_value,
               const GradientBundle& grads);

/// Eigenvalue clipping onto the PSD cone, then joint scaling of all
/// matrices when the trace budget is exceeded; p clamped to [0, P_U].
ScaPoint project_feasible(const std::vector<CMat>& W, const CMat& V, const std::vector<double>& p,
                          const SystemConfig& config);

/// Euclidean projection onto {W_k, V PSD, sum of traces <= P_D} x [0, P_U]^K.
/// The eigenvalues of all blocks are projected jointly onto the capped
/// simplex; eigenvectors are kept.
ScaPoint project_feasible_exact(const std::vector<CMat>& W, const CMat& V,
                                const std::vector<double>& p, const SystemConfig& config,
                                const ScaOptions& options = {});

struct RelaxedSolution {
  ScaPoint point;
  double value = 0.0;  // F~ = f - g~ at point
  int iterations = 0;
  bool converged = false;
};

/// Maximizes f - g~(. | base) over the relaxed set (rank constraints
/// dropped) by projected gradient ascent with Barzilai-Borwein steps and
/// Armijo backtracking. Never returns a point worse than `base`.
RelaxedSolution solve_relaxed_subproblem(const ScaPoint& base, const ObjectiveContext& ctx,
                                         const SystemConfig& config, const ScaOptions& options = {});
RelaxedSolution solve_relaxed_subproblem(const ScaPoint& base, const ChannelSet& channels,
                                         const std::vector<CVec>& b, const SystemConfig& config,
                                         const ScaOptions& options = {});

struct RankOneFactor {
  CVec vector;                 // sqrt(lambda_1) u_1
  double residual_ratio = 0.0; // lambda_2 / lambda_1, 0 when lambda_1 = 0
};

RankOneFactor extract_rank_one(const CMat& m);

/// Equal split of the DL budget over K_D matched beams plus an isotropic
/// AN slot; full UL power.
ScaPoint default_sca_init(const ChannelSet& channels, const SystemConfig& config,
                          const ScaOptions& options = {});

struct ScaResult {
  std::vector<CVec> w;
  CVec v;
  std::vector<double> p;
  ScaPoint relaxed;                     // last relaxed iterate
  std::vector<double> objective_trace;  // F~ after each SCA iteration
  std::vector<double> fg_trace;         // f - g at each iterate, starting with init
  std::vector<double> rank_residuals;   // W_1..W_K, then V
  double max_rank_residual = 0.0;
  int iterations = 0;
  bool inner_converged = true;
};

/// Successive convex approximation of the transmit sub-problem: relinearize
/// g, solve the relaxed subproblem, repeat until F~ improves by less than
/// eps_SCA or M iterations, then extract the dominant eigenvectors. A step
/// whose end point is not bounded by the expansion of g (possible with
/// K_E >= 2) is halved toward the expansion point until it is, and does not
/// count as converged.
ScaResult optimize_tx(const ChannelSet& channels, const std::vector<CVec>& b, const ScaPoint& init,
                      const SystemConfig& config, const ScaOptions& options = {});

}  // namespace masec
