#pragma once

#include <iosfwd>
#include <vector>

#include "masec/channel.hpp"
#include "masec/config.hpp"
#include "masec/types.hpp"

namespace masec {

/// Beamformers and powers: DL beamformers w_k, AN vector v, UL powers p_k
/// and receive beamformers b_k.
struct TxSolution {
  std::vector<CVec> w;
  CVec v;
  std::vector<double> p;
  std::vector<CVec> b;

  double transmit_power() const;
};

/// Transmit covariances W_k = w_k w_k^H, V = v v^H and UL powers; the
/// variable of the beamforming/power sub-problem once the rank-one
/// structure is relaxed.
struct ScaPoint {
  std::vector<CMat> W;
  CMat V;
  std::vector<double> p;

  double total_trace() const;
};

ScaPoint covariance_of(const TxSolution& solution);

/// Per-layout quantities feeding every SINR in trace form. The rank-one
/// matrices H_BD,k = h h^H, H_BE,k and H~_SI,k = h~ h~^H are held through
/// their generating vectors; quadratic forms h^H X h equal Tr{X h h^H}.
struct ObjectiveContext {
  int num_tx = 0;
  RMat ub_gain;                 // (k, i) -> |b_k^H h_UB,i|^2
  std::vector<CVec> si_eff;     // h~_SI,k = sqrt(rho) H_SI^H b_k
  std::vector<CVec> h_bd;
  std::vector<CVec> h_be;
  RMat ud_gain;                 // |h_UD|^2, K_U x K_D
  RMat ue_gain;                 // |h_UE|^2, K_U x K_E
  RVec b_norm2;
  double noise_ul = 0.0;
  double noise_dl = 0.0;
  double noise_eve = 0.0;
  ScaPoint point;

  int k_ul() const { return static_cast<int>(ub_gain.rows()); }
  int k_dl() const { return static_cast<int>(h_bd.size()); }
  int k_eve() const { return static_cast<int>(h_be.size()); }

  CMat si_cov(int k_ul) const { return si_eff[k_ul] * si_eff[k_ul].adjoint(); }
  CMat bd_cov(int k_dl) const { return h_bd[k_dl] * h_bd[k_dl].adjoint(); }
  CMat be_cov(int k_eve) const { return h_be[k_eve] * h_be[k_eve].adjoint(); }
};

/// Real part of h^H X h, i.e. Tr{X h h^H} for Hermitian X.
double quad_form(const CVec& h, const CMat& x);

/// Received power plus noise at DL user k: all DL streams (the desired one
/// only when `include_desired`), AN, co-channel UL and noise.
double dl_power_sum(const ObjectiveContext& ctx, int k_dl, bool include_desired);
/// Same at the output of receive beamformer b_k for UL user k.
double ul_power_sum(const ObjectiveContext& ctx, int k_ul, bool include_desired);
/// Tr{V H_BE,e} + sigma_E^2 for every Eve.
std::vector<double> eve_denominators(const ObjectiveContext& ctx);

ObjectiveContext build_context(const ChannelSet& channels, const TxSolution& solution,
                               const SystemConfig& config);
ObjectiveContext build_context(const ChannelSet& channels, const std::vector<CVec>& b,
                               const ScaPoint& point, const SystemConfig& config);

double sinr_ul(const ObjectiveContext& ctx, int k_ul);
double sinr_dl(const ObjectiveContext& ctx, int k_dl);
/// Cooperative eavesdropping SINRs in product form; 0 without Eves.
double sinr_eve_ul(const ObjectiveContext& ctx, int k_ul);
double sinr_eve_dl(const ObjectiveContext& ctx, int k_dl);

struct SecrecyTerm {
  double rate = 0.0;
  double eve_rate = 0.0;
  double secrecy = 0.0;  // max(rate - eve_rate, 0)
};

struct SsrBreakdown {
  std::vector<SecrecyTerm> ul;
  std::vector<SecrecyTerm> dl;
  double total = 0.0;

  double ul_total() const;
  double dl_total() const;
  /// Sum of rate differences without clamping.
  double unclamped() const;
};

SsrBreakdown ssr(const ObjectiveContext& ctx);

/// Convenience: SSR of `solution` on `channels`.
double ssr_value(const ChannelSet& channels, const TxSolution& solution, const SystemConfig& config);

/// The two log-sum terms whose difference is the unclamped SSR.
double f_value(const ObjectiveContext& ctx);
double g_value(const ObjectiveContext& ctx);

/// CSV with one row per legitimate user against the cooperating Eves:
/// direction,user,rate,eve_rate,secrecy
void write_ssr_csv(std::ostream& out, const SsrBreakdown& breakdown);

}  // namespace masec
