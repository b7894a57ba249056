#pragma once

#include <vector>

#include "masec/channel.hpp"
#include "masec/config.hpp"
#include "masec/types.hpp"

namespace masec {

/// How the self-interference covariance enters the receive interference
/// matrix. kAggregate uses (sum_k w_k)(sum_k w_k)^H + V; kPerStream uses
/// sum_k w_k w_k^H + V, which matches the trace-form UL SINR.
enum class SiCovariance { kAggregate, kPerStream };

/// A_k = sum_{i != k} p_i h_UB,i h_UB,i^H + rho H_SI (W + V) H_SI^H + sigma_U^2 I.
CMat interference_matrix(const ChannelSet& channels, const std::vector<CVec>& w, const CVec& v,
                         const std::vector<double>& p, int k_ul, const SystemConfig& config,
                         SiCovariance si = SiCovariance::kAggregate);

/// Unit-norm maximizer of the generalized Rayleigh quotient
/// |b^H h_k|^2 / (b^H A_k b): b = A_k^{-1} h_k / ||A_k^{-1} h_k||.
CVec optimal_receiver(const ChannelSet& channels, const std::vector<CVec>& w, const CVec& v,
                      const std::vector<double>& p, int k_ul, const SystemConfig& config,
                      SiCovariance si = SiCovariance::kAggregate);

/// Normalized k-th column of H (H^H H)^{-1}, H = [h_UB,1 ... h_UB,K].
/// Throws SolverError when N_r < K_U or H is rank deficient.
CVec zf_receiver(const ChannelSet& channels, int k_ul);

/// Maximum-ratio combiner h / ||h||, or e_1 for a zero channel.
CVec mrc_receiver(const CVec& h);

}  // namespace masec
