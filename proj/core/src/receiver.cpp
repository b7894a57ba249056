#include "masec/receiver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace masec {

CMat interference_matrix(const ChannelSet& ch, const std::vector<CVec>& w, const CVec& v,
                         const std::vector<double>& p, int k, const SystemConfig& config,
                         SiCovariance si) {
  const int nr = ch.num_rx();
  const int nt = ch.num_tx();
  if (k < 0 || k >= ch.k_ul()) throw DimensionError("UL user index out of range");
  if (static_cast<int>(p.size()) != ch.k_ul()) throw DimensionError("UL power count mismatch");
  if (v.size() != nt) throw DimensionError("AN vector length mismatch");

  CMat a = config.noise_ul * CMat::Identity(nr, nr);
  for (int i = 0; i < ch.k_ul(); ++i)
    if (i != k) a.noalias() += p[i] * (ch.h_ub[i] * ch.h_ub[i].adjoint());

  CMat tx_cov = v * v.adjoint();
  if (si == SiCovariance::kAggregate) {
    CVec sum = CVec::Zero(nt);
    for (const auto& wk : w) sum += wk;
    tx_cov.noalias() += sum * sum.adjoint();
  } else {
    for (const auto& wk : w) tx_cov.noalias() += wk * wk.adjoint();
  }
  a.noalias() += config.si_loss * (ch.h_si * tx_cov * ch.h_si.adjoint());
  // Round-off can leave a tiny anti-Hermitian part.
  return (a + a.adjoint()) / 2.0;
}

CVec optimal_receiver(const ChannelSet& ch, const std::vector<CVec>& w, const CVec& v,
                      const std::vector<double>& p, int k, const SystemConfig& config,
                      SiCovariance si) {
  const CMat a = interference_matrix(ch, w, v, p, k, config, si);
  const CVec& h = ch.h_ub[k];
  if (h.squaredNorm() == 0.0) return mrc_receiver(h);
  const CVec x = a.ldlt().solve(h);
  return x / x.norm();
}

CVec zf_receiver(const ChannelSet& ch, int k) {
  const int ku = ch.k_ul();
  const int nr = ch.num_rx();
  if (k < 0 || k >= ku) throw DimensionError("UL user index out of range");
  if (nr < ku) throw SolverError("zero-forcing needs at least as many receive antennas as UL users");
  CMat h(nr, ku);
  for (int i = 0; i < ku; ++i) h.col(i) = ch.h_ub[i];
  Eigen::ColPivHouseholderQR<CMat> qr(h);
  if (qr.rank() < ku) throw SolverError("stacked UL channel matrix is rank deficient");
  const CMat gram = h.adjoint() * h;
  CVec e = CVec::Zero(ku);
  e[k] = 1.0;
  const CVec col = h * gram.ldlt().solve(e);
  return col / col.norm();
}

CVec mrc_receiver(const CVec& h) {
  const double n = h.norm();
  if (n > 0.0) return h / n;
  CVec e = CVec::Zero(h.size());
  if (h.size() > 0) e[0] = 1.0;
  return e;
}

}  // namespace masec
