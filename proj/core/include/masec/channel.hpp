#pragma once

#include <span>
#include <vector>

#include "masec/config.hpp"
#include "masec/rng.hpp"
#include "masec/types.hpp"

namespace masec {

/// Transmit and receive antenna coordinates, in wavelengths, relative to the
/// centre of each square moving region.
struct AntennaLayout {
  std::vector<Point2> tx;
  std::vector<Point2> rx;

  /// Every coordinate inside [-A/2, A/2] and all same-side pairs at least
  /// D apart.
  bool feasible(const SystemConfig& config) const;
  bool in_region(double region_size) const;

  /// Stacked position vector [x_t1, y_t1, ..., x_rN, y_rN].
  RVec to_vector() const;
  static AntennaLayout from_vector(const RVec& u, int num_tx, int num_rx);

  friend bool operator==(const AntennaLayout&, const AntennaLayout&) = default;
};

/// Elevation/azimuth pairs of the paths seen at one link end. Angles in
/// radians on [0, pi].
struct LinkAngles {
  std::vector<double> elevation;
  std::vector<double> azimuth;

  int size() const { return static_cast<int>(elevation.size()); }
};

/// Position-independent channel state of one fading block.
struct ChannelGains {
  LinkAngles si_tx;
  LinkAngles si_rx;
  CMat si_prm;  // L_r x L_t path-response matrix of the self-interference link

  std::vector<LinkAngles> ub_angles;  // receive-side paths, per UL user
  std::vector<CVec> ub_prv;
  std::vector<LinkAngles> bd_angles;  // transmit-side paths, per DL user
  std::vector<CVec> bd_prv;
  std::vector<LinkAngles> be_angles;  // transmit-side paths, per Eve
  std::vector<CVec> be_prv;

  CMat h_ud;  // K_U x K_D scalar user-to-user channels
  CMat h_ue;  // K_U x K_E scalar user-to-Eve channels

  // Per-entry variances of the distributions the gains were drawn from.
  // Used to scale estimation errors.
  double si_prm_variance = 0.0;
  std::vector<double> ub_variance;
  std::vector<double> bd_variance;
  std::vector<double> be_variance;

  int k_ul() const { return static_cast<int>(ub_prv.size()); }
  int k_dl() const { return static_cast<int>(bd_prv.size()); }
  int k_eve() const { return static_cast<int>(be_prv.size()); }
};

/// Channel responses at one antenna layout.
struct ChannelSet {
  CMat h_si;                // N_r x N_t
  std::vector<CVec> h_ub;   // N_r each
  std::vector<CVec> h_bd;   // N_t each
  std::vector<CVec> h_be;   // N_t each
  CMat h_ud;
  CMat h_ue;

  int num_tx() const { return static_cast<int>(h_si.cols()); }
  int num_rx() const { return static_cast<int>(h_si.rows()); }
  int k_ul() const { return static_cast<int>(h_ub.size()); }
  int k_dl() const { return static_cast<int>(h_bd.size()); }
  int k_eve() const { return static_cast<int>(h_be.size()); }
};

/// Propagation-distance difference between `pos` and the region origin for
/// a path with the given angles: x sin(theta) cos(phi) + y cos(theta).
double phase_offset(const Point2& pos, double elevation, double azimuth);

/// Unit-modulus vector of per-path phase factors exp(j 2pi/lambda * offset).
CVec field_response_vector(const Point2& pos, const LinkAngles& angles, double wavelength = 1.0);

/// Field-response vectors of `positions` stacked column-wise (L x N).
CMat field_response_matrix(std::span<const Point2> positions, const LinkAngles& angles,
                           double wavelength = 1.0);

/// F(r)^H Sigma G(t).
CMat assemble_si_channel(const AntennaLayout& layout, const ChannelGains& gains,
                         double wavelength = 1.0);

enum class LinkSide { kTransmit, kReceive };

/// F^H p (receive side) or G^H p (transmit side); both are the conjugate
/// transpose of the field-response matrix applied to the path responses.
CVec assemble_link_channel(std::span<const Point2> positions, const LinkAngles& angles,
                           const CVec& prv, LinkSide side, double wavelength = 1.0);

/// All channel responses at `layout`. Feasibility is not required.
ChannelSet materialize(const AntennaLayout& layout, const ChannelGains& gains,
                       double wavelength = 1.0);

/// Terminal distances feeding the large-scale fading model, in metres.
struct LinkDistances {
  std::vector<double> ul;   // UL user -> BS
  std::vector<double> dl;   // BS -> DL user
  std::vector<double> eve;  // BS -> Eve
  RMat ul_to_dl;            // K_U x K_D
  RMat ul_to_eve;           // K_U x K_E
};

/// Geometry channel draw: diagonal PRM with CN(0, rho/L) entries, PRV entries
/// CN(0, rho0 d^-alpha / L), i.i.d. angles on [0, pi], and single-tap scalar
/// channels CN(0, rho0 d^-alpha). Every terminal draws from its own child
/// stream of `rng`, so adding terminals leaves the others unchanged.
ChannelGains sample_geometry_channels(const SystemConfig& config, const LinkDistances& distances,
                                      const Rng& rng);

/// Field-response information error families.
enum class FriErrorKind { kPathResponse, kDepartureAngle, kArrivalAngle };

struct FriError {
  FriErrorKind kind = FriErrorKind::kPathResponse;
  /// Normalized variance (path responses) or maximum angle error in radians.
  double magnitude = 0.0;
};

/// Estimated field-response information: the true gains with one error
/// family applied. Path responses get additive CN(0, eta * true variance)
/// noise on their non-structural entries; angles get U[-delta, delta] noise
/// clipped to [0, pi]. Departure angles are the transmit-side angles (SI
/// transmit, DL, Eve); arrival angles the receive side (SI receive, UL).
ChannelGains perturb_fri(const ChannelGains& gains, const FriError& error, Rng& rng);

}  // namespace masec
