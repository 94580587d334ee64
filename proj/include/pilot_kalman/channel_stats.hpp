// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "pilot_kalman/common.hpp"

namespace pilotkalman {

/// Hermitian PSD spatial correlation matrix. Model constructors keep a unit
/// diagonal, so the trace equals the antenna count.
struct SpatialCovariance {
  CMat entries;

  int dim() const { return static_cast<int>(entries.rows()); }
  double trace() const { return entries.real().trace(); }

  /// Throws if the matrix is not Hermitian (1e-12) or has an eigenvalue below
  /// -1e-10 times the largest.
  void validate() const;
};

struct OneRingGeometry {
  double aoa;           // radians
  double angle_spread;  // radians, > 0
  double spacing;       // antenna spacing in wavelengths, > 0
  int n;                // antenna count
};

/// Planar-array scenario: vertical/horizontal one-ring factors derived from
/// the elevation, scattering-ring radius and transmitter-receiver distance.
struct UpaGeometry {
  int n_vertical = 10;
  int n_horizontal = 25;
  double elevation_m = 60.0;
  double ring_radius_m = 30.0;
  double distance_m = 100.0;
  double horizontal_aoa = kPi / 6.0;  // radians
  double path_loss_exponent = 3.8;
  double reference_distance_m = 30.0;
  double spacing = 0.5;  // wavelengths

  double delta_v() const;
  double theta_v() const;
  double delta_h() const;
  /// (1 + (s/d0)^alpha)^-1
  double path_loss() const;
};

/// Kronecker channel statistics: R_h = R_t ⊗ R_r with the eigenstructure the
/// fast-path recursions run on. eig_stacked is partitioned into n_tx blocks
/// of length n_rx; block i holds tx_eigvals(i) * rx_eigvals(j). Eigenvalues
/// are sorted descending with ties broken by original index.
struct ChannelStatistics {
  CMat tx_cov;        // R_t, n_tx x n_tx
  CMat rx_cov;        // R_r, n_rx x n_rx
  CMat tx_eigvecs;    // U
  CMat rx_eigvecs;    // V
  RVec tx_eigvals;    // sigma, descending
  RVec rx_eigvals;    // gamma, descending
  RVec eig_stacked;   // lambda^(1), length n_tx * n_rx
  int n_tx = 0;
  int n_rx = 0;

  int dim() const { return n_tx * n_rx; }
  double trace() const { return eig_stacked.sum(); }
  CMat full_cov() const { return kron(tx_cov, rx_cov); }

  /// Block i of eig_stacked (length n_rx).
  Eigen::VectorBlock<const RVec> block(int i) const {
    return eig_stacked.segment(i * n_rx, n_rx);
  }
};

/// Exponential correlation: entries r^(2|i-j|). Requires 0 <= r < 1.
SpatialCovariance exp_covariance(int n, double r);

/// One-ring correlation for a ULA: Hermitian Toeplitz with unit diagonal,
/// entry (i,j) the quadrature value of the scatter-ring integral. Quadrature
/// is composite Gauss-Legendre refined until the change between levels drops
/// below 1e-10 (relative to the unit-diagonal scale); non-convergence throws.
SpatialCovariance one_ring_covariance(const OneRingGeometry& g);

/// Planar-array statistics: R_t = R_H ⊗ R_V from the two one-ring factors,
/// scalar receive side. With apply_path_loss the whole R_h is scaled by the
/// path-loss factor (NMSE is scale-invariant; this only moves absolute
/// received-SNR levels).
ChannelStatistics upa_covariance(const UpaGeometry& g, bool apply_path_loss = false);

/// DFT-basis approximation of a one-ring transmit covariance: the eigenbasis
/// is the full unitary DFT matrix with the in-support columns (virtual angles
/// inside (aoa - spread, aoa + spread)) carrying the given power profile, all
/// other bins zero. Profile must sum to n. Columns are reordered so the
/// stacked eigenvalues are descending.
ChannelStatistics dft_tdt_approx(int n, double aoa, double angle_spread, double spacing,
                                 const RVec& power_profile);

/// Default-profile variant: samples the exact one-ring spectrum on the
/// in-support bins and renormalizes to trace n.
ChannelStatistics dft_tdt_approx(int n, double aoa, double angle_spread, double spacing);

/// Indices k (DFT bin, in [-n/2, n/2)) whose steering angle asin(k/(n*D))
/// falls inside (aoa - spread, aoa + spread).
std::vector<int> dft_support_bins(int n, double aoa, double angle_spread, double spacing);

/// Unitary DFT column for bin k: entry m is exp(-i 2 pi m k / n) / sqrt(n).
CVec dft_column(int n, int k);

/// Assembles ChannelStatistics from the two factors (eigendecomposition,
/// descending order, stacked eigenvalue vector).
ChannelStatistics kron_stats(const SpatialCovariance& tx, const SpatialCovariance& rx);

/// Temporal fading coefficient a = J0(2 pi f_D T_s) with f_D = v f_c / c,
/// clamped into (0, 1].
double doppler_coefficient(double v_mps, double carrier_hz, double symbol_s);

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending with
/// stable tie-breaking, negatives clipped to zero.
void hermitian_eig_descending(const CMat& m, CMat& vecs, RVec& vals);

}  // namespace pilotkalman
