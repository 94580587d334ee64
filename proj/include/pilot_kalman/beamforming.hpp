// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "pilot_kalman/channel_stats.hpp"
#include "pilot_kalman/kalman.hpp"
#include "pilot_kalman/rng.hpp"

namespace pilotkalman {

/// Maximal-ratio transmit beam for a MISO predicted channel: direction
/// h_hat / ||h_hat|| scaled to ||s||^2 = rho_d. Zero estimate falls back to
/// the dominant eigenvector of R_h; `fell_back` reports it when non-null.
CVec mrt_beamformer(const CVec& h_hat, double rho_d, const ChannelStatistics& stats,
                    bool* fell_back = nullptr);

/// Dominant right singular vector of the predicted channel matrix, scaled to
/// ||s||^2 = rho_d. Coincides with MRT for one receive antenna.
CVec eigen_beamformer(const CMat& h_hat_matrix, double rho_d, const ChannelStatistics& stats,
                      bool* fell_back = nullptr);

/// Received SNR with the estimated channel. For one receive antenna this is
/// |s^H h_hat|^2 / (s^H P s + sigma^2); with several, the receiver combines
/// with the estimated effective channel g = (s ⊗ I)^H h_hat:
/// ||g||^4 / (g^H (S^H P S) g / ||g||^2 ... ) reduces to the same expression.
double received_snr_full(const CVec& beam, const CVec& h_hat, const CMat& cov,
                         double noise_var);

/// Same value computed in the eigenbasis: s^H P s = sum_i |c_i|^2 Lambda_i
/// with c = U^H s, at O(n_tx n_rx) after the basis transform.
double received_snr_eigen(const CVec& beam, const CVec& h_hat, const RVec& lambda,
                          const ChannelStatistics& stats, double noise_var);

/// Data-phase observation y = (s ⊗ I)^H h d + w with w ~ CN(0, noise_var I).
/// `h` is the vectorized true channel, `n_rx` its receive dimension.
CVec transmit_data(const CVec& h, const CVec& beam, cplx d, double noise_var, int n_rx,
                   RngStream& rng);

}  // namespace pilotkalman
