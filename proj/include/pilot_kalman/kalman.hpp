// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "pilot_kalman/channel_stats.hpp"

namespace pilotkalman {

/// One pilot observation: y = S^H h + w with S = beam ⊗ I_{n_rx} and
/// w ~ CN(0, noise_var I).
struct PilotObservation {
  CVec beam;         // n_tx, squared norm = pilot power
  CVec y;            // n_rx
  double noise_var;  // > 0
};

/// Full-matrix Kalman state: posterior/predicted mean and dense error
/// covariance. This is the reference implementation every fast path is
/// checked against.
struct KalmanFull {
  CVec h_hat;
  CMat cov;
  long k = 0;          // symbol index of the state
  bool filtered = false;

  double nmse(const ChannelStatistics& stats) const {
    return cov.real().trace() / stats.trace();
  }
};

/// Eigen-domain Kalman state: the covariance is the nonnegative eigenvalue
/// vector against the fixed U ⊗ V basis of the bound statistics (valid while
/// every pilot is a scaled tx eigenvector). The mean is kept in the original
/// basis.
struct KalmanEigen {
  CVec h_hat;
  RVec lambda;         // length n_tx * n_rx, blocks of n_rx
  long k = 0;
  bool filtered = false;

  double nmse(const ChannelStatistics& stats) const {
    return lambda.sum() / stats.trace();
  }
};

KalmanFull init_kalman_full(const ChannelStatistics& stats);
KalmanEigen init_kalman_eigen(const ChannelStatistics& stats);

/// m-step prediction: mean scaled by a^m, covariance contracted toward R_h.
void predict(KalmanFull& st, double a, const ChannelStatistics& stats, int m = 1);
void predict(KalmanEigen& st, double a, const ChannelStatistics& stats, int m = 1);

/// Exact measurement update for one pilot observation. The innovation
/// covariance is inverted with a Hermitian solve and the posterior is
/// re-symmetrized. Throws if the innovation covariance is numerically
/// singular (cannot happen for noise_var > 0).
void measurement_update(KalmanFull& st, const PilotObservation& obs);

/// Fast-path update for a pilot along tx eigen-direction `beam_index` with
/// power rho: only that lambda block changes,
/// lambda_ij <- noise * lambda_ij / (rho * lambda_ij + noise). When `y` is
/// given the mean is updated through the structured gain at O(n_tx n_rx^2).
void eigen_update(KalmanEigen& st, const ChannelStatistics& stats, int beam_index,
                  double rho, double noise_var, const CVec* y = nullptr);

/// Block-fading update with an n_tx x m_p pilot matrix satisfying
/// S^H S = rho_p I (rejected otherwise) and stacked observation y.
void block_update(KalmanFull& st, const CMat& pilots, const CVec& y, double noise_var);

/// Covariance-only updates that return the Kalman gain (the gain and the
/// covariance recursion are observation-independent, so simulation tracks
/// precompute them once per method).
CMat covariance_update(KalmanFull& st, const CVec& beam, double noise_var);
CMat block_covariance_update(KalmanFull& st, const CMat& pilots, double noise_var);

/// Dense structured gain of the eigen-domain update,
/// K = beam ⊗ (V diag(lambda_i / (rho lambda_i + noise)) V^H), for the prior
/// lambda. `beam` must be the scaled (possibly phase-rotated) eigenvector i.
CMat eigen_gain_dense(const ChannelStatistics& stats, const RVec& lambda, int beam_index,
                      double rho, double noise_var, const CVec& beam);

/// tr(cov) / tr(R_h) for either representation.
double nmse(const KalmanFull& st, const ChannelStatistics& stats);
double nmse(const KalmanEigen& st, const ChannelStatistics& stats);

/// Reconstructs the dense covariance of an eigen-domain state (tests).
CMat eigen_cov_dense(const KalmanEigen& st, const ChannelStatistics& stats);

}  // namespace pilotkalman
