// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "pilot_kalman/channel_stats.hpp"
#include "pilot_kalman/rng.hpp"

namespace pilotkalman {

/// Vectorized channel realization h = vec(H) under the first-order
/// Gauss-Markov model h' = a h + sqrt(1 - a^2) b with R_b = R_h, which keeps
/// E{h h^H} = R_h for all time.
struct FadingState {
  CVec h;
  double a = 1.0;
  const ChannelStatistics* stats = nullptr;

  /// h reshaped as the n_rx x n_tx channel matrix view.
  Eigen::Map<const CMat> matrix() const {
    return {h.data(), stats->n_rx, stats->n_tx};
  }
};

/// Draws h ~ CN(0, R_h) through the eigenbasis: h = (U ⊗ V) diag(λ)^{1/2} z.
CVec sample_channel(const ChannelStatistics& stats, RngStream& rng);

FadingState init_channel(const ChannelStatistics& stats, double a, RngStream& rng);

/// One symbol-time step of the Gauss-Markov recursion.
void step_symbol(FadingState& state, RngStream& rng);

/// One slot step of the block-fading model: the channel is frozen within a
/// slot and this advances it to the next slot. Identical recursion.
void step_block(FadingState& state, RngStream& rng);

}  // namespace pilotkalman
