// SPDX-License-Identifier: Apache-2.0
#include "pilot_kalman/fading.hpp"

#include <cmath>

namespace pilotkalman {

CVec sample_channel(const ChannelStatistics& stats, RngStream& rng) {
  CVec z(stats.dim());
  rng.fill_cgaussian(z);
  z.array() *= stats.eig_stacked.array().sqrt();
  return kron_apply(stats.tx_eigvecs, stats.rx_eigvecs, z);
}

FadingState init_channel(const ChannelStatistics& stats, double a, RngStream& rng) {
  if (a <= 0.0 || a > 1.0) throw std::invalid_argument("init_channel: a must be in (0, 1]");
  return {sample_channel(stats, rng), a, &stats};
}

void step_symbol(FadingState& state, RngStream& rng) {
  // The innovation is drawn even for a = 1 so the stream position does not
  // depend on a; sqrt(1 - a^2) = 0 then reproduces h exactly.
  const CVec b = sample_channel(*state.stats, rng);
  state.h = state.a * state.h + std::sqrt(std::max(0.0, 1.0 - state.a * state.a)) * b;
}

void step_block(FadingState& state, RngStream& rng) { step_symbol(state, rng); }

}  // namespace pilotkalman
