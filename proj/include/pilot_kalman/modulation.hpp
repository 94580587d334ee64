// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "pilot_kalman/common.hpp"
#include "pilot_kalman/rng.hpp"

namespace pilotkalman {

enum class Modulation { None, Qpsk, Qam16 };

int bits_per_symbol(Modulation m);

/// Gray-labeled constellation point for the given bits, unit average energy.
cplx modulate(Modulation m, const std::vector<int>& bits);

/// Equalizes by the estimated effective gain and picks the nearest
/// constellation point. |gain| below 1e-12 degenerates to a random guess from
/// the stream (flagged through `guessed`).
std::vector<int> detect(Modulation m, cplx y, cplx gain_est, RngStream& rng,
                        bool* guessed = nullptr);

/// Gaussian tail Q(x), used by the BER oracles.
double q_function(double x);

}  // namespace pilotkalman
