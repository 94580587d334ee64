// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "pilot_kalman/common.hpp"

namespace pilotkalman {

/// Per-slot pilot power allocation problem over the selected eigen-directions.
/// Each direction carries its eigenvalue block at its pilot time (computed by
/// pure prediction from slot start) and the decay exponent from that time to
/// the end of the pilot period. Objective:
///   sum_i a^(2 e_i) sum_j noise * lambda_ij / (rho_i lambda_ij + noise).
struct PowerProblem {
  std::vector<RVec> blocks;      // one length-n_rx block per direction
  std::vector<int> exponents;    // e_i >= 0
  double budget;                 // M_p * rho_p
  double noise_var;              // > 0
  double a;                      // (0, 1]
};

struct WaterfillSolution {
  RVec powers;                // nonnegative, sums to budget
  double nu = 0.0;            // budget-constraint multiplier
  RVec slack;                 // per-direction inactivity multipliers, >= 0
  double kkt_residual = 0.0;  // max violation of stationarity / slackness
  bool degenerate = false;    // all-zero blocks: objective flat in the powers
};

double power_objective(const PowerProblem& p, const RVec& powers);

/// Exact water-filling by monotone bisection on nu with active-set
/// refinement. For all-zero blocks the objective is flat; the full budget goes
/// to the smallest exponent (lowest index on ties) and the solution is
/// flagged degenerate.
WaterfillSolution waterfill(const PowerProblem& p);

/// MISO closed form rho_i = (a^{e_i} sigma / sqrt(nu) - sigma^2 / lambda_i)^+
/// with nu from the power constraint over the active set.
WaterfillSolution waterfill_miso(const PowerProblem& p);

/// High-SNR approximation: geometric profile in the decay exponent,
/// rho_i = budget * a^{e_i} / sum_j a^{e_j} (uniform in the a -> 1 limit).
RVec highsnr_alloc(const PowerProblem& p);

/// Low-SNR approximation: the whole budget on the direction maximizing
/// a^{2 e_i} tr(block_i); ties broken by lowest index.
RVec lowsnr_alloc(const PowerProblem& p);

}  // namespace pilotkalman
