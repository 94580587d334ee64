// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "pilot_kalman/channel_stats.hpp"
#include "pilot_kalman/kalman.hpp"
#include "pilot_kalman/rng.hpp"

namespace pilotkalman {

/// Slot layout and pilot budget. In equal-power mode every pilot symbol
/// carries pilot_power; in power-allocation mode the per-slot budget is
/// m_p * pilot_power.
struct SlotConfig {
  int m = 10;             // symbols per slot
  int m_p = 4;            // pilot symbols per slot
  double pilot_power = 1.0;
  double noise_var = 0.0316227766016838;  // 10^-1.5

  int m_d() const { return m - m_p; }
  void validate() const {
    if (m_p < 1 || m_p > m) throw std::invalid_argument("SlotConfig: need 1 <= M_p <= M");
    if (pilot_power <= 0.0) throw std::invalid_argument("SlotConfig: pilot_power must be > 0");
    if (noise_var <= 0.0) throw std::invalid_argument("SlotConfig: noise_var must be > 0");
  }
};

/// One pilot symbol of a schedule. eigen_index is the tx eigen-direction when
/// the beam is a scaled eigenvector (fast-path eligible), -1 for free-form
/// beams. The explicit beam is always materialized.
struct PilotAssignment {
  long k = 0;          // 1-based global symbol index
  int eigen_index = -1;
  double power = 0.0;  // squared beam norm
  CVec beam;
};

struct PilotSchedule {
  int slots = 0, m = 0, m_p = 0;
  std::vector<PilotAssignment> pilots;  // slots * m_p entries, time order
  /// usage[i]: pilot symbol indices where eigen-direction i is used.
  std::vector<std::vector<long>> usage;

  const PilotAssignment& at(int slot, int pilot_pos) const {
    return pilots[static_cast<std::size_t>(slot) * m_p + pilot_pos];
  }
  /// Symbol intervals between consecutive uses of direction i.
  std::vector<long> intervals(int dir) const {
    std::vector<long> gaps;
    for (std::size_t j = 1; j < usage[dir].size(); ++j)
      gaps.push_back(usage[dir][j] - usage[dir][j - 1]);
    return gaps;
  }
  bool eigen_aligned() const;
  /// Throws unless per-slot powers sum to the budget (1e-12) and, when
  /// `once_per_slot`, no direction repeats within a slot.
  void check_power_compliance(double budget_per_slot, bool once_per_slot) const;
};

/// Greedy index of Algorithm 1: argmax_i sum_j rho lambda_ij^2 /
/// (rho lambda_ij + noise), ties to the lowest index.
int greedy_index(const RVec& lambda, int n_tx, int n_rx, double rho, double noise_var);

/// Trace of block i after hypothetically measuring direction `target` at
/// power rho (helper for the exhaustive alternative-index checks).
double greedy_score(const RVec& lambda, int n_tx, int n_rx, int i, double rho,
                    double noise_var);

/// Sequentially optimal equal-power design: per pilot symbol pick the greedy
/// index, update that block, and contract every block toward lambda^(1) after
/// each symbol of the slot.
PilotSchedule algorithm1_schedule(const ChannelStatistics& stats, const SlotConfig& cfg,
                                  double a, int slots);

/// End-of-pilot-period objective route: per pilot symbol pick the index that
/// minimizes the predicted trace at the end of the current pilot period.
/// Provably emits the same schedule as algorithm1_schedule.
PilotSchedule problem2_schedule(const ChannelStatistics& stats, const SlotConfig& cfg,
                                double a, int slots);

/// Power-allocated design: per slot select m_p distinct directions by the
/// trace criterion (prediction-only between selections), water-fill the slot
/// budget over them, then replay the slot with true updates at the assigned
/// powers.
PilotSchedule algorithm2_schedule(const ChannelStatistics& stats, const SlotConfig& cfg,
                                  double a, int slots);

/// Block-fading pilot matrix: sqrt(rho_p) times the m_p dominant eigenvectors
/// of the prediction error covariance. MISO only; requires m_p < n_tx.
CMat block_fading_design(const KalmanFull& pred, int m_p, double rho_p);
CMat block_fading_design(const KalmanEigen& pred, const ChannelStatistics& stats, int m_p,
                         double rho_p);

enum class BaselineKind { Orthogonal, Random, FixedDominant, RoundRobin };

/// Reference schedules: orthogonal cycles the DFT basis with period n_tx;
/// random draws i.i.d. unit-norm beams; fixed-dominant repeats the top-m_p
/// eigenvectors of R_h; round-robin cycles m_p patterns per slot through the
/// top-l_p eigenvectors (requires l_p > m_p).
PilotSchedule baseline_schedule(BaselineKind kind, const ChannelStatistics& stats,
                                const SlotConfig& cfg, int slots, RngStream& rng,
                                int l_p = 0);

/// Pilot beam for eigen-direction i at the given power, global phase fixed so
/// the largest-magnitude entry is real positive.
CVec eigen_beam(const ChannelStatistics& stats, int i, double power);

}  // namespace pilotkalman
