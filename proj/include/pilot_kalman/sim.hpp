// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pilot_kalman/beamforming.hpp"
#include "pilot_kalman/modulation.hpp"
#include "pilot_kalman/pilot_design.hpp"

namespace pilotkalman {

enum class ChannelModel { Exponential, OneRing, Upa, DftTdt };
enum class FadingModel { Symbolwise, Block };
enum class Method {
  Proposed,
  ProposedPower,
  Orthogonal,
  Random,
  FixedEigen,
  RoundRobin,
  DftTdt,
  BlockFadingProposed,
};

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

struct ExperimentConfig {
  ChannelModel model = ChannelModel::Exponential;
  int n_tx = 32;
  int n_rx = 2;
  double exp_corr = 0.6;
  // one-ring ULA / DFT-TDT parameters
  double aoa_deg = 30.0;
  double spread_deg = 10.0;
  double spacing = 0.5;
  UpaGeometry upa;
  bool path_loss = false;

  FadingModel fading = FadingModel::Symbolwise;
  int m = 10;
  int m_p = 4;
  double snr_db = 15.0;  // sigma_w^2 = 10^(-snr_db/10) with rho_p = rho_d = 1
  double velocity_kmh = 3.0;
  double carrier_hz = 2.5e9;
  double symbol_s = 1e-4;
  std::optional<double> a_override;

  std::vector<Method> methods{Method::Proposed};
  int round_robin_lp = 24;
  Modulation modulation = Modulation::None;
  int runs = 1000;
  std::uint64_t seed = 1;
  int horizon_slots = 20;
  int threads = 0;  // 0 = hardware concurrency; PILOT_KALMAN_THREADS caps it

  double noise_var() const;
  double temporal_a() const;
  long symbols() const { return static_cast<long>(horizon_slots) * m; }
  /// Transmit antenna count after resolving the model (UPA uses its lattice).
  int effective_n_tx() const {
    return model == ChannelModel::Upa ? upa.n_vertical * upa.n_horizontal : n_tx;
  }
  void validate() const;
};

/// Time-indexed metrics averaged over Monte Carlo runs (fixed run order).
/// received_snr and rate are zero on pilot symbols (no data transmission);
/// ber entries exist only for data symbols when modulation is enabled.
struct MetricSeries {
  RVec nmse;            // analytic tr(P)/tr(R_h), the filter's belief
  RVec empirical_nmse;  // E||h - h_hat||^2 / tr(R_h)
  RVec received_snr;    // linear scale, mean over runs
  RVec rate_bits;       // mean over runs of log2(1 + snr)
  std::vector<long> bit_errors;
  std::vector<long> bits_sent;
  std::vector<char> is_pilot;
  int runs = 0;
  long beam_fallbacks = 0;
  long detector_guesses = 0;

  long symbols() const { return nmse.size(); }
  double ber(long k) const {
    return bits_sent[k] > 0 ? static_cast<double>(bit_errors[k]) / bits_sent[k] : 0.0;
  }
  /// Mean analytic NMSE over the last slot.
  double steady_state_nmse(int m) const;
  /// Mean received SNR (linear) over the data symbols of the last slot.
  double steady_state_snr(int m) const;
};

/// Everything deterministic about one method under one config: statistics,
/// schedule, per-symbol analytic covariance trace, and the precomputed Kalman
/// gains (the covariance recursion never depends on the observations).
struct MethodContext {
  ExperimentConfig cfg;
  Method method = Method::Proposed;
  ChannelStatistics stats_truth;
  ChannelStatistics stats_filter;  // differs from truth for the DFT-TDT design
  PilotSchedule schedule;
  double a = 1.0;

  // Per-symbol analytic NMSE of the filter's belief.
  RVec nmse;
  std::vector<char> is_pilot;
  // Symbolwise mode: one gain per pilot symbol.
  std::vector<CMat> pilot_gains;
  // Data-symbol covariance snapshots for received SNR: eigen-path lambda per
  // data symbol, or the filtered end-of-pilot covariance per slot plus R_h.
  bool eigen_path = false;
  std::vector<RVec> lambda_data;
  std::vector<CMat> p_slot;
  CMat r_h_filter;
  // Block mode: per-slot pilot matrix, gain, and filtered covariance.
  std::vector<CMat> block_pilots;
  std::vector<CMat> block_gains;
  std::vector<RVec> lambda_slot;
};

/// Builds the deterministic context (schedule + gain track) for one method.
MethodContext prepare_method(const ExperimentConfig& cfg, Method method);

/// Single Monte Carlo run with the given run index (streams derived from the
/// config seed and the index). Returns per-symbol raw series.
struct RunSeries {
  RVec empirical_sq_err;
  RVec received_snr;
  RVec rate_bits;
  std::vector<long> bit_errors;
  std::vector<long> bits_sent;
  long beam_fallbacks = 0;
  long detector_guesses = 0;
};
RunSeries run_episode(const MethodContext& ctx, int run_index);

/// Averages run_episode over `runs` independent streams; the reduction is
/// applied in run-index order so results are identical for any thread count.
MetricSeries monte_carlo(const MethodContext& ctx, int runs, int threads = 0);

/// Convenience: prepare + run every configured method.
std::vector<std::pair<Method, MetricSeries>> run_experiment(const ExperimentConfig& cfg);

/// The channel statistics the configured model generates (truth side).
ChannelStatistics build_truth_stats(const ExperimentConfig& cfg);

int resolve_thread_count(int requested, int runs);

}  // namespace pilotkalman
