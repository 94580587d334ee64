// SPDX-License-Identifier: Apache-2.0
#include "pilot_kalman/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

#include "pilot_kalman/fading.hpp"

namespace pilotkalman {

namespace {

// Per-run stream channels; run r uses stream ids r*4 .. r*4+2.
constexpr std::uint64_t kTruthChannel = 0;
constexpr std::uint64_t kNoiseChannel = 1;
constexpr std::uint64_t kDataChannel = 2;
// Experiment-level streams (random baseline beams) live far above run ids.
constexpr std::uint64_t kScheduleStreamBase = 1ULL << 63;

double deg2rad(double d) { return d * kPi / 180.0; }

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::Proposed: return "proposed";
    case Method::ProposedPower: return "proposed-power";
    case Method::Orthogonal: return "orthogonal";
    case Method::Random: return "random";
    case Method::FixedEigen: return "fixed-eigen";
    case Method::RoundRobin: return "round-robin";
    case Method::DftTdt: return "dft-tdt";
    case Method::BlockFadingProposed: return "block-fading-proposed";
  }
  return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
  for (Method m : {Method::Proposed, Method::ProposedPower, Method::Orthogonal, Method::Random,
                   Method::FixedEigen, Method::RoundRobin, Method::DftTdt,
                   Method::BlockFadingProposed}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

double ExperimentConfig::noise_var() const { return std::pow(10.0, -snr_db / 10.0); }

double ExperimentConfig::temporal_a() const {
  if (a_override) return *a_override;
  return doppler_coefficient(velocity_kmh / 3.6, carrier_hz, symbol_s);
}

void ExperimentConfig::validate() const {
  if (n_tx < 1 || n_rx < 1) throw std::invalid_argument("config: antenna counts must be positive");
  if (m_p < 1 || m_p > m) throw std::invalid_argument("config: need 1 <= M_p <= M");
  if (runs < 1) throw std::invalid_argument("config: runs must be >= 1");
  if (horizon_slots < 1) throw std::invalid_argument("config: horizon_slots must be >= 1");
  if (a_override && (*a_override <= 0.0 || *a_override > 1.0))
    throw std::invalid_argument("config: a must be in (0, 1]");
  if (fading == FadingModel::Block && n_rx != 1)
    throw std::invalid_argument("config: block fading is MISO (n_rx = 1)");
  if (model == ChannelModel::Upa && n_rx != 1)
    throw std::invalid_argument("config: UPA model is MISO (n_rx = 1)");
  for (Method mth : methods) {
    if (mth == Method::BlockFadingProposed && fading != FadingModel::Block)
      throw std::invalid_argument("config: block-fading-proposed requires fading = block");
    if (mth == Method::ProposedPower && fading == FadingModel::Block)
      throw std::invalid_argument("config: proposed-power is defined for symbolwise fading");
    if (mth == Method::DftTdt &&
        !(model == ChannelModel::OneRing || model == ChannelModel::DftTdt))
      throw std::invalid_argument("config: dft-tdt requires the one-ring ULA model");
    if (mth == Method::RoundRobin &&
        (round_robin_lp <= m_p || round_robin_lp > effective_n_tx()))
      throw std::invalid_argument("config: round-robin needs M_p < L_p <= N_t");
  }
}

double MetricSeries::steady_state_nmse(int m) const {
  return nmse.tail(m).mean();
}

double MetricSeries::steady_state_snr(int m) const {
  double acc = 0.0;
  int count = 0;
  for (long k = symbols() - m; k < symbols(); ++k) {
    if (!is_pilot[k]) {
      acc += received_snr(k);
      ++count;
    }
  }
  return count > 0 ? acc / count : 0.0;
}

ChannelStatistics build_truth_stats(const ExperimentConfig& cfg) {
  switch (cfg.model) {
    case ChannelModel::Exponential:
      return kron_stats(exp_covariance(cfg.n_tx, cfg.exp_corr),
                        exp_covariance(cfg.n_rx, cfg.exp_corr));
    case ChannelModel::OneRing:
    case ChannelModel::DftTdt: {
      const SpatialCovariance tx = one_ring_covariance(
          {deg2rad(cfg.aoa_deg), deg2rad(cfg.spread_deg), cfg.spacing, cfg.n_tx});
      const SpatialCovariance rx =
          cfg.n_rx == 1 ? SpatialCovariance{CMat::Identity(1, 1)}
                        : exp_covariance(cfg.n_rx, cfg.exp_corr);
      return kron_stats(tx, rx);
    }
    case ChannelModel::Upa:
      return upa_covariance(cfg.upa, cfg.path_loss);
  }
  throw std::logic_error("unreachable");
}

namespace {

ChannelStatistics build_filter_stats(const ExperimentConfig& cfg, Method method,
                                     const ChannelStatistics& truth) {
  const bool wants_tdt = method == Method::DftTdt || cfg.model == ChannelModel::DftTdt;
  if (!wants_tdt) return truth;
  return dft_tdt_approx(cfg.n_tx, deg2rad(cfg.aoa_deg), deg2rad(cfg.spread_deg), cfg.spacing);
}

bool is_block(const ExperimentConfig& cfg) { return cfg.fading == FadingModel::Block; }

bool adaptive_block_method(Method m) {
  return m == Method::Proposed || m == Method::BlockFadingProposed || m == Method::DftTdt;
}

SlotConfig slot_config(const ExperimentConfig& cfg) {
  return {cfg.m, cfg.m_p, 1.0, cfg.noise_var()};
}

// Static (schedule-driven) pilots for one method; adaptive block designs are
// generated inside the track instead.
PilotSchedule build_schedule(const ExperimentConfig& cfg, Method method,
                             const ChannelStatistics& stats_filter) {
  const SlotConfig sc = slot_config(cfg);
  const int slots = cfg.horizon_slots;
  RngStream sched_rng(cfg.seed, kScheduleStreamBase + static_cast<std::uint64_t>(method));
  switch (method) {
    case Method::Proposed:
    case Method::BlockFadingProposed:
    case Method::DftTdt:
      if (is_block(cfg)) return {};  // adaptive; built by the track
      return algorithm1_schedule(stats_filter, sc, cfg.temporal_a(), slots);
    case Method::ProposedPower:
      return algorithm2_schedule(stats_filter, sc, cfg.temporal_a(), slots);
    case Method::Orthogonal:
      return baseline_schedule(BaselineKind::Orthogonal, stats_filter, sc, slots, sched_rng);
    case Method::Random:
      return baseline_schedule(BaselineKind::Random, stats_filter, sc, slots, sched_rng);
    case Method::FixedEigen:
      return baseline_schedule(BaselineKind::FixedDominant, stats_filter, sc, slots, sched_rng);
    case Method::RoundRobin:
      return baseline_schedule(BaselineKind::RoundRobin, stats_filter, sc, slots, sched_rng,
                               cfg.round_robin_lp);
  }
  throw std::logic_error("unreachable");
}

// Random baselines in block mode need orthonormal per-slot frames; replace
// the i.i.d. beams by the Q factor of their slot matrix.
void orthonormalize_block_slots(PilotSchedule& sched, double rho_p) {
  for (int l = 0; l < sched.slots; ++l) {
    const int nt = static_cast<int>(sched.at(l, 0).beam.size());
    CMat slot_mat(nt, sched.m_p);
    for (int q = 0; q < sched.m_p; ++q) slot_mat.col(q) = sched.at(l, q).beam;
    Eigen::HouseholderQR<CMat> qr(slot_mat);
    const CMat q_factor = qr.householderQ() * CMat::Identity(nt, sched.m_p);
    for (int q = 0; q < sched.m_p; ++q) {
      auto& p = sched.pilots[static_cast<std::size_t>(l) * sched.m_p + q];
      p.beam = std::sqrt(rho_p) * q_factor.col(q);
      p.power = rho_p;
    }
  }
}

void track_symbolwise(MethodContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const ChannelStatistics& fs = ctx.stats_filter;
  const double s2 = cfg.noise_var();
  const double a2 = ctx.a * ctx.a;
  const long n_symbols = cfg.symbols();
  ctx.nmse.resize(n_symbols);
  ctx.is_pilot.assign(n_symbols, 0);
  ctx.eigen_path = ctx.schedule.eigen_aligned();

  if (ctx.eigen_path) {
    RVec lambda = fs.eig_stacked;
    std::size_t pi = 0;
    for (long k = 1; k <= n_symbols; ++k) {
      const int m = static_cast<int>((k - 1) % cfg.m) + 1;
      if (m <= cfg.m_p) {
        ctx.is_pilot[k - 1] = 1;
        const PilotAssignment& p = ctx.schedule.pilots[pi++];
        ctx.pilot_gains.push_back(
            eigen_gain_dense(fs, lambda, p.eigen_index, p.power, s2, p.beam));
        auto blk = lambda.segment(p.eigen_index * fs.n_rx, fs.n_rx);
        blk = (s2 * blk.array() / (p.power * blk.array() + s2)).matrix();
      } else {
        ctx.lambda_data.push_back(lambda);
      }
      ctx.nmse(k - 1) = lambda.sum() / fs.trace();
      lambda = a2 * lambda + (1.0 - a2) * fs.eig_stacked;
    }
  } else {
    KalmanFull st = init_kalman_full(fs);
    ctx.r_h_filter = kron(fs.tx_cov, fs.rx_cov);
    std::size_t pi = 0;
    for (long k = 1; k <= n_symbols; ++k) {
      const int m = static_cast<int>((k - 1) % cfg.m) + 1;
      if (m <= cfg.m_p) {
        ctx.is_pilot[k - 1] = 1;
        const PilotAssignment& p = ctx.schedule.pilots[pi++];
        ctx.pilot_gains.push_back(covariance_update(st, p.beam, s2));
        if (m == cfg.m_p) ctx.p_slot.push_back(st.cov);
      }
      ctx.nmse(k - 1) = st.cov.real().trace() / fs.trace();
      st.cov = a2 * st.cov + (1.0 - a2) * ctx.r_h_filter;
    }
  }
}

void track_block(MethodContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const ChannelStatistics& fs = ctx.stats_filter;
  const double s2 = cfg.noise_var();
  const double a2 = ctx.a * ctx.a;
  const double rho_p = 1.0;
  const long n_symbols = cfg.symbols();
  ctx.nmse.resize(n_symbols);
  ctx.is_pilot.assign(n_symbols, 0);

  const bool adaptive = adaptive_block_method(ctx.method);
  if (adaptive) {
    ctx.schedule.slots = cfg.horizon_slots;
    ctx.schedule.m = cfg.m;
    ctx.schedule.m_p = cfg.m_p;
    ctx.schedule.usage.assign(fs.n_tx, {});
  }
  ctx.eigen_path = adaptive || ctx.schedule.eigen_aligned();

  RVec lambda = fs.eig_stacked;          // eigen path state
  KalmanFull st = init_kalman_full(fs);  // full path state
  if (!ctx.eigen_path) ctx.r_h_filter = kron(fs.tx_cov, fs.rx_cov);

  for (int l = 0; l < cfg.horizon_slots; ++l) {
    const double prior_trace = ctx.eigen_path ? lambda.sum() : st.cov.real().trace();
    CMat pilots(fs.n_tx, cfg.m_p);
    if (adaptive) {
      // M_p dominant directions of the prediction covariance.
      std::vector<int> order(fs.n_tx);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int x, int y) { return lambda(x) > lambda(y); });
      for (int q = 0; q < cfg.m_p; ++q) {
        const int dir = order[q];
        const long k = static_cast<long>(l) * cfg.m + q + 1;
        CVec beam = eigen_beam(fs, dir, rho_p);
        pilots.col(q) = beam;
        ctx.schedule.pilots.push_back({k, dir, rho_p, std::move(beam)});
        ctx.schedule.usage[dir].push_back(k);
      }
    } else {
      for (int q = 0; q < cfg.m_p; ++q) pilots.col(q) = ctx.schedule.at(l, q).beam;
    }

    CMat gain;
    if (ctx.eigen_path) {
      // Orthogonal eigen-direction pilots: K = S diag(lambda_i/(rho lambda_i + s2)).
      RVec scale(cfg.m_p);
      for (int q = 0; q < cfg.m_p; ++q) {
        const int dir = ctx.schedule.at(l, q).eigen_index;
        scale(q) = lambda(dir) / (rho_p * lambda(dir) + s2);
        lambda(dir) = s2 * lambda(dir) / (rho_p * lambda(dir) + s2);
      }
      gain = pilots * scale.cast<cplx>().asDiagonal();
      ctx.lambda_slot.push_back(lambda);
    } else {
      gain = block_covariance_update(st, pilots, s2);
      ctx.p_slot.push_back(st.cov);
    }
    ctx.block_pilots.push_back(pilots);
    ctx.block_gains.push_back(std::move(gain));

    const double post_trace = ctx.eigen_path ? lambda.sum() : st.cov.real().trace();
    for (int m = 1; m <= cfg.m; ++m) {
      const long k = static_cast<long>(l) * cfg.m + m;
      ctx.is_pilot[k - 1] = m <= cfg.m_p;
      ctx.nmse(k - 1) = (m <= cfg.m_p ? prior_trace : post_trace) / fs.trace();
    }
    if (ctx.eigen_path) {
      lambda = a2 * lambda + (1.0 - a2) * fs.eig_stacked;
    } else {
      st.cov = a2 * st.cov + (1.0 - a2) * ctx.r_h_filter;
    }
  }
}

}  // namespace

MethodContext prepare_method(const ExperimentConfig& cfg, Method method) {
  cfg.validate();
  MethodContext ctx;
  ctx.cfg = cfg;
  ctx.method = method;
  ctx.a = cfg.temporal_a();
  ctx.stats_truth = build_truth_stats(cfg);
  ctx.stats_filter = build_filter_stats(cfg, method, ctx.stats_truth);
  ctx.schedule = build_schedule(cfg, method, ctx.stats_filter);
  if (is_block(cfg)) {
    if (method == Method::Random) orthonormalize_block_slots(ctx.schedule, 1.0);
    track_block(ctx);
  } else {
    track_symbolwise(ctx);
  }
  return ctx;
}

namespace {

RunSeries run_symbolwise(const MethodContext& ctx, int run_index) {
  const ExperimentConfig& cfg = ctx.cfg;
  const int nr = ctx.stats_truth.n_rx;
  const int nt = ctx.stats_truth.n_tx;
  const double s2 = cfg.noise_var();
  const double sw = std::sqrt(s2);
  const long n_symbols = cfg.symbols();
  const double tr_truth = ctx.stats_truth.trace();

  RngStream truth_rng(cfg.seed, static_cast<std::uint64_t>(run_index) * 4 + kTruthChannel);
  RngStream noise_rng(cfg.seed, static_cast<std::uint64_t>(run_index) * 4 + kNoiseChannel);
  RngStream data_rng(cfg.seed, static_cast<std::uint64_t>(run_index) * 4 + kDataChannel);

  FadingState truth = init_channel(ctx.stats_truth, ctx.a, truth_rng);
  CVec h_hat = CVec::Zero(ctx.stats_filter.dim());

  RunSeries out;
  out.empirical_sq_err.resize(n_symbols);
  out.received_snr = RVec::Zero(n_symbols);
  out.rate_bits = RVec::Zero(n_symbols);
  const int bps = bits_per_symbol(cfg.modulation);
  out.bit_errors.assign(n_symbols, 0);
  out.bits_sent.assign(n_symbols, 0);

  std::size_t pilot_idx = 0, data_idx = 0;
  std::vector<int> tx_bits(bps);
  for (long k = 1; k <= n_symbols; ++k) {
    const int m = static_cast<int>((k - 1) % cfg.m) + 1;
    if (m <= cfg.m_p) {
      const PilotAssignment& p = ctx.schedule.pilots[pilot_idx];
      CVec w(nr);
      noise_rng.fill_cgaussian(w);
      Eigen::Map<const CMat> h_mat(truth.h.data(), nr, nt);
      const CVec y = h_mat * p.beam.conjugate() + sw * w;
      Eigen::Map<const CMat> hh_mat(h_hat.data(), nr, nt);
      h_hat += ctx.pilot_gains[pilot_idx] * (y - hh_mat * p.beam.conjugate());
      ++pilot_idx;
      out.empirical_sq_err(k - 1) = (truth.h - h_hat).squaredNorm() / tr_truth;
    } else {
      // Predicted state enters the data symbol; beamform on it.
      bool fallback = false;
      CVec beam;
      if (nr == 1) {
        beam = mrt_beamformer(h_hat, 1.0, ctx.stats_filter, &fallback);
      } else {
        Eigen::Map<const CMat> hh_mat(h_hat.data(), nr, nt);
        beam = eigen_beamformer(hh_mat, 1.0, ctx.stats_filter, &fallback);
      }
      if (fallback) ++out.beam_fallbacks;
      double snr = 0.0;
      if (ctx.eigen_path) {
        snr = received_snr_eigen(beam, h_hat, ctx.lambda_data[data_idx], ctx.stats_filter, s2);
      } else {
        const int slot = static_cast<int>((k - 1) / cfg.m);
        const int steps = m - cfg.m_p;
        const double w2 = std::pow(ctx.a, 2.0 * steps);
        const CMat cov = w2 * ctx.p_slot[slot] + (1.0 - w2) * ctx.r_h_filter;
        snr = received_snr_full(beam, h_hat, cov, s2);
      }
      ++data_idx;
      out.received_snr(k - 1) = snr;
      out.rate_bits(k - 1) = std::log2(1.0 + snr);
      if (cfg.modulation != Modulation::None) {
        for (int b = 0; b < bps; ++b) tx_bits[b] = data_rng.next_bit();
        const cplx d = modulate(cfg.modulation, tx_bits);
        const CVec y = transmit_data(truth.h, beam, d, s2, nr, noise_rng);
        Eigen::Map<const CMat> hh_mat(h_hat.data(), nr, nt);
        const CVec g_est = hh_mat * beam.conjugate();
        // Receive-side MRC with the estimated effective channel.
        const cplx y_c = g_est.dot(y);
        const cplx gain_c = g_est.squaredNorm();
        bool guessed = false;
        const std::vector<int> rx_bits = detect(cfg.modulation, y_c, gain_c, data_rng, &guessed);
        if (guessed) ++out.detector_guesses;
        for (int b = 0; b < bps; ++b) out.bit_errors[k - 1] += (rx_bits[b] != tx_bits[b]);
        out.bits_sent[k - 1] = bps;
      }
      out.empirical_sq_err(k - 1) = (truth.h - h_hat).squaredNorm() / tr_truth;
    }
    h_hat *= ctx.a;
    step_symbol(truth, truth_rng);
  }
  return out;
}

RunSeries run_block(const MethodContext& ctx, int run_index) {
  const ExperimentConfig& cfg = ctx.cfg;
  const double s2 = cfg.noise_var();
  const double sw = std::sqrt(s2);
  const long n_symbols = cfg.symbols();
  const double tr_truth = ctx.stats_truth.trace();

  RngStream truth_rng(cfg.seed, static_cast<std::uint64_t>(run_index) * 4 + kTruthChannel);
  RngStream noise_rng(cfg.seed, static_cast<std::uint64_t>(run_index) * 4 + kNoiseChannel);
  RngStream data_rng(cfg.seed, static_cast<std::uint64_t>(run_index) * 4 + kDataChannel);

  FadingState truth = init_channel(ctx.stats_truth, ctx.a, truth_rng);
  CVec h_hat = CVec::Zero(ctx.stats_filter.n_tx);

  RunSeries out;
  out.empirical_sq_err.resize(n_symbols);
  out.received_snr = RVec::Zero(n_symbols);
  out.rate_bits = RVec::Zero(n_symbols);
  const int bps = bits_per_symbol(cfg.modulation);
  out.bit_errors.assign(n_symbols, 0);
  out.bits_sent.assign(n_symbols, 0);
  std::vector<int> tx_bits(bps);

  for (int l = 0; l < cfg.horizon_slots; ++l) {
    const double prior_err = (truth.h - h_hat).squaredNorm() / tr_truth;
    const CMat& pilots = ctx.block_pilots[l];
    CVec w(cfg.m_p);
    noise_rng.fill_cgaussian(w);
    const CVec y = pilots.adjoint() * truth.h + sw * w;
    h_hat += ctx.block_gains[l] * (y - pilots.adjoint() * h_hat);
    const double post_err = (truth.h - h_hat).squaredNorm() / tr_truth;

    bool fallback = false;
    const CVec beam = mrt_beamformer(h_hat, 1.0, ctx.stats_filter, &fallback);
    if (fallback) ++out.beam_fallbacks;
    double snr;
    if (ctx.eigen_path) {
      snr = received_snr_eigen(beam, h_hat, ctx.lambda_slot[l], ctx.stats_filter, s2);
    } else {
      snr = received_snr_full(beam, h_hat, ctx.p_slot[l], s2);
    }
    const double rate = std::log2(1.0 + snr);
    const cplx g_est = beam.dot(h_hat);  // scalar effective gain, MISO

    for (int m = 1; m <= cfg.m; ++m) {
      const long k = static_cast<long>(l) * cfg.m + m;
      if (m <= cfg.m_p) {
        out.empirical_sq_err(k - 1) = prior_err;
      } else {
        out.empirical_sq_err(k - 1) = post_err;
        out.received_snr(k - 1) = snr;
        out.rate_bits(k - 1) = rate;
        if (cfg.modulation != Modulation::None) {
          for (int b = 0; b < bps; ++b) tx_bits[b] = data_rng.next_bit();
          const cplx d = modulate(cfg.modulation, tx_bits);
          const cplx yk = transmit_data(truth.h, beam, d, s2, 1, noise_rng)(0);
          bool guessed = false;
          const std::vector<int> rx_bits = detect(cfg.modulation, yk, g_est, data_rng, &guessed);
          if (guessed) ++out.detector_guesses;
          for (int b = 0; b < bps; ++b) out.bit_errors[k - 1] += (rx_bits[b] != tx_bits[b]);
          out.bits_sent[k - 1] = bps;
        }
      }
    }
    h_hat *= ctx.a;
    step_block(truth, truth_rng);
  }
  return out;
}

}  // namespace

RunSeries run_episode(const MethodContext& ctx, int run_index) {
  return is_block(ctx.cfg) ? run_block(ctx, run_index) : run_symbolwise(ctx, run_index);
}

int resolve_thread_count(int requested, int runs) {
  int threads = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PILOT_KALMAN_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) threads = std::min(threads, cap);
  }
  return std::max(1, std::min(threads, runs));
}

MetricSeries monte_carlo(const MethodContext& ctx, int runs, int threads) {
  if (runs < 1) throw std::invalid_argument("monte_carlo: runs must be >= 1");
  const long n_symbols = ctx.cfg.symbols();
  std::vector<RunSeries> results(runs);
  const int n_threads = resolve_thread_count(threads > 0 ? threads : ctx.cfg.threads, runs);

  std::atomic<int> next_run{0};
  auto worker = [&]() {
    for (;;) {
      const int r = next_run.fetch_add(1);
      if (r >= runs) break;
      results[r] = run_episode(ctx, r);
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  MetricSeries series;
  series.nmse = ctx.nmse;
  series.is_pilot = ctx.is_pilot;
  series.runs = runs;
  series.empirical_nmse = RVec::Zero(n_symbols);
  series.received_snr = RVec::Zero(n_symbols);
  series.rate_bits = RVec::Zero(n_symbols);
  series.bit_errors.assign(n_symbols, 0);
  series.bits_sent.assign(n_symbols, 0);
  // Reduction in run-index order keeps the result independent of threading.
  for (int r = 0; r < runs; ++r) {
    const RunSeries& rs = results[r];
    series.empirical_nmse += rs.empirical_sq_err;
    series.received_snr += rs.received_snr;
    series.rate_bits += rs.rate_bits;
    for (long k = 0; k < n_symbols; ++k) {
      series.bit_errors[k] += rs.bit_errors[k];
      series.bits_sent[k] += rs.bits_sent[k];
    }
    series.beam_fallbacks += rs.beam_fallbacks;
    series.detector_guesses += rs.detector_guesses;
  }
  series.empirical_nmse /= runs;
  series.received_snr /= runs;
  series.rate_bits /= runs;
  return series;
}

std::vector<std::pair<Method, MetricSeries>> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::pair<Method, MetricSeries>> out;
  for (Method m : cfg.methods) {
    const MethodContext ctx = prepare_method(cfg, m);
    out.emplace_back(m, monte_carlo(ctx, cfg.runs, cfg.threads));
  }
  return out;
}

}  // namespace pilotkalman
