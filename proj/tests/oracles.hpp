// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations the unit and acceptance suites check the
// library against. Everything here deliberately avoids the implementation
// paths it verifies: the batch estimator uses the joint-Gaussian formula, the
// quadrature oracle uses adaptive Simpson, and the power oracle scans the
// budget simplex on a grid.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "pilot_kalman/common.hpp"
#include "pilot_kalman/power_alloc.hpp"
#include "pilot_kalman/rng.hpp"

namespace oracle {

using pilotkalman::CMat;
using pilotkalman::CVec;
using pilotkalman::RVec;
using pilotkalman::cplx;

// ---------------------------------------------------------------------------
// Batch LMMSE for the Gauss-Markov state-space model. Pilot j is observed at
// symbol time t_j (strictly increasing, t >= 1) through y_j = S_j^H h_{t_j} + w_j
// with noise variance s2. The prior at t = 1 is P0 (marginal covariance of
// h_1), and the process contracts toward R_h. Returns E{h_T | y} and its
// error covariance at target time T = t_n.
struct BatchLmmse {
  CVec mean;
  CMat cov;
};

inline BatchLmmse batch_lmmse(const CMat& p0, const CMat& r_h, double a,
                              const std::vector<long>& times, const std::vector<CMat>& s_mats,
                              const std::vector<CVec>& ys, double s2) {
  const std::size_t n = times.size();
  const long target = times.back();
  const Eigen::Index dim = p0.rows();

  // Marginal covariance of h_{t}: V(t) = a^{2(t-1)} P0 + (1 - a^{2(t-1)}) R_h.
  auto marginal = [&](long t) -> CMat {
    const double w = std::pow(a, 2.0 * (t - 1));
    return w * p0 + (1.0 - w) * r_h;
  };
  // cov(h_s, h_t) for s >= t is a^{s-t} V(t).
  auto cross = [&](long s, long t) -> CMat {
    if (s >= t) return std::pow(a, s - t) * marginal(t);
    return (std::pow(a, t - s) * marginal(s)).adjoint().eval();
  };

  Eigen::Index total_obs = 0;
  for (const auto& s : s_mats) total_obs += s.cols();
  CMat gram(total_obs, total_obs);
  CMat cross_target(dim, total_obs);
  CVec stacked(total_obs);
  Eigen::Index row0 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Index col0 = 0;
    for (std::size_t j = 0; j < n; ++j) {
      CMat block = s_mats[i].adjoint() * cross(times[i], times[j]) * s_mats[j];
      if (i == j) block += s2 * CMat::Identity(block.rows(), block.cols());
      gram.block(row0, col0, s_mats[i].cols(), s_mats[j].cols()) = block;
      col0 += s_mats[j].cols();
    }
    cross_target.block(0, row0, dim, s_mats[i].cols()) =
        cross(target, times[i]) * s_mats[i];
    stacked.segment(row0, ys[i].size()) = ys[i];
    row0 += s_mats[i].cols();
  }
  BatchLmmse out;
  const CMat w = gram.ldlt().solve(cross_target.adjoint()).adjoint();
  out.mean = w * stacked;
  out.cov = marginal(target) - w * cross_target.adjoint();
  out.cov = 0.5 * (out.cov + out.cov.adjoint()).eval();
  return out;
}

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature (independent of the library's Gauss-Legendre
// path) for real integrands.
inline double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                               double tol, int depth = 24) {
  struct Rec {
    static double go(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double tol, int depth) {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
      return go(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             go(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  };
  const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  return Rec::go(f, lo, hi, fa, fm, fb, whole, tol, depth);
}

// One-ring covariance entry by adaptive Simpson at 1e-13 tolerance.
inline cplx one_ring_entry(double d_times_m, double theta, double delta) {
  const auto re = adaptive_simpson(
      [&](double al) { return std::cos(2.0 * pilotkalman::kPi * d_times_m * std::sin(al)); },
      theta - delta, theta + delta, 1e-13);
  const auto im = adaptive_simpson(
      [&](double al) { return -std::sin(2.0 * pilotkalman::kPi * d_times_m * std::sin(al)); },
      theta - delta, theta + delta, 1e-13);
  return cplx(re, im) / (2.0 * delta);
}

// ---------------------------------------------------------------------------
// Grid search over the budget simplex for PowerProblem objectives. step is a
// fraction of the budget. Returns the best objective found.
inline double grid_search_power(const pilotkalman::PowerProblem& p, double step_frac,
                                RVec* best_powers = nullptr) {
  const int n = static_cast<int>(p.blocks.size());
  const int steps = static_cast<int>(std::lround(1.0 / step_frac));
  RVec powers = RVec::Zero(n);
  RVec best = powers;
  double best_obj = std::numeric_limits<double>::infinity();
  std::function<void(int, int)> rec = [&](int dim, int remaining) {
    if (dim == n - 1) {
      powers(dim) = remaining * step_frac * p.budget;
      const double obj = pilotkalman::power_objective(p, powers);
      if (obj < best_obj) {
        best_obj = obj;
        best = powers;
      }
      return;
    }
    for (int q = 0; q <= remaining; ++q) {
      powers(dim) = q * step_frac * p.budget;
      rec(dim + 1, remaining - q);
    }
  };
  rec(0, steps);
  if (best_powers) *best_powers = best;
  return best_obj;
}

// ---------------------------------------------------------------------------
// Deterministic pseudo-random helpers for oracle-side instance generation.
inline CMat random_psd(int n, pilotkalman::RngStream& rng, double trace_to = 0.0) {
  CMat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.next_cgaussian();
  CMat m = g * g.adjoint() / static_cast<double>(n);
  m = 0.5 * (m + m.adjoint()).eval();
  if (trace_to > 0.0) m *= trace_to / m.real().trace();
  return m;
}

inline CVec random_unit(int n, pilotkalman::RngStream& rng) {
  CVec v(n);
  rng.fill_cgaussian(v);
  return v / v.norm();
}

// Random orthonormal frame via QR of a Gaussian matrix.
inline CMat random_frame(int n, int m, pilotkalman::RngStream& rng) {
  CMat g(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) g(i, j) = rng.next_cgaussian();
  Eigen::HouseholderQR<CMat> qr(g);
  return qr.householderQ() * CMat::Identity(n, m);
}

}  // namespace oracle
