// SPDX-License-Identifier: Apache-2.0
#include "pilot_kalman/power_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pilotkalman {

namespace {

void check_problem(const PowerProblem& p) {
  if (p.blocks.empty()) throw std::invalid_argument("power: no directions");
  if (p.blocks.size() != p.exponents.size())
    throw std::invalid_argument("power: blocks/exponents size mismatch");
  if (p.budget <= 0.0) throw std::invalid_argument("power: budget must be > 0");
  if (p.noise_var <= 0.0) throw std::invalid_argument("power: noise_var must be > 0");
  if (p.a <= 0.0 || p.a > 1.0) throw std::invalid_argument("power: a must be in (0, 1]");
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    if (p.exponents[i] < 0) throw std::invalid_argument("power: negative exponent");
    if (p.blocks[i].size() < 1 || p.blocks[i].minCoeff() < 0.0)
      throw std::invalid_argument("power: blocks must be nonnegative");
  }
}

// Negative gradient of direction i's cost at power rho:
//   g_i(rho) = a^(2 e_i) sum_j noise lambda_j^2 / (rho lambda_j + noise)^2.
// Decreasing in rho; the active-direction stationarity condition is g = nu.
double grad(const PowerProblem& p, std::size_t i, double rho) {
  const double w = std::pow(p.a, 2.0 * p.exponents[i]);
  double s = 0.0;
  for (Eigen::Index j = 0; j < p.blocks[i].size(); ++j) {
    const double lam = p.blocks[i](j);
    const double d = rho * lam + p.noise_var;
    s += p.noise_var * lam * lam / (d * d);
  }
  return w * s;
}

// rho_i(nu): 0 if g_i(0) <= nu, else the root of g_i(rho) = nu.
double power_at(const PowerProblem& p, std::size_t i, double nu) {
  if (grad(p, i, 0.0) <= nu) return 0.0;
  if (p.blocks[i].size() == 1) {
    const double lam = p.blocks[i](0);
    const double we = std::pow(p.a, p.exponents[i]);
    return std::max(0.0, we * std::sqrt(p.noise_var) / std::sqrt(nu) - p.noise_var / lam);
  }
  double lo = 0.0, hi = p.budget;
  while (grad(p, i, hi) > nu) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (grad(p, i, mid) > nu ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

WaterfillSolution degenerate_solution(const PowerProblem& p) {
  // Flat objective: all budget to the direction with the smallest decay
  // exponent, lowest index on ties.
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.blocks.size(); ++i)
    if (p.exponents[i] < p.exponents[best]) best = i;
  WaterfillSolution sol;
  sol.powers = RVec::Zero(static_cast<Eigen::Index>(p.blocks.size()));
  sol.powers(static_cast<Eigen::Index>(best)) = p.budget;
  sol.slack = RVec::Zero(sol.powers.size());
  sol.degenerate = true;
  return sol;
}

void fill_kkt(const PowerProblem& p, WaterfillSolution& sol) {
  const std::size_t n = p.blocks.size();
  sol.slack = RVec::Zero(static_cast<Eigen::Index>(n));
  double residual = std::abs(sol.powers.sum() - p.budget) / p.budget * sol.nu;
  for (std::size_t i = 0; i < n; ++i) {
    const double gi = grad(p, i, sol.powers(static_cast<Eigen::Index>(i)));
    if (sol.powers(static_cast<Eigen::Index>(i)) > 0.0) {
      residual = std::max(residual, std::abs(gi - sol.nu));
    } else {
      sol.slack(static_cast<Eigen::Index>(i)) = sol.nu - gi;
      residual = std::max(residual, std::max(0.0, gi - sol.nu));
    }
  }
  sol.kkt_residual = residual / std::max(sol.nu, 1e-300);
}

}  // namespace

double power_objective(const PowerProblem& p, const RVec& powers) {
  double obj = 0.0;
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    const double w = std::pow(p.a, 2.0 * p.exponents[i]);
    for (Eigen::Index j = 0; j < p.blocks[i].size(); ++j) {
      const double lam = p.blocks[i](j);
      obj += w * p.noise_var * lam / (powers(static_cast<Eigen::Index>(i)) * lam + p.noise_var);
    }
  }
  return obj;
}

WaterfillSolution waterfill(const PowerProblem& p) {
  check_problem(p);
  const std::size_t n = p.blocks.size();
  bool all_zero = true;
  for (const auto& b : p.blocks) all_zero = all_zero && b.maxCoeff() <= 0.0;
  if (all_zero) return degenerate_solution(p);

  // sum_i rho_i(nu) is monotone decreasing in nu; bracket and bisect.
  double nu_hi = 0.0;
  double nu_lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    nu_hi = std::max(nu_hi, grad(p, i, 0.0));
    const double gb = grad(p, i, p.budget);
    if (gb > 0.0) nu_lo = std::min(nu_lo, gb);
  }
  auto total = [&](double nu) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += power_at(p, i, nu);
    return s;
  };
  for (int guard = 0; guard < 200 && total(nu_lo) < p.budget; ++guard) nu_lo *= 0.5;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(nu_lo * nu_hi);
    (total(mid) > p.budget ? nu_lo : nu_hi) = mid;
  }
  WaterfillSolution sol;
  sol.nu = std::sqrt(nu_lo * nu_hi);
  sol.powers = RVec::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    sol.powers(static_cast<Eigen::Index>(i)) = power_at(p, i, sol.nu);
  // Snap the roundoff-level budget residual onto the active directions.
  const double deficit = p.budget - sol.powers.sum();
  const double active_sum = sol.powers.sum();
  if (active_sum > 0.0) sol.powers *= 1.0 + deficit / active_sum;
  fill_kkt(p, sol);
  return sol;
}

WaterfillSolution waterfill_miso(const PowerProblem& p) {
  check_problem(p);
  for (const auto& b : p.blocks)
    if (b.size() != 1) throw std::invalid_argument("waterfill_miso: n_rx must be 1");
  const std::size_t n = p.blocks.size();
  bool all_zero = true;
  for (const auto& b : p.blocks) all_zero = all_zero && b(0) <= 0.0;
  if (all_zero) return degenerate_solution(p);

  const double sigma = std::sqrt(p.noise_var);
  std::vector<bool> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = p.blocks[i](0) > 0.0;

  RVec powers = RVec::Zero(static_cast<Eigen::Index>(n));
  double sqrt_nu = 0.0;
  for (std::size_t round = 0; round <= n; ++round) {
    double weight_sum = 0.0, inv_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      weight_sum += std::pow(p.a, p.exponents[i]);
      inv_sum += 1.0 / p.blocks[i](0);
    }
    if (weight_sum == 0.0) return degenerate_solution(p);
    sqrt_nu = sigma * weight_sum / (p.budget + p.noise_var * inv_sum);
    bool changed = false;
    powers.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      const double rho =
          std::pow(p.a, p.exponents[i]) * sigma / sqrt_nu - p.noise_var / p.blocks[i](0);
      if (rho < 0.0) {
        active[i] = false;
        changed = true;
      } else {
        powers(static_cast<Eigen::Index>(i)) = rho;
      }
    }
    if (!changed) break;
  }
  WaterfillSolution sol;
  sol.powers = powers;
  sol.nu = sqrt_nu * sqrt_nu;
  fill_kkt(p, sol);
  return sol;
}

RVec highsnr_alloc(const PowerProblem& p) {
  check_problem(p);
  RVec w(static_cast<Eigen::Index>(p.blocks.size()));
  for (std::size_t i = 0; i < p.blocks.size(); ++i)
    w(static_cast<Eigen::Index>(i)) = std::pow(p.a, p.exponents[i]);
  return p.budget * w / w.sum();
}

RVec lowsnr_alloc(const PowerProblem& p) {
  check_problem(p);
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    const double score = std::pow(p.a, 2.0 * p.exponents[i]) * p.blocks[i].sum();
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  RVec powers = RVec::Zero(static_cast<Eigen::Index>(p.blocks.size()));
  powers(static_cast<Eigen::Index>(best)) = p.budget;
  return powers;
}

}  // namespace pilotkalman
