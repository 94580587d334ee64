// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pilot_kalman/power_alloc.hpp"

using namespace pilotkalman;

namespace {

PowerProblem miso_problem(std::vector<double> lams, std::vector<int> es, double budget,
                          double s2, double a) {
  PowerProblem p;
  for (double l : lams) p.blocks.push_back(RVec::Constant(1, l));
  p.exponents = std::move(es);
  p.budget = budget;
  p.noise_var = s2;
  p.a = a;
  return p;
}

PowerProblem random_problem(int n_dirs, int n_rx, RngStream& rng) {
  PowerProblem p;
  for (int i = 0; i < n_dirs; ++i) {
    RVec b(n_rx);
    for (int j = 0; j < n_rx; ++j) b(j) = rng.next_double() * 2.0;
    p.blocks.push_back(b);
    p.exponents.push_back(n_dirs - 1 - i);
  }
  p.budget = 1.0 + rng.next_double() * 3.0;
  p.noise_var = 0.05 + rng.next_double();
  p.a = 0.9 + rng.next_double() * 0.1;
  return p;
}

}  // namespace

TEST_CASE("waterfill: symmetric two-direction split") {
  const PowerProblem p = miso_problem({1.0, 1.0}, {0, 0}, 2.0, 1.0, 0.95);
  const WaterfillSolution w = waterfill(p);
  CHECK(w.powers(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(w.powers(1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(w.kkt_residual <= 1e-8);
}

TEST_CASE("waterfill: weak direction falls below the water level") {
  const PowerProblem p = miso_problem({1.0, 1e-6}, {0, 0}, 1.0, 1.0, 1.0);
  const WaterfillSolution w = waterfill(p);
  CHECK(w.powers(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(w.powers(1) <= 1e-6);
  // Cross-check against the closed form.
  const WaterfillSolution m = waterfill_miso(p);
  CHECK((w.powers - m.powers).cwiseAbs().maxCoeff() <= 1e-6 * p.budget);
}

TEST_CASE("waterfill matches the simplex grid oracle (MIMO blocks)") {
  RngStream rng(55, 0);
  for (int trial = 0; trial < 6; ++trial) {
    PowerProblem p = random_problem(3, 2, rng);
    p.a = 0.95;
    const WaterfillSolution w = waterfill(p);
    CHECK(w.kkt_residual <= 1e-8);
    CHECK(std::abs(w.powers.sum() - p.budget) <= 1e-9 * p.budget);
    const double grid_best = oracle::grid_search_power(p, 1e-3);
    CHECK(power_objective(p, w.powers) <= grid_best + 1e-6);
  }
}

TEST_CASE("waterfill_miso agrees with the generic solver on random problems") {
  RngStream rng(56, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_double() * 3);
    const PowerProblem p = random_problem(n, 1, rng);
    const WaterfillSolution gen = waterfill(p);
    const WaterfillSolution miso = waterfill_miso(p);
    CHECK((gen.powers - miso.powers).cwiseAbs().maxCoeff() <= 1e-6 * p.budget);
    CHECK(gen.kkt_residual <= 1e-8);
    CHECK(miso.kkt_residual <= 1e-8);
  }
}

TEST_CASE("waterfill_miso: uniform limit for a = 1 and equal eigenvalues") {
  const PowerProblem p = miso_problem({0.7, 0.7, 0.7}, {2, 1, 0}, 3.0, 0.5, 1.0);
  const WaterfillSolution w = waterfill_miso(p);
  for (int i = 0; i < 3; ++i) CHECK(w.powers(i) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("waterfill: zero-lambda directions are excluded from the active set") {
  const PowerProblem p = miso_problem({0.0, 1.0, 0.5}, {2, 1, 0}, 2.0, 0.3, 0.95);
  const WaterfillSolution w = waterfill(p);
  CHECK(w.powers(0) == doctest::Approx(0.0));
  CHECK(w.powers.sum() == doctest::Approx(2.0).epsilon(1e-9));
  const WaterfillSolution m = waterfill_miso(p);
  CHECK((w.powers - m.powers).cwiseAbs().maxCoeff() <= 1e-6 * p.budget);
}

TEST_CASE("waterfill: degenerate all-zero blocks") {
  const PowerProblem p = miso_problem({0.0, 0.0, 0.0}, {2, 0, 1}, 1.5, 0.3, 0.95);
  const WaterfillSolution w = waterfill(p);
  CHECK(w.degenerate);
  CHECK(w.powers(1) == doctest::Approx(1.5));  // smallest exponent
}

TEST_CASE("high-SNR allocation: geometric profile and budget") {
  const PowerProblem p = miso_problem({1.0, 1.0}, {1, 0}, 2.0, 0.5, 0.5);
  const RVec r = highsnr_alloc(p);
  CHECK(r(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r(1) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(r.sum() == doctest::Approx(2.0).epsilon(1e-12));

  const PowerProblem pu = miso_problem({1.0, 1.0}, {1, 0}, 2.0, 0.5, 1.0);
  const RVec ru = highsnr_alloc(pu);
  CHECK(ru(0) == doctest::Approx(1.0));
  CHECK(ru(1) == doctest::Approx(1.0));
}

TEST_CASE("high-SNR limit of the exact solver") {
  RngStream rng(57, 0);
  for (int trial = 0; trial < 20; ++trial) {
    PowerProblem p = random_problem(3, 1, rng);
    for (auto& b : p.blocks) b.array() += 0.5;  // keep eigenvalues well off zero
    p.noise_var = 1e-8 * 0.5;
    const WaterfillSolution w = waterfill(p);
    const RVec approx = highsnr_alloc(p);
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(w.powers(i) - approx(i)) <= 0.01 * approx(i));
  }
}

TEST_CASE("low-SNR allocation and limit") {
  {
    const PowerProblem p = miso_problem({1.0, 2.0}, {0, 0}, 3.0, 1.0, 0.9);
    const RVec r = lowsnr_alloc(p);
    CHECK(r(0) == doctest::Approx(0.0));
    CHECK(r(1) == doctest::Approx(3.0));
  }
  {
    // A large decay exponent can flip the winner; verify against a direct
    // evaluation of the weighted traces.
    const PowerProblem p = miso_problem({2.0, 1.0}, {2000, 0}, 1.0, 1.0, 0.99);
    const double w0 = std::pow(0.99, 2.0 * 2000) * 2.0;
    const double w1 = 1.0;
    REQUIRE(w1 > w0);
    const RVec r = lowsnr_alloc(p);
    CHECK(r(1) == doctest::Approx(1.0));
  }
  RngStream rng(58, 0);
  for (int trial = 0; trial < 20; ++trial) {
    // With equal decay exponents and scalar blocks the trace rule and the
    // exact low-noise gradient rule provably pick the same direction; with
    // mixed exponents only the one-hot shape survives the limit.
    PowerProblem p = random_problem(3, 1, rng);
    for (auto& b : p.blocks) b.array() += 0.1;
    p.noise_var = 1e6 * 2.0;
    CHECK(waterfill(p).powers.maxCoeff() >= 0.99 * p.budget);

    PowerProblem eq = p;
    eq.exponents = {0, 0, 0};
    const RVec one_hot = lowsnr_alloc(eq);
    Eigen::Index winner;
    one_hot.maxCoeff(&winner);
    CHECK(waterfill(eq).powers(winner) >= 0.99 * eq.budget);
  }
}

TEST_CASE("exact objective never exceeds the approximations'") {
  RngStream rng(59, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_double() * 3);
    const int nr = 1 + static_cast<int>(rng.next_double() * 2);
    const PowerProblem p = random_problem(n, nr, rng);
    const WaterfillSolution w = waterfill(p);
    const double exact = power_objective(p, w.powers);
    CHECK(exact <= power_objective(p, highsnr_alloc(p)) + 1e-12);
    CHECK(exact <= power_objective(p, lowsnr_alloc(p)) + 1e-12);
  }
}

TEST_CASE("single-use transfer lemma: later use dominates") {
  // End-of-slot block MSE as a function of the power epsilon moved from the
  // earlier use to the later use of the same direction: non-increasing on
  // [0, rho_first], minimized at full transfer.
  RngStream rng(60, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int nr = 1 + static_cast<int>(rng.next_double() * 2);
    RVec lam1(nr), lam_prior(nr);
    for (int j = 0; j < nr; ++j) {
      lam1(j) = 0.2 + rng.next_double() * 2.0;
      lam_prior(j) = lam1(j) * (0.3 + 0.7 * rng.next_double());  // below the ceiling
    }
    const double a = 0.9 + rng.next_double() * 0.0999;
    const double s2 = 0.05 + rng.next_double();
    const double rho_first = 0.2 + rng.next_double() * 2.0;
    const double rho_second = 0.2 + rng.next_double() * 2.0;
    const int gap = 1 + static_cast<int>(rng.next_double() * 4);

    auto end_of_slot_mse = [&](double eps) {
      const double r1 = rho_first - eps, r2 = rho_second + eps;
      RVec after_first(nr), prior_second(nr), after_second(nr);
      const double w = std::pow(a, 2.0 * gap);
      double total = 0.0;
      for (int j = 0; j < nr; ++j) {
        after_first(j) = s2 * lam_prior(j) / (r1 * lam_prior(j) + s2);
        prior_second(j) = w * after_first(j) + (1.0 - w) * lam1(j);
        after_second(j) = s2 * prior_second(j) / (r2 * prior_second(j) + s2);
        total += after_second(j);
      }
      return total;
    };

    double prev = end_of_slot_mse(0.0);
    for (int q = 1; q <= 40; ++q) {
      const double eps = rho_first * q / 40.0;
      const double cur = end_of_slot_mse(eps);
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
    CHECK(end_of_slot_mse(rho_first) <= end_of_slot_mse(0.0) + 1e-12);
  }
}

TEST_CASE("input validation") {
  PowerProblem p = miso_problem({1.0}, {0}, 1.0, 1.0, 0.9);
  p.budget = 0.0;
  CHECK_THROWS_AS(waterfill(p), std::invalid_argument);
  p.budget = 1.0;
  p.noise_var = 0.0;
  CHECK_THROWS_AS(waterfill(p), std::invalid_argument);
  p.noise_var = 1.0;
  p.exponents[0] = -1;
  CHECK_THROWS_AS(waterfill(p), std::invalid_argument);
}
