// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pilot_kalman/fading.hpp"

using namespace pilotkalman;

namespace {

ChannelStatistics identity_stats(int nt, int nr) {
  SpatialCovariance tx{CMat::Identity(nt, nt)};
  SpatialCovariance rx{CMat::Identity(nr, nr)};
  return kron_stats(tx, rx);
}

}  // namespace

TEST_CASE("init_channel: zero eigenvalues give the zero channel") {
  ChannelStatistics s = identity_stats(3, 1);
  s.eig_stacked.setZero();
  RngStream rng(1, 0);
  const FadingState st = init_channel(s, 0.9, rng);
  CHECK(st.h.norm() == doctest::Approx(0.0));
}

TEST_CASE("init_channel: sample covariance of identity statistics") {
  const ChannelStatistics s = identity_stats(2, 2);
  RngStream rng(2, 0);
  CMat acc = CMat::Zero(4, 4);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const CVec h = sample_channel(s, rng);
    acc += h * h.adjoint();
  }
  acc /= draws;
  CHECK((acc - CMat::Identity(4, 4)).norm() < 0.05 * CMat::Identity(4, 4).norm() * 2);
}

TEST_CASE("init_channel: deterministic for fixed stream") {
  const ChannelStatistics s = identity_stats(4, 2);
  RngStream r1(99, 5), r2(99, 5);
  const FadingState a = init_channel(s, 0.99, r1);
  const FadingState b = init_channel(s, 0.99, r2);
  CHECK((a.h - b.h).norm() == 0.0);  // bitwise identical
}

TEST_CASE("step_symbol limits: a = 1 freezes, a near 0 redraws") {
  const ChannelStatistics s = identity_stats(3, 1);
  RngStream rng(5, 1);
  FadingState st = init_channel(s, 1.0, rng);
  const CVec before = st.h;
  step_symbol(st, rng);
  CHECK((st.h - before).norm() == 0.0);

  // a -> 0 limit: the new state is the fresh innovation draw.
  st.a = 1e-12;
  const CVec old = st.h;
  step_symbol(st, rng);
  CHECK((st.h - old).norm() > 0.1);
  CHECK(std::abs(st.h.squaredNorm() / 3.0 - 1.0) < 5.0);  // fresh CN(0, I) scale
}

TEST_CASE("step_symbol: lag-1 autocorrelation matches a") {
  const ChannelStatistics s = identity_stats(2, 1);
  const double a = 0.9995;
  RngStream rng(7, 2);
  FadingState st = init_channel(s, a, rng);
  // Empirical lag-1 autocorrelation of one coefficient over many steps.
  const int n = 100000;
  double num = 0, den = 0;
  cplx prev = st.h(0);
  for (int i = 0; i < n; ++i) {
    step_symbol(st, rng);
    num += (std::conj(prev) * st.h(0)).real();
    den += std::norm(prev);
    prev = st.h(0);
  }
  CHECK(std::abs(num / den - a) < 0.005);
}

TEST_CASE("step_block: stationary variance stays at the Lyapunov fixed point") {
  const ChannelStatistics s = identity_stats(2, 1);
  RngStream rng(8, 3);
  FadingState st = init_channel(s, 0.9, rng);
  const int n = 10000;
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    step_block(st, rng);
    acc += st.h.squaredNorm();
  }
  // Per-coefficient variance should stay at tr(R_h)/(Nt*Nr) = 1.
  CHECK(std::abs(acc / (n * 2.0) - 1.0) < 0.05);
}

TEST_CASE("trajectory is a pure function of (seed, stream, steps)") {
  const ChannelStatistics s = identity_stats(3, 2);
  for (int reps = 0; reps < 2; ++reps) {
    RngStream rng(11, 17);
    FadingState st = init_channel(s, 0.95, rng);
    for (int i = 0; i < 10; ++i) step_symbol(st, rng);
    static CVec first;
    if (reps == 0)
      first = st.h;
    else
      CHECK((st.h - first).norm() == 0.0);
  }
}

TEST_CASE("correlated statistics: sampler covariance converges to R_h") {
  RngStream seed_rng(21, 0);
  SpatialCovariance tx{oracle::random_psd(3, seed_rng, 3)};
  SpatialCovariance rx{CMat::Identity(1, 1)};
  const ChannelStatistics s = kron_stats(tx, rx);
  RngStream rng(22, 1);
  CMat acc = CMat::Zero(3, 3);
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const CVec h = sample_channel(s, rng);
    acc += h * h.adjoint();
  }
  acc /= draws;
  CHECK((acc - tx.entries).norm() < 0.05 * tx.entries.norm());
}
