// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

#include "pilot_kalman/common.hpp"

namespace pilotkalman {

/// Counter-based random stream (Philox4x64-10). A stream is addressed by
/// (seed, stream_id); streams with distinct ids are independent and need no
/// coordination, so Monte Carlo runs can be split by run index. Identical
/// (seed, stream_id) reproduce identical draws on any platform.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  /// Uniform on [0, 1), 53-bit resolution.
  double next_double();

  /// Standard real Gaussian via Box-Muller (pairs cached).
  double next_gaussian();

  /// Circularly-symmetric complex Gaussian CN(0, 1): two independent real
  /// Gaussians scaled by 1/sqrt(2).
  cplx next_cgaussian();

  void fill_cgaussian(CVec& v);

  /// One uniformly random bit.
  int next_bit();

 private:
  void refill();

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> ctr_;
  std::array<std::uint64_t, 4> buf_{};
  int buf_pos_ = 4;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

namespace detail {
/// One Philox4x64-10 block; exposed for known-answer tests.
std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& ctr,
                                        const std::array<std::uint64_t, 2>& key);
}  // namespace detail

}  // namespace pilotkalman
