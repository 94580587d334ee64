// SPDX-License-Identifier: Apache-2.0
#include "pilot_kalman/rng.hpp"

#include <cmath>

namespace pilotkalman {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline std::uint64_t mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t* hi) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  *hi = static_cast<std::uint64_t>(p >> 64);
  return static_cast<std::uint64_t>(p);
}

inline void round_once(std::array<std::uint64_t, 4>& x, const std::array<std::uint64_t, 2>& k) {
  std::uint64_t hi0, hi1;
  const std::uint64_t lo0 = mulhilo(kMul0, x[0], &hi0);
  const std::uint64_t lo1 = mulhilo(kMul1, x[2], &hi1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

namespace detail {

std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& ctr,
                                        const std::array<std::uint64_t, 2>& key) {
  std::array<std::uint64_t, 4> x = ctr;
  std::array<std::uint64_t, 2> k = key;
  round_once(x, k);
  for (int r = 1; r < 10; ++r) {
    k[0] += kWeyl0;
    k[1] += kWeyl1;
    round_once(x, k);
  }
  return x;
}

}  // namespace detail

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_{seed, 0}, ctr_{0, 0, stream_id, 0} {}

void RngStream::refill() {
  buf_ = detail::philox4x64(ctr_, key_);
  buf_pos_ = 0;
  if (++ctr_[0] == 0) ++ctr_[1];
}

std::uint64_t RngStream::next_u64() {
  if (buf_pos_ >= 4) refill();
  return buf_[buf_pos_++];
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_gaussian() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // u1 in (0,1] so the log is finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  cached_ = r * std::sin(2.0 * kPi * u2);
  has_cached_ = true;
  return r * std::cos(2.0 * kPi * u2);
}

cplx RngStream::next_cgaussian() {
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = next_double();
  const double r = std::sqrt(-std::log(u1));  // -2 log(u) scaled by 1/sqrt(2) squared
  return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
}

void RngStream::fill_cgaussian(CVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = next_cgaussian();
}

int RngStream::next_bit() { return static_cast<int>(next_u64() >> 63); }

}  // namespace pilotkalman
