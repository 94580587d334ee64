// SPDX-License-Identifier: Apache-2.0
#include "pilot_kalman/modulation.hpp"

#include <cmath>

namespace pilotkalman {

namespace {

// Per-axis Gray map for 16QAM, levels {-3,-1,1,3}/sqrt(10).
constexpr double kQamLevels[4] = {-3.0, -1.0, 1.0, 3.0};
constexpr int kQamGray[4] = {0, 1, 3, 2};  // bits for level index

int axis_bits_to_level(int b0, int b1) {
  const int code = (b0 << 1) | b1;
  for (int i = 0; i < 4; ++i)
    if (kQamGray[i] == code) return i;
  return 0;
}

}  // namespace

int bits_per_symbol(Modulation m) {
  switch (m) {
    case Modulation::Qpsk: return 2;
    case Modulation::Qam16: return 4;
    case Modulation::None: return 0;
  }
  return 0;
}

cplx modulate(Modulation m, const std::vector<int>& bits) {
  switch (m) {
    case Modulation::Qpsk: {
      const double s = 1.0 / std::sqrt(2.0);
      return {s * (1 - 2 * bits[0]), s * (1 - 2 * bits[1])};
    }
    case Modulation::Qam16: {
      const double s = 1.0 / std::sqrt(10.0);
      return {s * kQamLevels[axis_bits_to_level(bits[0], bits[1])],
              s * kQamLevels[axis_bits_to_level(bits[2], bits[3])]};
    }
    case Modulation::None: break;
  }
  throw std::invalid_argument("modulate: no constellation selected");
}

std::vector<int> detect(Modulation m, cplx y, cplx gain_est, RngStream& rng, bool* guessed) {
  if (guessed) *guessed = false;
  const int nbits = bits_per_symbol(m);
  if (std::abs(gain_est) < 1e-12) {
    if (guessed) *guessed = true;
    std::vector<int> bits(nbits);
    for (int& b : bits) b = rng.next_bit();
    return bits;
  }
  const cplx z = y / gain_est;
  switch (m) {
    case Modulation::Qpsk:
      return {z.real() < 0.0 ? 1 : 0, z.imag() < 0.0 ? 1 : 0};
    case Modulation::Qam16: {
      std::vector<int> bits(4);
      const double axes[2] = {z.real() * std::sqrt(10.0), z.imag() * std::sqrt(10.0)};
      for (int ax = 0; ax < 2; ++ax) {
        int best = 0;
        double best_d = std::abs(axes[ax] - kQamLevels[0]);
        for (int i = 1; i < 4; ++i) {
          const double d = std::abs(axes[ax] - kQamLevels[i]);
          if (d < best_d) {
            best_d = d;
            best = i;
          }
        }
        bits[2 * ax] = (kQamGray[best] >> 1) & 1;
        bits[2 * ax + 1] = kQamGray[best] & 1;
      }
      return bits;
    }
    case Modulation::None: break;
  }
  throw std::invalid_argument("detect: no constellation selected");
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace pilotkalman
