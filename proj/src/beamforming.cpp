// SPDX-License-Identifier: Apache-2.0
#include "pilot_kalman/beamforming.hpp"

#include <cmath>

#include "pilot_kalman/rng.hpp"

namespace pilotkalman {

CVec mrt_beamformer(const CVec& h_hat, double rho_d, const ChannelStatistics& stats,
                    bool* fell_back) {
  if (fell_back) *fell_back = false;
  const double norm = h_hat.norm();
  if (norm < 1e-300) {
    if (fell_back) *fell_back = true;
    return std::sqrt(rho_d) * stats.tx_eigvecs.col(0);
  }
  return std::sqrt(rho_d) / norm * h_hat;
}

CVec eigen_beamformer(const CMat& h_hat_matrix, double rho_d, const ChannelStatistics& stats,
                      bool* fell_back) {
  if (fell_back) *fell_back = false;
  if (h_hat_matrix.norm() < 1e-300) {
    if (fell_back) *fell_back = true;
    return std::sqrt(rho_d) * stats.tx_eigvecs.col(0);
  }
  // The receiver sees H s^*, so the optimal beam is the conjugate of the
  // dominant right singular vector of the predicted matrix.
  if (h_hat_matrix.rows() == 1) {
    const CVec h = h_hat_matrix.row(0).transpose();
    return std::sqrt(rho_d) / h.norm() * h;  // coincides with MRT
  }
  Eigen::JacobiSVD<CMat> svd(h_hat_matrix, Eigen::ComputeThinV);
  return std::sqrt(rho_d) * svd.matrixV().col(0).conjugate();
}

namespace {

// Effective receive-side channel g = (s ⊗ I)^H h_hat = mat(h_hat) conj(s).
CVec effective_gain(const CVec& beam, const CVec& h_hat, int n_rx) {
  Eigen::Map<const CMat> hm(h_hat.data(), n_rx, beam.size());
  return hm * beam.conjugate();
}

// snr = ||g||^2 / (g^H M g / ||g||^2 + sigma^2), the receive-combined form;
// quad_norm is the already-normalized middle term.
double snr_from_parts(const CVec& g, double quad_norm, double noise_var) {
  const double g2 = g.squaredNorm();
  if (g2 <= 0.0) return 0.0;
  return g2 / (quad_norm + noise_var);
}

}  // namespace

double received_snr_full(const CVec& beam, const CVec& h_hat, const CMat& cov,
                         double noise_var) {
  const int n_rx = static_cast<int>(cov.rows() / beam.size());
  const CVec g = effective_gain(beam, h_hat, n_rx);
  if (n_rx == 1) {
    const double sps = beam.dot(cov * beam).real();
    return snr_from_parts(g, sps, noise_var);
  }
  const double g2 = g.squaredNorm();
  if (g2 <= 0.0) return 0.0;
  const CMat s_mat = kron(beam, CMat::Identity(n_rx, n_rx));
  const CMat m = s_mat.adjoint() * (cov * s_mat);
  return snr_from_parts(g, g.dot(m * g).real() / g2, noise_var);
}

double received_snr_eigen(const CVec& beam, const CVec& h_hat, const RVec& lambda,
                          const ChannelStatistics& stats, double noise_var) {
  const int nr = stats.n_rx;
  const CVec g = effective_gain(beam, h_hat, nr);
  const CVec c = stats.tx_eigvecs.adjoint() * beam;
  // d_j = sum_i |c_i|^2 lambda_ij gives S^H P S = V diag(d) V^H.
  RVec d = RVec::Zero(nr);
  for (int i = 0; i < stats.n_tx; ++i) {
    const double ci2 = std::norm(c(i));
    for (int j = 0; j < nr; ++j) d(j) += ci2 * lambda(i * nr + j);
  }
  const double g2 = g.squaredNorm();
  if (g2 <= 0.0) return 0.0;
  const CVec w = stats.rx_eigvecs.adjoint() * g;
  double quad = 0.0;
  for (int j = 0; j < nr; ++j) quad += d(j) * std::norm(w(j));
  return snr_from_parts(g, quad / g2, noise_var);
}

CVec transmit_data(const CVec& h, const CVec& beam, cplx d, double noise_var, int n_rx,
                   RngStream& rng) {
  CVec w(n_rx);
  rng.fill_cgaussian(w);
  Eigen::Map<const CMat> h_mat(h.data(), n_rx, beam.size());
  return h_mat * beam.conjugate() * d + std::sqrt(noise_var) * w;
}

}  // namespace pilotkalman
