// SPDX-License-Identifier: Apache-2.0
#include "pilot_kalman/kalman.hpp"

#include <cmath>

namespace pilotkalman {

KalmanFull init_kalman_full(const ChannelStatistics& stats) {
  KalmanFull st;
  st.h_hat = CVec::Zero(stats.dim());
  st.cov = kron(stats.tx_cov, stats.rx_cov);
  st.k = 1;
  return st;
}

KalmanEigen init_kalman_eigen(const ChannelStatistics& stats) {
  KalmanEigen st;
  st.h_hat = CVec::Zero(stats.dim());
  st.lambda = stats.eig_stacked;
  st.k = 1;
  return st;
}

void predict(KalmanFull& st, double a, const ChannelStatistics& stats, int m) {
  if (m < 1) throw std::invalid_argument("predict: m must be >= 1");
  const double am = std::pow(a, m);
  const double a2m = am * am;
  st.h_hat *= am;
  st.cov = a2m * st.cov + (1.0 - a2m) * kron(stats.tx_cov, stats.rx_cov);
  st.k += m;
  st.filtered = false;
}

void predict(KalmanEigen& st, double a, const ChannelStatistics& stats, int m) {
  if (m < 1) throw std::invalid_argument("predict: m must be >= 1");
  const double am = std::pow(a, m);
  const double a2m = am * am;
  st.h_hat *= am;
  st.lambda = a2m * st.lambda + (1.0 - a2m) * stats.eig_stacked;
  st.k += m;
  st.filtered = false;
}

CMat covariance_update(KalmanFull& st, const CVec& beam, double noise_var) {
  const Eigen::Index n_tx = beam.size();
  const Eigen::Index n_rx = st.cov.rows() / n_tx;
  if (st.cov.rows() != n_tx * n_rx) throw std::invalid_argument("covariance_update: dims");

  const CMat s_mat = kron(beam, CMat::Identity(n_rx, n_rx));
  const CMat ps = st.cov * s_mat;                                    // N x n_rx
  CMat innov_cov = s_mat.adjoint() * ps;                             // n_rx x n_rx
  innov_cov += noise_var * CMat::Identity(n_rx, n_rx);
  Eigen::LDLT<CMat> ldlt(innov_cov);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw std::runtime_error("measurement_update: singular innovation covariance");
  const CMat gain = ldlt.solve(ps.adjoint()).adjoint();              // N x n_rx
  st.cov -= gain * ps.adjoint();
  st.cov = 0.5 * (st.cov + st.cov.adjoint()).eval();
  st.filtered = true;
  return gain;
}

void measurement_update(KalmanFull& st, const PilotObservation& obs) {
  if (obs.beam.squaredNorm() <= 0.0) throw std::invalid_argument("measurement_update: zero beam");
  const Eigen::Index n_rx = obs.y.size();
  Eigen::Map<const CMat> h_mat(st.h_hat.data(), n_rx, obs.beam.size());
  const CVec innovation = obs.y - h_mat * obs.beam.conjugate();
  const CMat gain = covariance_update(st, obs.beam, obs.noise_var);
  st.h_hat += gain * innovation;
}

void eigen_update(KalmanEigen& st, const ChannelStatistics& stats, int beam_index,
                  double rho, double noise_var, const CVec* y) {
  if (beam_index < 0 || beam_index >= stats.n_tx)
    throw std::invalid_argument("eigen_update: beam index out of range");
  if (noise_var <= 0.0) throw std::invalid_argument("eigen_update: noise_var must be > 0");
  const int nr = stats.n_rx;
  auto block = st.lambda.segment(beam_index * nr, nr);

  if (y != nullptr) {
    // Structured gain K = sqrt(rho) u_i ⊗ (V diag(lambda/(rho lambda + s2)) V^H).
    const CVec u = stats.tx_eigvecs.col(beam_index);
    const double srho = std::sqrt(rho);
    Eigen::Map<const CMat> h_mat(st.h_hat.data(), nr, stats.n_tx);
    const CVec innovation = *y - srho * (h_mat * u.conjugate());
    const RVec gain_diag =
        (block.array() / (rho * block.array() + noise_var)).matrix() * srho;
    const CVec corr = stats.rx_eigvecs *
                      (gain_diag.asDiagonal() * (stats.rx_eigvecs.adjoint() * innovation));
    Eigen::Map<CMat> h_mut(st.h_hat.data(), nr, stats.n_tx);
    h_mut += corr * u.transpose();
  }
  block = (noise_var * block.array() / (rho * block.array() + noise_var)).matrix();
  st.filtered = true;
}

CMat block_covariance_update(KalmanFull& st, const CMat& pilots, double noise_var) {
  const Eigen::Index mp = pilots.cols();
  if (st.cov.rows() != pilots.rows())
    throw std::invalid_argument("block_update: MISO block fading expects n_rx = 1");
  const CMat gram = pilots.adjoint() * pilots;
  const double rho_p = gram.real().trace() / static_cast<double>(mp);
  if ((gram - rho_p * CMat::Identity(mp, mp)).norm() > 1e-8 * rho_p)
    throw std::invalid_argument("block_update: pilot columns must be orthogonal with equal power");

  const CMat ps = st.cov * pilots;
  CMat innov_cov = pilots.adjoint() * ps;
  innov_cov += noise_var * CMat::Identity(mp, mp);
  Eigen::LDLT<CMat> ldlt(innov_cov);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw std::runtime_error("block_update: singular innovation covariance");
  const CMat gain = ldlt.solve(ps.adjoint()).adjoint();
  st.cov -= gain * ps.adjoint();
  st.cov = 0.5 * (st.cov + st.cov.adjoint()).eval();
  st.filtered = true;
  return gain;
}

void block_update(KalmanFull& st, const CMat& pilots, const CVec& y, double noise_var) {
  if (y.size() != pilots.cols()) throw std::invalid_argument("block_update: y size != pilot count");
  const CVec innovation = y - pilots.adjoint() * st.h_hat;
  const CMat gain = block_covariance_update(st, pilots, noise_var);
  st.h_hat += gain * innovation;
}

CMat eigen_gain_dense(const ChannelStatistics& stats, const RVec& lambda, int beam_index,
                      double rho, double noise_var, const CVec& beam) {
  const int nr = stats.n_rx;
  const auto block = lambda.segment(beam_index * nr, nr);
  const RVec diag = (block.array() / (rho * block.array() + noise_var)).matrix();
  const CMat g = stats.rx_eigvecs * diag.asDiagonal() * stats.rx_eigvecs.adjoint();
  return kron(beam, g);
}

double nmse(const KalmanFull& st, const ChannelStatistics& stats) { return st.nmse(stats); }
double nmse(const KalmanEigen& st, const ChannelStatistics& stats) { return st.nmse(stats); }

CMat eigen_cov_dense(const KalmanEigen& st, const ChannelStatistics& stats) {
  const CMat uv = kron(stats.tx_eigvecs, stats.rx_eigvecs);
  return uv * st.lambda.cast<cplx>().asDiagonal() * uv.adjoint();
}

}  // namespace pilotkalman
