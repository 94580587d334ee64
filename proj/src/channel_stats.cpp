// SPDX-License-Identifier: Apache-2.0
#include "pilot_kalman/channel_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pilotkalman {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton
// iteration on the Legendre recurrence.
struct GaussLegendre16 {
  std::array<double, 16> x{}, w{};
  GaussLegendre16() {
    const int n = 16;
    for (int i = 0; i < n / 2; ++i) {
      double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double p0 = 0, p1 = 0;
      for (int it = 0; it < 100; ++it) {
        p0 = 1.0;
        p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
        }
        const double dp = n * (t * p0 - p1) / (t * t - 1.0);
        const double dt = p0 / dp;
        t -= dt;
        if (std::abs(dt) < 1e-15) break;
      }
      p0 = 1.0;
      p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
      }
      const double dp = n * (t * p0 - p1) / (t * t - 1.0);
      x[i] = -t;
      x[n - 1 - i] = t;
      w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
  }
};

const GaussLegendre16& gl16() {
  static const GaussLegendre16 g;
  return g;
}

// Integrates exp(-i 2 pi D m sin(theta + u)) for u over [-delta, delta] with
// `panels` composite GL16 panels. Centering on theta keeps the interval width
// exact even for vanishing spreads.
cplx one_ring_integral(double d_times_m, double theta, double delta, int panels) {
  const auto& g = gl16();
  cplx acc(0.0, 0.0);
  const double step = 2.0 * delta / panels;
  for (int p = 0; p < panels; ++p) {
    const double u0 = -delta + p * step;
    const double mid = u0 + 0.5 * step, half = 0.5 * step;
    for (int q = 0; q < 16; ++q) {
      const double phase = -2.0 * kPi * d_times_m * std::sin(theta + mid + half * g.x[q]);
      acc += g.w[q] * half * cplx(std::cos(phase), std::sin(phase));
    }
  }
  return acc;
}

}  // namespace

void SpatialCovariance::validate() const {
  const Eigen::Index n = entries.rows();
  if (entries.cols() != n || n < 1) throw std::invalid_argument("covariance: not square");
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("covariance: not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(entries, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (lo < -1e-10 * std::max(hi, 0.0)) throw std::invalid_argument("covariance: not PSD");
}

double UpaGeometry::delta_v() const {
  return 0.5 * (std::atan((distance_m + ring_radius_m) / elevation_m) -
                std::atan((distance_m - ring_radius_m) / elevation_m));
}

double UpaGeometry::theta_v() const {
  return 0.5 * (std::atan((distance_m + ring_radius_m) / elevation_m) +
                std::atan((distance_m - ring_radius_m) / elevation_m));
}

double UpaGeometry::delta_h() const { return std::atan(ring_radius_m / distance_m); }

double UpaGeometry::path_loss() const {
  return 1.0 / (1.0 + std::pow(distance_m / reference_distance_m, path_loss_exponent));
}

SpatialCovariance exp_covariance(int n, double r) {
  if (n < 1) throw std::invalid_argument("exp_covariance: n must be >= 1");
  if (r < 0.0 || r >= 1.0)
    throw std::invalid_argument("exp_covariance: correlation must be in [0, 1)");
  CMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = std::pow(r, 2 * std::abs(i - j));
  return {m};
}

SpatialCovariance one_ring_covariance(const OneRingGeometry& g) {
  if (g.n < 1) throw std::invalid_argument("one_ring_covariance: n must be >= 1");
  if (g.angle_spread <= 0.0) throw std::invalid_argument("one_ring_covariance: angle_spread <= 0");
  if (g.spacing <= 0.0) throw std::invalid_argument("one_ring_covariance: spacing <= 0");

  const double norm = 1.0 / (2.0 * g.angle_spread);
  // First Toeplitz column via adaptive panel doubling. Entries are bounded by
  // the unit diagonal, so the tolerance is taken against scale 1.
  std::vector<cplx> col(g.n);
  for (int m = 0; m < g.n; ++m) {
    int panels = 4;
    cplx prev = norm * one_ring_integral(g.spacing * m, g.aoa, g.angle_spread, panels);
    bool converged = false;
    for (int level = 0; level < 14; ++level) {
      panels *= 2;
      const cplx cur = norm * one_ring_integral(g.spacing * m, g.aoa, g.angle_spread, panels);
      if (std::abs(cur - prev) <= 1e-10 * std::max(1.0, std::abs(cur))) {
        prev = cur;
        converged = true;
        break;
      }
      prev = cur;
    }
    if (!converged) throw std::runtime_error("one_ring_covariance: quadrature did not converge");
    col[m] = prev;
  }
  CMat m(g.n, g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) m(i, j) = (i >= j) ? col[i - j] : std::conj(col[j - i]);
  return {m};
}

void hermitian_eig_descending(const CMat& m, CMat& vecs, RVec& vals) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition did not converge");
  const Eigen::Index n = m.rows();
  // SelfAdjointEigenSolver returns ascending order; reverse for descending.
  // A stable sort on (value desc, index asc) keeps ties deterministic.
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return es.eigenvalues()(a) > es.eigenvalues()(b);
  });
  vecs.resize(n, n);
  vals.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    vals(k) = std::max(0.0, es.eigenvalues()(idx[k]));
    vecs.col(k) = es.eigenvectors().col(idx[k]);
  }
}

ChannelStatistics kron_stats(const SpatialCovariance& tx, const SpatialCovariance& rx) {
  ChannelStatistics s;
  s.tx_cov = tx.entries;
  s.rx_cov = rx.entries;
  s.n_tx = tx.dim();
  s.n_rx = rx.dim();
  hermitian_eig_descending(tx.entries, s.tx_eigvecs, s.tx_eigvals);
  hermitian_eig_descending(rx.entries, s.rx_eigvecs, s.rx_eigvals);
  s.eig_stacked.resize(s.n_tx * s.n_rx);
  for (int i = 0; i < s.n_tx; ++i)
    for (int j = 0; j < s.n_rx; ++j)
      s.eig_stacked(i * s.n_rx + j) = s.tx_eigvals(i) * s.rx_eigvals(j);
  return s;
}

ChannelStatistics upa_covariance(const UpaGeometry& g, bool apply_path_loss) {
  if (g.n_vertical < 1 || g.n_horizontal < 1)
    throw std::invalid_argument("upa_covariance: array dimensions must be positive");
  if (g.elevation_m <= 0 || g.ring_radius_m <= 0 || g.distance_m <= 0 ||
      g.reference_distance_m <= 0)
    throw std::invalid_argument("upa_covariance: lengths must be positive");

  const SpatialCovariance rv =
      one_ring_covariance({g.theta_v(), g.delta_v(), g.spacing, g.n_vertical});
  const SpatialCovariance rh =
      one_ring_covariance({g.horizontal_aoa, g.delta_h(), g.spacing, g.n_horizontal});
  SpatialCovariance rt{kron(rh.entries, rv.entries)};
  SpatialCovariance rr{CMat::Identity(1, 1)};
  ChannelStatistics s = kron_stats(rt, rr);
  if (apply_path_loss) {
    const double pl = g.path_loss();
    s.tx_cov *= pl;
    s.tx_eigvals *= pl;
    s.eig_stacked *= pl;
  }
  return s;
}

CVec dft_column(int n, int k) {
  CVec f(n);
  for (int m = 0; m < n; ++m) {
    const double phase = -2.0 * kPi * m * k / n;
    f(m) = cplx(std::cos(phase), std::sin(phase)) / std::sqrt(static_cast<double>(n));
  }
  return f;
}

std::vector<int> dft_support_bins(int n, double aoa, double angle_spread, double spacing) {
  std::vector<int> bins;
  for (int k = -n / 2; k < (n + 1) / 2; ++k) {
    const double u = k / (n * spacing);  // sin of the bin's steering angle
    if (std::abs(u) > 1.0) continue;
    const double theta = std::asin(u);
    if (theta > aoa - angle_spread && theta < aoa + angle_spread) bins.push_back(k);
  }
  return bins;
}

ChannelStatistics dft_tdt_approx(int n, double aoa, double angle_spread, double spacing,
                                 const RVec& power_profile) {
  const std::vector<int> support = dft_support_bins(n, aoa, angle_spread, spacing);
  if (support.empty()) throw std::invalid_argument("dft_tdt_approx: empty angular support");
  if (power_profile.size() != static_cast<Eigen::Index>(support.size()))
    throw std::invalid_argument("dft_tdt_approx: profile length != in-support bin count");
  if (power_profile.minCoeff() < 0.0)
    throw std::invalid_argument("dft_tdt_approx: profile must be nonnegative");
  if (std::abs(power_profile.sum() - n) > 1e-6 * n)
    throw std::invalid_argument("dft_tdt_approx: profile must sum to the antenna count");
  const RVec profile = power_profile * (n / power_profile.sum());

  // Full DFT basis with the profile on support bins, zero elsewhere; then the
  // columns are permuted so eigenvalues come out descending.
  std::vector<int> all_bins;
  for (int k = -n / 2; k < (n + 1) / 2; ++k) all_bins.push_back(k);
  RVec vals = RVec::Zero(n);
  for (std::size_t si = 0; si < support.size(); ++si) {
    const auto it = std::find(all_bins.begin(), all_bins.end(), support[si]);
    vals(static_cast<Eigen::Index>(it - all_bins.begin())) = profile(si);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return vals(a) > vals(b); });

  ChannelStatistics s;
  s.n_tx = n;
  s.n_rx = 1;
  s.tx_eigvecs.resize(n, n);
  s.tx_eigvals.resize(n);
  for (int c = 0; c < n; ++c) {
    s.tx_eigvecs.col(c) = dft_column(n, all_bins[order[c]]);
    s.tx_eigvals(c) = vals(order[c]);
  }
  s.rx_eigvecs = CMat::Identity(1, 1);
  s.rx_eigvals = RVec::Ones(1);
  s.rx_cov = CMat::Identity(1, 1);
  s.eig_stacked = s.tx_eigvals;
  s.tx_cov = s.tx_eigvecs * s.tx_eigvals.asDiagonal() * s.tx_eigvecs.adjoint();
  return s;
}

ChannelStatistics dft_tdt_approx(int n, double aoa, double angle_spread, double spacing) {
  const SpatialCovariance exact =
      one_ring_covariance({aoa, angle_spread, spacing, n});
  const std::vector<int> support = dft_support_bins(n, aoa, angle_spread, spacing);
  if (support.empty()) throw std::invalid_argument("dft_tdt_approx: empty angular support");
  RVec profile(static_cast<Eigen::Index>(support.size()));
  for (std::size_t si = 0; si < support.size(); ++si) {
    const CVec f = dft_column(n, support[si]);
    profile(static_cast<Eigen::Index>(si)) = f.dot(exact.entries * f).real();
  }
  profile *= n / profile.sum();
  return dft_tdt_approx(n, aoa, angle_spread, spacing, profile);
}

double doppler_coefficient(double v_mps, double carrier_hz, double symbol_s) {
  if (v_mps < 0.0) throw std::invalid_argument("doppler_coefficient: velocity must be >= 0");
  constexpr double kC = 299792458.0;
  const double f_d = v_mps * carrier_hz / kC;
  const double a = std::cyl_bessel_j(0.0, 2.0 * kPi * f_d * symbol_s);
  return std::min(1.0, std::max(1e-12, a));
}

}  // namespace pilotkalman
