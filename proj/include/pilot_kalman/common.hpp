// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace pilotkalman {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Kronecker product, dense. Small matrices only.
CMat kron(const CMat& a, const CMat& b);

/// (U ⊗ V) x without forming the product: vec(V · mat(x) · Uᵀ),
/// where mat(x) is the rows(V) × rows(U) column-major reshape of x.
CVec kron_apply(const CMat& u, const CMat& v, const CVec& x);

/// (U ⊗ V)ᴴ x.
CVec kron_apply_adjoint(const CMat& u, const CMat& v, const CVec& x);

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CVec kron_apply(const CMat& u, const CMat& v, const CVec& x) {
  const Eigen::Index nr = v.rows(), nt = u.rows();
  Eigen::Map<const CMat> xm(x.data(), nr, nt);
  CMat ym = v * xm * u.transpose();
  return Eigen::Map<const CVec>(ym.data(), nr * nt);
}

inline CVec kron_apply_adjoint(const CMat& u, const CMat& v, const CVec& x) {
  const Eigen::Index nr = v.rows(), nt = u.rows();
  Eigen::Map<const CMat> xm(x.data(), nr, nt);
  CMat ym = v.adjoint() * xm * u.conjugate();
  return Eigen::Map<const CVec>(ym.data(), nr * nt);
}

}  // namespace pilotkalman
