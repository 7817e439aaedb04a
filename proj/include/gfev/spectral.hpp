#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gfev/common.hpp"
#include "gfev/shift.hpp"

namespace gfev {

/// Eigendecomposition S = U diag(lambda) U^{-1} with eigenvalues in a fixed
/// canonical order: ascending real part, ties broken by imaginary part.
template <class Scalar>
struct SpectralDecomposition {
  MatX<Scalar> eigvecs;      // U
  VecX<Scalar> eigvals;      // lambda
  MatX<Scalar> inv_eigvecs;  // U^{-1}

  int n() const { return static_cast<int>(eigvecs.rows()); }

  MatX<Scalar> reconstruct() const {
    return eigvecs * eigvals.asDiagonal() * inv_eigvecs;
  }
};

namespace detail {

template <class Scalar>
void canonical_sort(MatX<Scalar>& u, VecX<Scalar>& lam) {
  const int n = static_cast<int>(lam.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    double ra = real_part(lam(a)), rb = real_part(lam(b));
    if (ra != rb) return ra < rb;
    return imag_part(lam(a)) < imag_part(lam(b));
  });
  MatX<Scalar> us(u.rows(), u.cols());
  VecX<Scalar> ls(n);
  for (int k = 0; k < n; ++k) {
    us.col(k) = u.col(order[k]);
    ls(k) = lam(order[k]);
  }
  u = std::move(us);
  lam = std::move(ls);
}

template <class Scalar>
void check_reconstruction(const SpectralDecomposition<Scalar>& d,
                          const MatX<Scalar>& s) {
  double smax = s.cwiseAbs().maxCoeff();
  double resid = (d.reconstruct() - s).cwiseAbs().maxCoeff();
  if (resid > 1e-6 * std::max(smax, 1.0))
    fail(ErrorCode::defective_operator,
         "shift operator is numerically defective (reconstruction residual "
         "too large)");
}

}  // namespace detail

inline SpectralDecomposition<double> eigendecompose(
    const ShiftOperator<double>& s) {
  const MatX<double>& m = s.matrix;
  if (m.rows() != m.cols())
    fail(ErrorCode::dimension_mismatch, "shift operator must be square");
  SpectralDecomposition<double> d;
  if (m.isApprox(m.transpose(), 1e-12)) {
    Eigen::SelfAdjointEigenSolver<MatX<double>> es(m);
    d.eigvecs = es.eigenvectors();
    d.eigvals = es.eigenvalues();  // already ascending
    d.inv_eigvecs = d.eigvecs.transpose();
  } else {
    Eigen::EigenSolver<MatX<double>> es(m);
    if (es.info() != Eigen::Success)
      fail(ErrorCode::defective_operator, "eigensolver failed");
    double imag_mag = es.eigenvalues().imag().cwiseAbs().maxCoeff();
    if (imag_mag > 1e-10 * std::max(m.cwiseAbs().maxCoeff(), 1.0))
      fail(ErrorCode::unsupported_kind,
           "shift has complex eigenvalues; use the complex field");
    MatX<double> u = es.eigenvectors().real();
    VecX<double> lam = es.eigenvalues().real();
    detail::canonical_sort(u, lam);
    Eigen::FullPivLU<MatX<double>> lu(u);
    if (!lu.isInvertible())
      fail(ErrorCode::defective_operator, "eigenvector matrix is singular");
    d.eigvecs = u;
    d.eigvals = lam;
    d.inv_eigvecs = lu.inverse();
  }
  detail::check_reconstruction(d, m);
  return d;
}

inline SpectralDecomposition<Cplx> eigendecompose(
    const ShiftOperator<Cplx>& s) {
  const MatX<Cplx>& m = s.matrix;
  if (m.rows() != m.cols())
    fail(ErrorCode::dimension_mismatch, "shift operator must be square");
  SpectralDecomposition<Cplx> d;
  if (m.isApprox(m.adjoint(), 1e-12)) {
    Eigen::SelfAdjointEigenSolver<MatX<Cplx>> es(m);
    d.eigvecs = es.eigenvectors();
    d.eigvals = es.eigenvalues().cast<Cplx>();
    d.inv_eigvecs = d.eigvecs.adjoint();
  } else {
    Eigen::ComplexEigenSolver<MatX<Cplx>> es(m);
    if (es.info() != Eigen::Success)
      fail(ErrorCode::defective_operator, "eigensolver failed");
    MatX<Cplx> u = es.eigenvectors();
    VecX<Cplx> lam = es.eigenvalues();
    detail::canonical_sort(u, lam);
    Eigen::FullPivLU<MatX<Cplx>> lu(u);
    if (!lu.isInvertible())
      fail(ErrorCode::defective_operator, "eigenvector matrix is singular");
    d.eigvecs = u;
    d.eigvals = lam;
    d.inv_eigvecs = lu.inverse();
  }
  detail::check_reconstruction(d, m);
  return d;
}

template <class Scalar>
VecX<Scalar> gft(const SpectralDecomposition<Scalar>& d, const VecX<Scalar>& x) {
  if (x.size() != d.n())
    fail(ErrorCode::dimension_mismatch, "signal length != decomposition size");
  return d.inv_eigvecs * x;
}

template <class Scalar>
VecX<Scalar> igft(const SpectralDecomposition<Scalar>& d,
                  const VecX<Scalar>& xhat) {
  if (xhat.size() != d.n())
    fail(ErrorCode::dimension_mismatch, "signal length != decomposition size");
  return d.eigvecs * xhat;
}

}  // namespace gfev
