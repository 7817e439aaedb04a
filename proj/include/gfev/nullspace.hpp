#pragma once

#include <Eigen/SVD>

#include "gfev/common.hpp"
#include "gfev/shift.hpp"
#include "gfev/spectral.hpp"

namespace gfev {

/// Orthonormal basis for the eigenvalue vectors omega such that
/// U diag(omega) U^{-1} vanishes on the zero pattern of S + I.
template <class Scalar>
struct NullspaceBasis {
  MatX<Scalar> basis;                   // n x d, orthonormal columns
  int dim = 0;                          // d
  VecX<double> singular_values;        // full spectrum of the constraint matrix
  double tolerance = 0.0;               // relative rank cutoff used

  int n() const { return static_cast<int>(basis.rows()); }
};

/// Row r of T, for zero-index (i, j), is the elementwise product of row j of
/// U^{-T} and row i of U: T[r, m] = U^{-1}[m, j] * U[i, m]. This is the
/// zero-pattern row selection of the Khatri-Rao product U^{-T} * U.
template <class Scalar>
MatX<Scalar> constraint_matrix(const SpectralDecomposition<Scalar>& dec,
                               const SupportPattern& supp) {
  if (supp.n != dec.n())
    fail(ErrorCode::dimension_mismatch, "support/decomposition size mismatch");
  const int n = dec.n();
  MatX<Scalar> t(static_cast<Eigen::Index>(supp.zero_indices.size()), n);
  for (size_t r = 0; r < supp.zero_indices.size(); ++r) {
    auto [i, j] = supp.zero_indices[r];
    for (int m = 0; m < n; ++m)
      t(static_cast<Eigen::Index>(r), m) = dec.inv_eigvecs(m, j) * dec.eigvecs(i, m);
  }
  return t;
}

/// Kernel via full SVD; d counts singular values <= rank_tol * sigma_max.
/// d >= 1 always: the all-ones vector (A = I) is support-feasible.
template <class Scalar>
NullspaceBasis<Scalar> nullspace_basis(const MatX<Scalar>& t,
                                       double rank_tol = 1e-9) {
  const int n = static_cast<int>(t.cols());
  if (n == 0) fail(ErrorCode::invalid_argument, "constraint matrix has no columns");
  NullspaceBasis<Scalar> b;
  b.tolerance = rank_tol;
  if (t.rows() == 0) {
    b.basis = MatX<Scalar>::Identity(n, n);
    b.dim = n;
    b.singular_values = VecX<double>::Zero(0);
    return b;
  }
  Eigen::JacobiSVD<MatX<Scalar>> svd(t, Eigen::ComputeFullV);
  VecX<double> sv = svd.singularValues();
  double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > rank_tol * smax) ++rank;
  b.dim = n - rank;
  b.basis = svd.matrixV().rightCols(b.dim);
  b.singular_values = sv;
  return b;
}

template <class Scalar>
NullspaceBasis<Scalar> nullspace_basis(const SpectralDecomposition<Scalar>& dec,
                                       const SupportPattern& supp,
                                       double rank_tol = 1e-9) {
  return nullspace_basis(constraint_matrix(dec, supp), rank_tol);
}

/// A = U diag(B alpha) U^{-1}; commutes with S and vanishes on the zero
/// pattern the basis was built from.
template <class Scalar>
MatX<Scalar> synthesize(const SpectralDecomposition<Scalar>& dec,
                        const NullspaceBasis<Scalar>& b,
                        const VecX<Scalar>& alpha) {
  if (alpha.size() != b.dim)
    fail(ErrorCode::dimension_mismatch, "coefficient length != basis dim");
  if (b.n() != dec.n())
    fail(ErrorCode::dimension_mismatch, "basis/decomposition size mismatch");
  VecX<Scalar> omega = b.basis * alpha;
  return dec.eigvecs * omega.asDiagonal() * dec.inv_eigvecs;
}

}  // namespace gfev
