#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "gfev/common.hpp"
#include "gfev/graph.hpp"

namespace gfev {

enum class ShiftKind { adjacency, laplacian, normalized_laplacian, custom };

template <class Scalar>
struct ShiftOperator {
  MatX<Scalar> matrix;
  ShiftKind kind = ShiftKind::custom;

  int n() const { return static_cast<int>(matrix.rows()); }
};

inline ShiftOperator<double> build_shift(const Graph& g, ShiftKind kind) {
  g.validate();
  MatX<double> w = g.adjacency();
  switch (kind) {
    case ShiftKind::adjacency:
    case ShiftKind::custom:
      return {w, ShiftKind::adjacency};
    case ShiftKind::laplacian:
    case ShiftKind::normalized_laplacian: {
      if (g.directed)
        fail(ErrorCode::unsupported_kind,
             "laplacian shift requires an undirected graph");
      for (const auto& e : g.edges)
        if (e.w < 0.0)
          fail(ErrorCode::unsupported_kind,
               "laplacian shift requires nonnegative weights");
      VecX<double> deg = w.rowwise().sum();
      MatX<double> lap = MatX<double>(deg.asDiagonal()) - w;
      if (kind == ShiftKind::laplacian) return {lap, kind};
      // zero-degree rows stay identity rows
      VecX<double> dinv(deg.size());
      for (Eigen::Index i = 0; i < deg.size(); ++i)
        dinv(i) = deg(i) > 0.0 ? 1.0 / std::sqrt(deg(i)) : 1.0;
      MatX<double> norm = dinv.asDiagonal() * lap * dinv.asDiagonal();
      for (Eigen::Index i = 0; i < deg.size(); ++i)
        if (deg(i) == 0.0) norm(i, i) = 1.0;
      return {norm, kind};
    }
  }
  fail(ErrorCode::unsupported_kind, "unknown shift kind");
}

template <class Scalar>
ShiftOperator<Cplx> to_complex(const ShiftOperator<Scalar>& s) {
  if constexpr (is_complex_v<Scalar>) {
    return s;
  } else {
    return {s.matrix.template cast<Cplx>(), s.kind};
  }
}

/// Zero pattern of S + I and its complement, the allowed support of every
/// edge-weighting matrix. Diagonal entries are always allowed.
struct SupportPattern {
  int n = 0;
  std::vector<std::pair<int, int>> zero_indices;
  std::vector<std::pair<int, int>> allowed_indices;
  std::vector<char> allowed_mask;  // row-major n*n

  bool allowed(int i, int j) const { return allowed_mask[i * n + j] != 0; }
};

template <class Scalar>
SupportPattern support_pattern(const ShiftOperator<Scalar>& s) {
  const int n = s.n();
  SupportPattern p;
  p.n = n;
  p.allowed_mask.assign(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Scalar v = s.matrix(i, j);
      if (i == j) v += Scalar(1);
      if (i != j && v == Scalar(0)) {
        p.zero_indices.push_back({i, j});
      } else {
        p.allowed_indices.push_back({i, j});
        p.allowed_mask[static_cast<size_t>(i) * n + j] = 1;
      }
    }
  return p;
}

template <class Scalar>
double spectral_norm(const MatX<Scalar>& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatX<Scalar>> svd(m);
  return svd.singularValues()(0);
}

template <class Scalar>
ShiftOperator<Scalar> normalize_spectral(const ShiftOperator<Scalar>& s) {
  double norm = spectral_norm(s.matrix);
  if (norm == 0.0)
    fail(ErrorCode::degenerate_input, "cannot normalize zero shift operator");
  return {s.matrix / norm, s.kind};
}

}  // namespace gfev
