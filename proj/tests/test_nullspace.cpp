#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include <Eigen/SVD>

#include "gfev/graph.hpp"
#include "gfev/nullspace.hpp"
#include "gfev/shift.hpp"
#include "gfev/spectral.hpp"

using namespace gfev;

namespace {

ShiftOperator<double> weighted_shift(const Graph& g, std::uint64_t seed) {
  // random edge weights keep the spectrum simple (distinct eigenvalues)
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.5, 2.0);
  MatX<double> w = MatX<double>::Zero(g.n, g.n);
  for (const auto& e : g.edges) {
    double v = unif(rng);
    w(e.i, e.j) = v;
    w(e.j, e.i) = v;
  }
  return {w, ShiftKind::custom};
}

// Dimension of { M : M S = S M, M zero outside supp(S+I) } by direct SVD of
// the stacked linear constraints on vec(M).
int brute_force_dim(const MatX<double>& s, const SupportPattern& supp) {
  const int n = static_cast<int>(s.rows());
  const int nv = n * n;
  // commutation: S M - M S = 0 -> (I kron S - S^T kron I) vec(M) = 0
  MatX<double> comm = MatX<double>::Zero(nv, nv);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        comm(a + n * b, a + n * c) += s(c, b);   // -(M S) part
        comm(a + n * b, c + n * b) -= s(a, c);   // (S M) part, sign flipped
      }
  std::vector<int> zero_rows;
  for (const auto& [i, j] : supp.zero_indices) zero_rows.push_back(i + n * j);
  MatX<double> sys(nv + zero_rows.size(), nv);
  sys.topRows(nv) = comm;
  sys.bottomRows(zero_rows.size()).setZero();
  for (size_t r = 0; r < zero_rows.size(); ++r)
    sys(nv + r, zero_rows[r]) = 1.0;
  Eigen::JacobiSVD<MatX<double>> svd(sys);
  double tol = 1e-9 * svd.singularValues()(0);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++rank;
  return nv - rank;
}

}  // namespace

TEST_CASE("constraint matrix shape and all-ones nullvector") {
  auto shift = weighted_shift(random_community_graph(12, 2, 0.7, 0.1, 3), 3);
  auto dec = eigendecompose(shift);
  SupportPattern supp = support_pattern(shift);
  MatX<double> t = constraint_matrix(dec, supp);
  CHECK(t.rows() == static_cast<Eigen::Index>(supp.zero_indices.size()));
  CHECK(t.cols() == 12);
  // omega = 1 gives A = I, supported everywhere
  CHECK((t * VecX<double>::Ones(12)).cwiseAbs().maxCoeff() < 1e-10);
  // omega = lambda gives A = S, also supported
  CHECK((t * dec.eigvals).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("basis is orthonormal, d >= 1, identity and shift in span") {
  auto shift = weighted_shift(random_community_graph(14, 2, 0.6, 0.1, 5), 5);
  auto dec = eigendecompose(shift);
  NullspaceBasis<double> b = nullspace_basis(dec, support_pattern(shift));
  REQUIRE(b.dim >= 1);
  MatX<double> gram = b.basis.transpose() * b.basis;
  CHECK((gram - MatX<double>::Identity(b.dim, b.dim)).cwiseAbs().maxCoeff() <
        1e-10);
  // projection residual of the all-ones vector onto the span
  VecX<double> ones = VecX<double>::Ones(14);
  CHECK((ones - b.basis * (b.basis.transpose() * ones)).norm() < 1e-8);
  VecX<double> lam = dec.eigvals;
  CHECK((lam - b.basis * (b.basis.transpose() * lam)).norm() <
        1e-8 * lam.norm());
}

TEST_CASE("synthesized operators are supported and commute with S") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    auto shift =
        weighted_shift(random_community_graph(16, 2, 0.6, 0.1, seed), seed);
    auto dec = eigendecompose(shift);
    SupportPattern supp = support_pattern(shift);
    NullspaceBasis<double> b = nullspace_basis(dec, supp);
    for (int trial = 0; trial < 5; ++trial) {
      VecX<double> alpha(b.dim);
      for (int i = 0; i < b.dim; ++i) alpha(i) = gauss(rng);
      MatX<double> a = synthesize(dec, b, alpha);
      double scale = a.cwiseAbs().maxCoeff();
      double leak = 0.0;
      for (const auto& [i, j] : supp.zero_indices)
        leak = std::max(leak, std::abs(a(i, j)));
      CHECK(leak < 1e-8 * std::max(scale, 1.0));
      double comm = (a * shift.matrix - shift.matrix * a).cwiseAbs().maxCoeff();
      CHECK(comm < 1e-8 * std::max(scale * spectral_norm(shift.matrix), 1.0));
    }
  }
}

TEST_CASE("small-instance completeness against brute force") {
  for (auto make : {+[] { return path_graph(4); }, +[] { return ring_graph(5); },
                    +[] { return star_graph(5); }, +[] { return path_graph(5); },
                    +[] { return complete_graph(4); }}) {
    Graph g = make();
    auto shift = weighted_shift(g, 17 + g.n + g.edge_count());
    auto dec = eigendecompose(shift);
    // need simple spectrum so commuting == polynomial in S
    bool distinct = true;
    for (int i = 1; i < dec.n(); ++i)
      if (std::abs(dec.eigvals(i) - dec.eigvals(i - 1)) < 1e-8)
        distinct = false;
    if (!distinct) continue;
    SupportPattern supp = support_pattern(shift);
    NullspaceBasis<double> b = nullspace_basis(dec, supp);
    CHECK(b.dim == brute_force_dim(shift.matrix, supp));
  }
}

TEST_CASE("empty zero pattern gives the full space") {
  auto shift = weighted_shift(complete_graph(5), 23);
  auto dec = eigendecompose(shift);
  SupportPattern supp = support_pattern(shift);
  CHECK(supp.zero_indices.empty());
  NullspaceBasis<double> b = nullspace_basis(dec, supp);
  CHECK(b.dim == 5);
}
