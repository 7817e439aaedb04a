#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "gfev/design.hpp"
#include "gfev/experiments.hpp"
#include "gfev/graph.hpp"
#include "gfev/nullspace.hpp"
#include "gfev/spectral.hpp"

using namespace gfev;

namespace {

std::mt19937_64 rng(99);
std::normal_distribution<double> gauss;

VecX<double> random_vec(int n) {
  VecX<double> v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

}  // namespace

TEST_CASE("classical LS interpolates when order >= #distinct eigenvalues - 1") {
  auto shift = build_shift(ring_graph(7), ShiftKind::laplacian);
  auto dec = eigendecompose(shift);
  // ring(7) Laplacian has 4 distinct eigenvalues -> order 3 interpolates
  VecX<double> h = target_exponential_kernel(dec.eigvals, 3.0, 0.75);
  ClassicalFir<double> f = design_classical_ls(dec.eigvals, h, 3);
  VecX<double> fitted = modal_response(f, dec.eigvals);
  CHECK((fitted - h).norm() < 1e-10);
}

TEST_CASE("classical LS stays stable at high order via basis rescaling") {
  auto shift = build_shift(random_community_graph(32, 4, 0.7, 0.05, 2),
                           ShiftKind::laplacian);
  auto dec = eigendecompose(shift);
  VecX<double> h = target_exponential_kernel(dec.eigvals, 3.0, 0.75);
  ClassicalFir<double> f = design_classical_ls(dec.eigvals, h, 12);
  double err = (modal_response(f, dec.eigvals) - h).norm() / h.norm();
  CHECK(err < 1e-3);  // raw Vandermonde in lambda would be garbage here
}

TEST_CASE("per-row CEV solve matches the stacked-system oracle") {
  auto shift = build_shift(random_community_graph(10, 2, 0.7, 0.1, 7),
                           ShiftKind::adjacency);
  SupportPattern supp = support_pattern(shift);
  MatX<double> target(10, 10);
  for (int i = 0; i < 10; ++i) target.row(i) = random_vec(10).transpose();

  auto [fit, report] = design_cev_ls(shift, target, 3);

  DesignSystem<double> sys = build_cev_system(shift, supp, target, 3);
  VecX<double> theta = detail::solve_lstsq(sys.regression_matrix, sys.rhs);
  double stacked_obj =
      (sys.regression_matrix * theta - sys.rhs).squaredNorm() /
      target.squaredNorm();
  CHECK(report.nse == doctest::Approx(stacked_obj).epsilon(1e-8));
}

TEST_CASE("NV and CEV designs dominate classical on a generic target") {
  auto shift = build_shift(random_community_graph(24, 3, 0.6, 0.1, 5),
                           ShiftKind::laplacian);
  auto dec = eigendecompose(shift);
  VecX<double> h = target_exponential_kernel(dec.eigvals, 3.0, 0.75);
  MatX<double> target = dec.eigvecs * h.asDiagonal() * dec.inv_eigvecs;
  for (int k : {2, 3, 4}) {
    ClassicalFir<double> cls = design_classical_ls(dec.eigvals, h, k);
    double nse_cls = nse(target, dense_matrix(cls, shift));
    auto [nv, nv_rep] = design_nv_ls(shift, target, k);
    auto [cev, cev_rep] = design_cev_ls(shift, target, k);
    CHECK(nv_rep.nse <= nse_cls + 1e-12);
    CHECK(cev_rep.nse <= nv_rep.nse + 1e-12);
  }
}

TEST_CASE("SICEV LS is exact when the target lies in the model span") {
  auto shift = build_shift(random_community_graph(14, 2, 0.7, 0.1, 9),
                           ShiftKind::adjacency);
  auto dec = eigendecompose(shift);
  NullspaceBasis<double> basis = nullspace_basis(dec, support_pattern(shift));
  // target synthesized from a known coefficient set
  VecX<double> a1 = random_vec(basis.dim), a2 = random_vec(basis.dim);
  VecX<double> h = basis.basis * a1 +
                   dec.eigvals.asDiagonal() * (basis.basis * a2);
  auto [fit, report] = design_sicev_ls(basis, dec.eigvals, h, 2);
  CHECK(report.nse < 1e-16);
}

TEST_CASE("EV BCD objective trace is nonincreasing and beats its init") {
  for (std::uint64_t seed : {1, 2, 3}) {
    auto shift = normalize_spectral(build_shift(
        random_community_graph(12, 2, 0.7, 0.1, seed), ShiftKind::adjacency));
    auto dec = eigendecompose(shift);
    VecX<double> h = target_exponential_kernel(dec.eigvals, 2.0, 0.3);
    MatX<double> target = dec.eigvecs * h.asDiagonal() * dec.inv_eigvecs;
    BcdOptions opts;
    opts.seed = seed;
    auto [fit, report] = design_ev_bcd(shift, target, 3, opts);
    REQUIRE(report.objective_trace.size() >= 2);
    for (size_t t = 1; t < report.objective_trace.size(); ++t)
      CHECK(report.objective_trace[t] <=
            report.objective_trace[t - 1] * (1.0 + 1e-12) + 1e-300);
    CHECK(report.objective_trace.back() <= report.objective_trace.front());
  }
}

TEST_CASE("SIEV BCD decreases a classical start and stays monotone") {
  auto shift = normalize_spectral(build_shift(
      random_community_graph(14, 2, 0.7, 0.1, 21), ShiftKind::adjacency));
  auto dec = eigendecompose(shift);
  NullspaceBasis<double> basis = nullspace_basis(dec, support_pattern(shift));
  VecX<double> h = target_exponential_kernel(dec.eigvals, 2.0, 0.2);
  BcdOptions opts;
  opts.seed = 5;
  auto [fit, report] = design_siev_bcd(basis, dec.eigvals, h, 3, opts);
  for (size_t t = 1; t < report.objective_trace.size(); ++t)
    CHECK(report.objective_trace[t] <=
          report.objective_trace[t - 1] * (1.0 + 1e-12) + 1e-300);
  CHECK(report.nse >= 0.0);
  CHECK(modal_response(fit).size() == dec.n());
}

TEST_CASE("EV-ARMA1 two-step design respects the contraction bound") {
  auto shift = normalize_spectral(build_shift(
      random_community_graph(16, 2, 0.7, 0.1, 3), ShiftKind::laplacian));
  MatX<double> target =
      (MatX<double>::Identity(16, 16) + 0.8 * shift.matrix)
          .partialPivLu()
          .inverse();
  for (double delta : {0.6, 0.7, 0.8}) {
    auto [fit, report] = design_ev_arma1(shift, target, delta);
    CHECK(spectral_norm(fit.phi1) <= delta + 1e-9);
    CHECK(report.margin >= -1e-9);
    CHECK(report.nse >= 0.0);
    CHECK(report.nse < 0.05);  // smooth target, good rational fit
  }
  CHECK_THROWS_AS(design_ev_arma1(shift, target, 1.5), Error);
}

TEST_CASE("SIEVA1 design keeps the modal denominator away from 1") {
  auto shift = normalize_spectral(build_shift(
      random_community_graph(14, 2, 0.7, 0.1, 13), ShiftKind::laplacian));
  auto dec = eigendecompose(shift);
  NullspaceBasis<double> basis = nullspace_basis(dec, support_pattern(shift));
  VecX<double> h =
      (VecX<double>::Ones(14) + 0.8 * dec.eigvals).cwiseInverse();
  auto [fit, report] = design_sieva1(basis, dec.eigvals, h, 0.7);
  CHECK((basis.basis * fit.alpha1).cwiseAbs().maxCoeff() <= 0.7 + 1e-9);
  CHECK(report.margin >= -1e-9);
  CHECK(report.nse < 1e-2);
}

TEST_CASE("rank-deficient systems fall back to a ridge solution") {
  MatX<double> a(4, 3);
  a << 1, 1, 0, 0, 0, 0, 1, 1, 0, 2, 2, 0;  // col0 == col1, col2 == 0
  VecX<double> b(4);
  b << 1, 0, 1, 2;
  bool deficient = false;
  VecX<double> x = detail::solve_lstsq(a, b, &deficient);
  CHECK(deficient);
  CHECK((a * x - b).norm() < 1e-6);
}

TEST_CASE("degenerate inputs are rejected") {
  auto shift = build_shift(ring_graph(6), ShiftKind::laplacian);
  MatX<double> target = MatX<double>::Zero(6, 6);
  CHECK_THROWS_AS(nse(target, target), Error);
  CHECK_THROWS_AS(design_cev_ls(shift, MatX<double>::Identity(4, 4), 2), Error);
  CHECK_THROWS_AS(design_cev_ls(shift, MatX<double>::Identity(6, 6), 0), Error);
}
