#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "gfev/filters.hpp"
#include "gfev/graph.hpp"
#include "gfev/nullspace.hpp"
#include "gfev/shift.hpp"
#include "gfev/spectral.hpp"

using namespace gfev;

namespace {

std::mt19937_64 rng(2024);
std::normal_distribution<double> gauss;

ShiftOperator<double> test_shift(int n = 12, std::uint64_t seed = 4) {
  auto s =
      build_shift(random_community_graph(n, 2, 0.7, 0.1, seed), ShiftKind::adjacency);
  return normalize_spectral(s);
}

MatX<double> random_supported(const SupportPattern& supp, double norm_goal) {
  MatX<double> m = MatX<double>::Zero(supp.n, supp.n);
  for (const auto& [i, j] : supp.allowed_indices) m(i, j) = gauss(rng);
  return m * (norm_goal / spectral_norm(m));
}

VecX<double> random_vec(int n) {
  VecX<double> v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

}  // namespace

TEST_CASE("reduction chain: classical == NV(constant) == CEV(diag embed)") {
  auto shift = test_shift();
  const int n = shift.n();
  std::vector<double> taps = {0.4, -0.3, 0.25, 0.1};
  ClassicalFir<double> cls{taps};

  NodeVariantFir<double> nv;
  for (double t : taps) nv.taps.push_back(VecX<double>::Constant(n, t));

  // classical sum phi_k S^k as CEV: Phi_k = phi_{k-1} S^0-part... the chain
  // sum_k Phi_k S^{k-1} with Phi_k = phi_k S + [k==1] phi_0 I reproduces it
  ConstrainedEvFir<double> cev;
  for (size_t k = 1; k < taps.size(); ++k) {
    MatX<double> phi = taps[k] * shift.matrix;
    if (k == 1) phi += taps[0] * MatX<double>::Identity(n, n);
    cev.mats.push_back(phi);
  }

  MatX<double> hc = dense_matrix(cls, shift);
  CHECK((hc - dense_matrix(nv, shift)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((hc - dense_matrix(cev, shift)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("recursive application matches the dense operator") {
  auto shift = test_shift(14, 8);
  SupportPattern supp = support_pattern(shift);
  const int n = shift.n();
  VecX<double> x = random_vec(n);

  std::vector<FilterSpec<double>> specs;
  specs.push_back(ClassicalFir<double>{{0.5, -0.2, 0.3}});
  specs.push_back(NodeVariantFir<double>{
      {random_vec(n), random_vec(n), random_vec(n)}});
  specs.push_back(make_edge_variant_fir<double>(
      {random_supported(supp, 0.8), random_supported(supp, 0.8)}, supp));
  specs.push_back(make_constrained_ev_fir<double>(
      {random_supported(supp, 0.8), random_supported(supp, 0.8)}, supp));
  specs.push_back(ClassicalArma1<double>{0.6, 1.2});
  specs.push_back(make_ev_arma1<double>(random_supported(supp, 1.0),
                                        random_supported(supp, 0.7), supp));

  for (const auto& f : specs) {
    VecX<double> dense = dense_matrix(f, shift) * x;
    VecX<double> rec = apply_recursive(f, shift, x);
    CHECK((rec - dense).norm() <= 1e-9 * std::max(dense.norm(), 1.0));
  }
}

TEST_CASE("support factories reject off-support coefficients") {
  auto shift = test_shift();
  SupportPattern supp = support_pattern(shift);
  MatX<double> bad = MatX<double>::Zero(shift.n(), shift.n());
  bool placed = false;
  for (int i = 0; i < shift.n() && !placed; ++i)
    for (int j = 0; j < shift.n() && !placed; ++j)
      if (!supp.allowed(i, j)) {
        bad(i, j) = 1.0;
        placed = true;
      }
  REQUIRE(placed);
  CHECK_THROWS_AS(make_edge_variant_fir<double>({bad}, supp), Error);
  CHECK_THROWS_AS(make_constrained_ev_fir<double>({bad}, supp), Error);
  CHECK_THROWS_AS(make_ev_arma1<double>(bad, bad, supp), Error);
}

TEST_CASE("SIEV modal response matches diagonalization of the dense filter") {
  auto shift = test_shift(12, 6);
  auto dec = eigendecompose(shift);
  NullspaceBasis<double> basis = nullspace_basis(dec, support_pattern(shift));
  SievFir<double> f;
  f.basis = basis.basis;
  f.alpha0 = 0.3 * random_vec(basis.dim);
  for (int k = 0; k < 3; ++k) f.alphas.push_back(0.5 * random_vec(basis.dim));

  VecX<double> h = modal_response(f);
  MatX<double> dense = dense_matrix(f, shift);
  VecX<double> h_diag = (dec.inv_eigvecs * dense * dec.eigvecs).diagonal();
  CHECK((h - h_diag).norm() <= 1e-8 * std::max(h.norm(), 1.0));
}

TEST_CASE("SICEV modal response matches Vandermonde-in-lambda form") {
  auto shift = test_shift(12, 7);
  auto dec = eigendecompose(shift);
  NullspaceBasis<double> basis = nullspace_basis(dec, support_pattern(shift));
  SicevFir<double> f;
  f.basis = basis.basis;
  for (int k = 0; k < 3; ++k) f.alphas.push_back(0.5 * random_vec(basis.dim));

  VecX<double> h = modal_response(f, dec.eigvals);
  VecX<double> h_diag =
      (dec.inv_eigvecs * dense_matrix(f, shift) * dec.eigvecs).diagonal();
  CHECK((h - h_diag).norm() <= 1e-8 * std::max(h.norm(), 1.0));
}

TEST_CASE("SIEVA1 modal response is the rational form and guards poles") {
  auto shift = test_shift(12, 9);
  auto dec = eigendecompose(shift);
  NullspaceBasis<double> basis = nullspace_basis(dec, support_pattern(shift));
  Sieva1<double> f;
  f.basis = basis.basis;
  f.alpha0 = random_vec(basis.dim);
  f.alpha1 = random_vec(basis.dim);
  f.alpha1 *= 0.6 / (basis.basis * f.alpha1).cwiseAbs().maxCoeff();

  VecX<double> h = modal_response(f);
  VecX<double> h_diag =
      (dec.inv_eigvecs * dense_matrix(f, shift) * dec.eigvecs).diagonal();
  CHECK((h - h_diag).norm() <= 1e-8 * std::max(h.norm(), 1.0));

  Sieva1<double> pole = f;
  pole.alpha1 *= 1.0 / 0.6;  // pushes some modal denominator to ~0
  pole.alpha1 *= 1.0 + 1e-15;
  // denominators at exactly 1 raise singular_mode
  VecX<double> b1 = basis.basis * pole.alpha1;
  bool near_one = false;
  for (int i = 0; i < b1.size(); ++i)
    if (std::abs(1.0 - b1(i)) < 1e-12) near_one = true;
  if (near_one) CHECK_THROWS_AS(modal_response(pole), Error);
}

TEST_CASE("classical ARMA1 dense form matches phi (I - psi S)^{-1}") {
  auto shift = test_shift(10, 12);
  ClassicalArma1<double> f{0.5, 2.0};
  MatX<double> expect =
      2.0 * (MatX<double>::Identity(10, 10) - 0.5 * shift.matrix)
                .partialPivLu()
                .inverse();
  CHECK((dense_matrix(f, shift) - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("divergent recursions are rejected") {
  auto shift = test_shift(10, 13);
  SupportPattern supp = support_pattern(shift);
  ClassicalArma1<double> cls{1.5, 1.0};  // |psi| ||S|| = 1.5 >= 1
  CHECK_THROWS_AS(dense_matrix(cls, shift), Error);
  EvArma1<double> ev{random_supported(supp, 1.0), random_supported(supp, 1.3)};
  CHECK_THROWS_AS(dense_matrix(ev, shift), Error);
}

TEST_CASE("realized SI filters agree with their dense synthesis") {
  auto shift = test_shift(12, 14);
  auto dec = eigendecompose(shift);
  SupportPattern supp = support_pattern(shift);
  NullspaceBasis<double> basis = nullspace_basis(dec, supp);
  VecX<double> x = random_vec(12);

  SicevFir<double> f;
  f.basis = basis.basis;
  for (int k = 0; k < 2; ++k) f.alphas.push_back(0.4 * random_vec(basis.dim));
  ConstrainedEvFir<double> cev = realize(f, shift);
  for (const auto& m : cev.mats) check_support(m, supp, "realized");
  CHECK((dense_matrix(cev, shift) - dense_matrix(f, shift))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  VecX<double> y = apply_recursive(FilterSpec<double>(f), shift, x);
  CHECK((y - dense_matrix(f, shift) * x).norm() < 1e-9);
}

TEST_CASE("complex-field filters work end to end") {
  auto rshift = test_shift(10, 21);
  auto shift = to_complex(rshift);
  SupportPattern supp = support_pattern(shift);
  MatX<Cplx> phi = MatX<Cplx>::Zero(10, 10);
  for (const auto& [i, j] : supp.allowed_indices)
    phi(i, j) = Cplx(gauss(rng), gauss(rng));
  phi *= Cplx(0.8 / spectral_norm(phi));
  EdgeVariantFir<Cplx> f{{phi, phi}};
  VecX<Cplx> x(10);
  for (int i = 0; i < 10; ++i) x(i) = Cplx(gauss(rng), gauss(rng));
  VecX<Cplx> dense = dense_matrix(f, shift) * x;
  VecX<Cplx> rec = apply_recursive(FilterSpec<Cplx>(f), shift, x);
  CHECK((rec - dense).norm() <= 1e-9 * dense.norm());
}
