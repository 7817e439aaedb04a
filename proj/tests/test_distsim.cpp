#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "gfev/distsim.hpp"
#include "gfev/graph.hpp"
#include "gfev/nullspace.hpp"
#include "gfev/spectral.hpp"

using namespace gfev;

namespace {

std::mt19937_64 rng(7);
std::normal_distribution<double> gauss;

ShiftOperator<double> test_shift(int n, std::uint64_t seed) {
  return normalize_spectral(build_shift(
      random_community_graph(n, 2, 0.7, 0.1, seed), ShiftKind::adjacency));
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

std::int64_t undirected_edges(const ShiftOperator<double>& shift) {
  SupportPattern supp = support_pattern(shift);
  std::int64_t m = 0;
  for (const auto& [i, j] : supp.allowed_indices)
    if (i < j) ++m;
  return m;
}

}  // namespace

TEST_CASE("FIR simulation sends exactly 2MK scalars over K rounds") {
  auto shift = test_shift(20, 3);
  const std::int64_t m2 = 2 * undirected_edges(shift);
  SupportPattern supp = support_pattern(shift);
  VecX<double> x = random_vec(20);

  const int order = 4;
  FilterSpec<double> ev = EdgeVariantFir<double>{{random_supported(supp, 0.7),
                                                  random_supported(supp, 0.7),
                                                  random_supported(supp, 0.7),
                                                  random_supported(supp, 0.7)}};
  SimulationTrace<double> trace;
  simulate_fir(ev, shift, x, {}, &trace);
  CHECK(trace.rounds == order);
  CHECK(trace.total_scalars_sent == m2 * order);
  for (auto scalars : trace.messages_per_round) CHECK(scalars == m2);
  CHECK(trace.violations.empty());
}

TEST_CASE("every FIR family matches its dense operator through simulation") {
  auto shift = test_shift(18, 5);
  auto dec = eigendecompose(shift);
  SupportPattern supp = support_pattern(shift);
  NullspaceBasis<double> basis = nullspace_basis(dec, supp);
  VecX<double> x = random_vec(18);

  std::vector<FilterSpec<double>> specs;
  specs.push_back(ClassicalFir<double>{{0.3, -0.4, 0.2, 0.1}});
  specs.push_back(
      NodeVariantFir<double>{{random_vec(18), random_vec(18), random_vec(18)}});
  specs.push_back(EdgeVariantFir<double>{
      {random_supported(supp, 0.7), random_supported(supp, 0.7)}});
  specs.push_back(ConstrainedEvFir<double>{
      {random_supported(supp, 0.7), random_supported(supp, 0.7)}});
  SievFir<double> siev;
  siev.basis = basis.basis;
  siev.alpha0 = 0.3 * random_vec(basis.dim);
  siev.alphas = {0.5 * random_vec(basis.dim), 0.5 * random_vec(basis.dim)};
  specs.push_back(siev);
  SicevFir<double> sicev;
  sicev.basis = basis.basis;
  sicev.alphas = {0.5 * random_vec(basis.dim), 0.5 * random_vec(basis.dim)};
  specs.push_back(sicev);

  for (const auto& f : specs) {
    VecX<double> expect = dense_matrix(f, shift) * x;
    SimulationTrace<double> trace;
    VecX<double> y = simulate_fir(f, shift, x, {}, &trace);
    CHECK((y - expect).norm() <= 1e-9 * std::max(expect.norm(), 1.0));
    CHECK(trace.violations.empty());
  }
}

TEST_CASE("ARMA simulation converges to the dense rational operator") {
  auto shift = test_shift(16, 8);
  SupportPattern supp = support_pattern(shift);
  VecX<double> x = random_vec(16);

  std::vector<FilterSpec<double>> specs;
  specs.push_back(ClassicalArma1<double>{-0.8, 1.0});
  specs.push_back(EvArma1<double>{random_supported(supp, 1.0),
                                  random_supported(supp, 0.65)});

  for (const auto& f : specs) {
    VecX<double> expect = dense_matrix(f, shift) * x;
    SimulationTrace<double> trace;
    VecX<double> y = simulate_arma(f, shift, x, {}, &trace);
    CHECK((y - expect).norm() <= 1e-8 * std::max(expect.norm(), 1.0));
    // steady rounds each exchange 2M scalars (forcing term is cached)
    const std::int64_t m2 = 2 * undirected_edges(shift);
    for (auto scalars : trace.messages_per_round) CHECK(scalars == m2);
    CHECK(trace.rounds > 1);
  }
}

TEST_CASE("off-support coefficients trigger a locality violation") {
  auto shift = test_shift(12, 9);
  SupportPattern supp = support_pattern(shift);
  MatX<double> bad = random_supported(supp, 0.5);
  bool placed = false;
  for (int i = 0; i < 12 && !placed; ++i)
    for (int j = 0; j < 12 && !placed; ++j)
      if (!supp.allowed(i, j)) {
        bad(i, j) = 0.3;
        placed = true;
      }
  REQUIRE(placed);
  FilterSpec<double> f = EdgeVariantFir<double>{{bad}};
  VecX<double> x = random_vec(12);
  try {
    simulate_fir(f, shift, x);
    FAIL("expected locality violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::locality_violation);
  }
}

TEST_CASE("serial and parallel paths produce identical bits") {
  auto shift = test_shift(40, 10);
  SupportPattern supp = support_pattern(shift);
  VecX<double> x = random_vec(40);
  FilterSpec<double> f = EdgeVariantFir<double>{
      {random_supported(supp, 0.7), random_supported(supp, 0.7),
       random_supported(supp, 0.7)}};
  SimOptions serial{.parallel = false};
  SimOptions parallel{.parallel = true};
  VecX<double> ys = simulate_fir(f, shift, x, serial);
  VecX<double> yp = simulate_fir(f, shift, x, parallel);
  for (int i = 0; i < 40; ++i) CHECK(ys(i) == yp(i));
}

TEST_CASE("divergent ARMA recursion is detected during simulation") {
  auto shift = test_shift(12, 11);
  SupportPattern supp = support_pattern(shift);
  FilterSpec<double> f = EvArma1<double>{random_supported(supp, 1.0),
                                         random_supported(supp, 1.4)};
  VecX<double> x = random_vec(12);
  try {
    simulate_arma(f, shift, x);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::divergent_filter);
  }
}

TEST_CASE("signal length mismatch is rejected") {
  auto shift = test_shift(12, 12);
  FilterSpec<double> f = ClassicalFir<double>{{1.0, 0.5}};
  CHECK_THROWS_AS(simulate_fir(f, shift, random_vec(11)), Error);
}
