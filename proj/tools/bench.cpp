// Timing comparison between the serial reference and the OpenMP row-parallel
// message-passing kernels.

#include <chrono>
#include <cstdio>
#include <random>

#include "gfev/design.hpp"
#include "gfev/distsim.hpp"
#include "gfev/graph.hpp"
#include "gfev/shift.hpp"

using namespace gfev;

namespace {

double time_ms(int reps, const FilterSpec<double>& f,
               const ShiftOperator<double>& shift, const VecX<double>& x,
               bool parallel) {
  SimOptions opts;
  opts.parallel = parallel;
  volatile double sink = 0.0;
  auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) {
    VecX<double> y = simulate(f, shift, x, opts);
    sink += y(0);
  }
  auto stop = std::chrono::steady_clock::now();
  (void)sink;
  return std::chrono::duration<double, std::milli>(stop - start).count() /
         reps;
}

}  // namespace

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 512;
  int order = argc > 2 ? std::atoi(argv[2]) : 8;
  int reps = argc > 3 ? std::atoi(argv[3]) : 20;

  Graph g = random_community_graph(n, 8, 0.4, 0.02, 1);
  ShiftOperator<double> shift = build_shift(g, ShiftKind::laplacian);
  SupportPattern supp = support_pattern(shift);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VecX<double> x(n);
  for (int i = 0; i < n; ++i) x(i) = gauss(rng);

  std::vector<MatX<double>> mats;
  for (int k = 0; k < order; ++k)
    mats.push_back(detail::random_supported(supp, rng, 0.6));
  FilterSpec<double> ev = EdgeVariantFir<double>{mats};

  // verify both paths agree before timing them
  VecX<double> ys = simulate(ev, shift, x, {.parallel = false});
  VecX<double> yp = simulate(ev, shift, x, {.parallel = true});
  double diff = (ys - yp).norm();

  double serial = time_ms(reps, ev, shift, x, false);
  double parallel = time_ms(reps, ev, shift, x, true);

  std::printf("n=%d K=%d reps=%d\n", n, order, reps);
  std::printf("serial   %8.3f ms/run\n", serial);
  std::printf("parallel %8.3f ms/run\n", parallel);
  std::printf("speedup  %8.2fx  (path difference %.3g)\n", serial / parallel,
              diff);
  return 0;
}
