#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gfev/common.hpp"
#include "gfev/filters.hpp"
#include "gfev/shift.hpp"

namespace gfev {

struct SimOptions {
  bool parallel = true;       // OpenMP row updates; serial path is the oracle
  bool record_states = false; // keep per-round node states in the trace
  ArmaOptions arma;
};

template <class S>
struct SimulationTrace {
  int rounds = 0;
  std::vector<std::int64_t> messages_per_round;  // scalars exchanged per round
  std::int64_t total_scalars_sent = 0;
  std::vector<std::string> violations;
  std::vector<VecX<S>> states;  // per-round outputs when record_states is set
};

namespace detail {

// Row-compressed view of a coefficient matrix restricted to the filter
// support. Neighbor contributions are accumulated in ascending column order
// so serial and parallel execution produce bit-identical sums.
template <class S>
struct LocalMatrix {
  int n = 0;
  std::vector<std::vector<std::pair<int, S>>> rows;

  static LocalMatrix from(const MatX<S>& mat, const SupportPattern& supp,
                          const char* what) {
    LocalMatrix lm;
    lm.n = supp.n;
    lm.rows.resize(supp.n);
    for (int i = 0; i < supp.n; ++i)
      for (int j = 0; j < supp.n; ++j) {
        if (mat(i, j) == S(0)) continue;
        if (!supp.allowed(i, j))
          fail(ErrorCode::locality_violation,
               std::string(what) + " has a coefficient outside the one-hop "
                                   "support at (" +
                   std::to_string(i) + ", " + std::to_string(j) + ")");
        lm.rows[i].push_back({j, mat(i, j)});
      }
    return lm;
  }

  void apply(const VecX<S>& x, VecX<S>& out, bool parallel) const {
#ifdef GFEV_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (int i = 0; i < n; ++i) {
      S acc(0);
      for (const auto& [j, v] : rows[i]) acc += v * x(j);
      out(i) = acc;
    }
#ifndef GFEV_HAVE_OPENMP
    (void)parallel;
#endif
  }
};

inline std::int64_t offdiag_count(const SupportPattern& supp) {
  std::int64_t m = 0;
  for (const auto& [i, j] : supp.allowed_indices)
    if (i != j) ++m;
  return m;
}

template <class S>
void record_round(SimulationTrace<S>* trace, const SimOptions& opts,
                  std::int64_t scalars, const VecX<S>& state) {
  if (!trace) return;
  ++trace->rounds;
  trace->messages_per_round.push_back(scalars);
  trace->total_scalars_sent += scalars;
  if (opts.record_states) trace->states.push_back(state);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// FIR simulation: one broadcast per round, K rounds, 2MK scalars in total on
// an undirected graph with M edges. Every family reduces to a sequence of
// supported matrix-vector products against the most recent broadcast.
// ---------------------------------------------------------------------------

template <class S>
VecX<S> simulate_fir(const FilterSpec<S>& f, const ShiftOperator<S>& shift,
                     const VecX<S>& x, const SimOptions& opts = {},
                     SimulationTrace<S>* trace = nullptr) {
  const int n = shift.n();
  if (x.size() != n)
    fail(ErrorCode::dimension_mismatch, "signal length != shift size");
  SupportPattern supp = support_pattern(shift);
  const std::int64_t per_round = detail::offdiag_count(supp);
  using LM = detail::LocalMatrix<S>;

  return std::visit(
      [&](const auto& v) -> VecX<S> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ClassicalFir<S>>) {
          LM s = LM::from(shift.matrix, supp, "shift");
          VecX<S> cur = x, next(n), y = v.taps[0] * x;
          for (int k = 1; k <= v.order(); ++k) {
            s.apply(cur, next, opts.parallel);
            cur = next;
            y += v.taps[k] * cur;
            detail::record_round(trace, opts, per_round, y);
          }
          return y;
        } else if constexpr (std::is_same_v<T, NodeVariantFir<S>>) {
          LM s = LM::from(shift.matrix, supp, "shift");
          VecX<S> cur = x, next(n), y = v.taps[0].cwiseProduct(x);
          for (int k = 1; k <= v.order(); ++k) {
            s.apply(cur, next, opts.parallel);
            cur = next;
            y += v.taps[k].cwiseProduct(cur);
            detail::record_round(trace, opts, per_round, y);
          }
          return y;
        } else if constexpr (std::is_same_v<T, EdgeVariantFir<S>>) {
          std::vector<LM> lms;
          for (const auto& m : v.mats) lms.push_back(LM::from(m, supp, "Phi"));
          VecX<S> cur = x, next(n), y = VecX<S>::Zero(n);
          for (const auto& lm : lms) {
            lm.apply(cur, next, opts.parallel);
            cur = next;
            y += cur;
            detail::record_round(trace, opts, per_round, y);
          }
          return y;
        } else if constexpr (std::is_same_v<T, ConstrainedEvFir<S>>) {
          LM s = LM::from(shift.matrix, supp, "shift");
          std::vector<LM> lms;
          for (const auto& m : v.mats) lms.push_back(LM::from(m, supp, "Phi"));
          VecX<S> cur = x, tmp(n), y = VecX<S>::Zero(n);
          // round k reuses one broadcast of cur for both Phi_k cur and S cur
          for (size_t k = 0; k < lms.size(); ++k) {
            lms[k].apply(cur, tmp, opts.parallel);
            y += tmp;
            if (k + 1 < lms.size()) {
              s.apply(cur, tmp, opts.parallel);
              cur = tmp;
            }
            detail::record_round(trace, opts, per_round, y);
          }
          return y;
        } else if constexpr (std::is_same_v<T, SievFir<S>>) {
          // the order-0 term reuses the first broadcast of x, so the round
          // and message counts match the realized EV filter exactly
          auto ev = realize(v, shift);
          VecX<S> y =
              simulate_fir(FilterSpec<S>(ev), shift, x, opts, trace);
          LM a0 = LM::from(realize_order0(v, shift), supp, "order-0 term");
          VecX<S> extra(n);
          a0.apply(x, extra, opts.parallel);
          return VecX<S>(y + extra);
        } else if constexpr (std::is_same_v<T, SicevFir<S>>) {
          return simulate_fir(FilterSpec<S>(realize(v, shift)), shift, x,
                              opts, trace);
        } else {
          fail(ErrorCode::unsupported_kind,
               "not an FIR family; use simulate_arma");
        }
      },
      f);
}

// ---------------------------------------------------------------------------
// ARMA simulation: the forcing term Phi_0 x is computed from the first
// broadcast and cached, so every round exchanges 2M scalars. The stopping
// rule and divergence guard mirror the dense recursion.
// ---------------------------------------------------------------------------

template <class S>
VecX<S> simulate_arma(const FilterSpec<S>& f, const ShiftOperator<S>& shift,
                      const VecX<S>& x, const SimOptions& opts = {},
                      SimulationTrace<S>* trace = nullptr) {
  const int n = shift.n();
  if (x.size() != n)
    fail(ErrorCode::dimension_mismatch, "signal length != shift size");
  SupportPattern supp = support_pattern(shift);
  const std::int64_t per_round = detail::offdiag_count(supp);
  using LM = detail::LocalMatrix<S>;

  LM iter_lm;
  VecX<S> forcing(n);
  if (const auto* cls = std::get_if<ClassicalArma1<S>>(&f)) {
    iter_lm = LM::from(MatX<S>(cls->psi * shift.matrix), supp, "psi S");
    forcing = cls->phi * x;  // local scaling, but round 1 still broadcasts x
  } else if (const auto* ev = std::get_if<EvArma1<S>>(&f)) {
    iter_lm = LM::from(ev->phi1, supp, "Phi_1");
    LM phi0 = LM::from(ev->phi0, supp, "Phi_0");
    phi0.apply(x, forcing, opts.parallel);
  } else if (const auto* si = std::get_if<Sieva1<S>>(&f)) {
    return simulate_arma(FilterSpec<S>(realize(*si, shift)), shift, x, opts,
                         trace);
  } else {
    fail(ErrorCode::unsupported_kind, "not an ARMA family; use simulate_fir");
  }

  VecX<S> y = VecX<S>::Zero(n), next(n);
  double prev_norm = 0.0;
  int growth_streak = 0;
  for (int t = 0; t < opts.arma.max_iters; ++t) {
    iter_lm.apply(y, next, opts.parallel);
    next += forcing;
    double delta = (next - y).norm();
    double norm = next.norm();
    growth_streak = norm > prev_norm ? growth_streak + 1 : 0;
    if (growth_streak >= 10 && norm > 1e6 * std::max(forcing.norm(), 1.0)) {
      if (trace) trace->violations.push_back("divergent recursion");
      fail(ErrorCode::divergent_filter, "ARMA recursion diverges");
    }
    y = next;
    prev_norm = norm;
    detail::record_round(trace, opts, per_round, y);
    if (delta <= opts.arma.tol * std::max(norm, 1e-300)) break;
  }
  return y;
}

template <class S>
VecX<S> simulate(const FilterSpec<S>& f, const ShiftOperator<S>& shift,
                 const VecX<S>& x, const SimOptions& opts = {},
                 SimulationTrace<S>* trace = nullptr) {
  bool arma = std::holds_alternative<ClassicalArma1<S>>(f) ||
              std::holds_alternative<EvArma1<S>>(f) ||
              std::holds_alternative<Sieva1<S>>(f);
  return arma ? simulate_arma(f, shift, x, opts, trace)
              : simulate_fir(f, shift, x, opts, trace);
}

}  // namespace gfev
