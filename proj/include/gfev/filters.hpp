#pragma once

#include <variant>
#include <vector>

#include "gfev/common.hpp"
#include "gfev/nullspace.hpp"
#include "gfev/shift.hpp"
#include "gfev/spectral.hpp"

namespace gfev {

// ---------------------------------------------------------------------------
// Filter families. Matrix-valued coefficients are structurally constrained to
// the support of S + I; the factory functions below reject off-support
// entries at construction time.
// ---------------------------------------------------------------------------

template <class S>
struct ClassicalFir {
  std::vector<S> taps;  // phi_0 .. phi_K
  int order() const { return static_cast<int>(taps.size()) - 1; }
};

template <class S>
struct NodeVariantFir {
  std::vector<VecX<S>> taps;  // phi_0 .. phi_K, length-n vectors
  int order() const { return static_cast<int>(taps.size()) - 1; }
};

template <class S>
struct EdgeVariantFir {
  std::vector<MatX<S>> mats;  // Phi_1 .. Phi_K
  int order() const { return static_cast<int>(mats.size()); }
};

template <class S>
struct ConstrainedEvFir {
  std::vector<MatX<S>> mats;  // Phi_1 .. Phi_K, terms Phi_k S^{k-1}
  int order() const { return static_cast<int>(mats.size()); }
};

template <class S>
struct SievFir {
  VecX<S> alpha0;              // optional order-0 response term (may be empty)
  std::vector<VecX<S>> alphas;  // alpha_1 .. alpha_K
  MatX<S> basis;                // nullspace basis B (n x d)
  int order() const { return static_cast<int>(alphas.size()); }
};

template <class S>
struct SicevFir {
  std::vector<VecX<S>> alphas;  // alpha_1 .. alpha_K
  MatX<S> basis;
  int order() const { return static_cast<int>(alphas.size()); }
};

template <class S>
struct ClassicalArma1 {
  S psi{};
  S phi{};
};

template <class S>
struct EvArma1 {
  MatX<S> phi0;
  MatX<S> phi1;
};

template <class S>
struct Sieva1 {
  VecX<S> alpha0;
  VecX<S> alpha1;
  MatX<S> basis;
};

template <class S>
using FilterSpec =
    std::variant<ClassicalFir<S>, NodeVariantFir<S>, EdgeVariantFir<S>,
                 ConstrainedEvFir<S>, SievFir<S>, SicevFir<S>,
                 ClassicalArma1<S>, EvArma1<S>, Sieva1<S>>;

template <class S>
void check_support(const MatX<S>& m, const SupportPattern& supp,
                   const char* what) {
  if (m.rows() != supp.n || m.cols() != supp.n)
    fail(ErrorCode::dimension_mismatch, std::string(what) + ": bad shape");
  for (const auto& [i, j] : supp.zero_indices)
    if (m(i, j) != S(0))
      fail(ErrorCode::support_violation,
           std::string(what) + ": nonzero entry outside supp(S+I)");
}

template <class S>
EdgeVariantFir<S> make_edge_variant_fir(std::vector<MatX<S>> mats,
                                        const SupportPattern& supp) {
  if (mats.empty()) fail(ErrorCode::invalid_argument, "EV FIR needs K >= 1");
  for (const auto& m : mats) check_support(m, supp, "EV FIR coefficient");
  return {std::move(mats)};
}

template <class S>
ConstrainedEvFir<S> make_constrained_ev_fir(std::vector<MatX<S>> mats,
                                            const SupportPattern& supp) {
  if (mats.empty()) fail(ErrorCode::invalid_argument, "CEV FIR needs K >= 1");
  for (const auto& m : mats) check_support(m, supp, "CEV FIR coefficient");
  return {std::move(mats)};
}

template <class S>
EvArma1<S> make_ev_arma1(MatX<S> phi0, MatX<S> phi1,
                         const SupportPattern& supp) {
  check_support(phi0, supp, "EV ARMA1 Phi_0");
  check_support(phi1, supp, "EV ARMA1 Phi_1");
  return {std::move(phi0), std::move(phi1)};
}

// ---------------------------------------------------------------------------
// Modal responses.
// ---------------------------------------------------------------------------

template <class S>
VecX<S> modal_response(const ClassicalFir<S>& f, const VecX<S>& lambda) {
  VecX<S> h = VecX<S>::Zero(lambda.size());
  for (int k = f.order(); k >= 0; --k)
    h = h.cwiseProduct(lambda) + VecX<S>::Constant(lambda.size(), f.taps[k]);
  return h;
}

template <class S>
VecX<S> modal_response(const ClassicalArma1<S>& f, const VecX<S>& lambda) {
  VecX<S> h(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    S den = S(1) - f.psi * lambda(i);
    if (std::abs(den) < 1e-12)
      fail(ErrorCode::singular_mode, "ARMA1 pole at a graph frequency");
    h(i) = f.phi / den;
  }
  return h;
}

template <class S>
VecX<S> modal_response(const SievFir<S>& f) {
  const Eigen::Index n = f.basis.rows();
  VecX<S> h = f.alpha0.size() > 0 ? VecX<S>(f.basis * f.alpha0)
                                  : VecX<S>(VecX<S>::Zero(n));
  VecX<S> partial = VecX<S>::Ones(n);  // running product over j <= k
  for (const auto& alpha : f.alphas) {
    partial = partial.cwiseProduct(f.basis * alpha);
    h += partial;
  }
  return h;
}

template <class S>
VecX<S> modal_response(const SicevFir<S>& f, const VecX<S>& lambda) {
  const Eigen::Index n = f.basis.rows();
  if (lambda.size() != n)
    fail(ErrorCode::dimension_mismatch, "lambda length != basis rows");
  VecX<S> h = VecX<S>::Zero(n);
  VecX<S> pow = VecX<S>::Ones(n);  // lambda^{k-1}
  for (const auto& alpha : f.alphas) {
    h += pow.cwiseProduct(f.basis * alpha);
    pow = pow.cwiseProduct(lambda);
  }
  return h;
}

template <class S>
VecX<S> modal_response(const Sieva1<S>& f) {
  VecX<S> num = f.basis * f.alpha0;
  VecX<S> den_term = f.basis * f.alpha1;
  VecX<S> h(num.size());
  for (Eigen::Index i = 0; i < num.size(); ++i) {
    S den = S(1) - den_term(i);
    if (std::abs(den) < 1e-12)
      fail(ErrorCode::singular_mode, "SIEVA1 mode denominator vanishes");
    h(i) = num(i) / den;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Dense realization.
// ---------------------------------------------------------------------------

namespace detail {

// Synthesized coefficient matrices of the shift-invariant families, with the
// numerically-zero off-support leakage masked to exact zeros so the dense and
// message-passing paths evaluate the same operator.
template <class S>
MatX<S> synthesize_masked(const SpectralDecomposition<S>& dec,
                          const MatX<S>& basis, const VecX<S>& alpha,
                          const SupportPattern& supp) {
  VecX<S> omega = basis * alpha;
  MatX<S> a = dec.eigvecs * omega.asDiagonal() * dec.inv_eigvecs;
  for (const auto& [i, j] : supp.zero_indices) a(i, j) = S(0);
  return a;
}

template <class S>
struct SiContext {
  SpectralDecomposition<S> dec;
  SupportPattern supp;
};

template <class S>
SiContext<S> si_context(const ShiftOperator<S>& shift) {
  return {eigendecompose(shift), support_pattern(shift)};
}

}  // namespace detail

// Converts the shift-invariant families to their realized edge-variant form.
template <class S>
EdgeVariantFir<S> realize(const SievFir<S>& f, const ShiftOperator<S>& shift) {
  auto ctx = detail::si_context(shift);
  std::vector<MatX<S>> mats;
  for (const auto& alpha : f.alphas)
    mats.push_back(detail::synthesize_masked(ctx.dec, f.basis, alpha, ctx.supp));
  return {std::move(mats)};
}

template <class S>
MatX<S> realize_order0(const SievFir<S>& f, const ShiftOperator<S>& shift) {
  auto ctx = detail::si_context(shift);
  if (f.alpha0.size() == 0) return MatX<S>::Zero(shift.n(), shift.n());
  return detail::synthesize_masked(ctx.dec, f.basis, f.alpha0, ctx.supp);
}

template <class S>
ConstrainedEvFir<S> realize(const SicevFir<S>& f,
                            const ShiftOperator<S>& shift) {
  auto ctx = detail::si_context(shift);
  std::vector<MatX<S>> mats;
  for (const auto& alpha : f.alphas)
    mats.push_back(detail::synthesize_masked(ctx.dec, f.basis, alpha, ctx.supp));
  return {std::move(mats)};
}

template <class S>
EvArma1<S> realize(const Sieva1<S>& f, const ShiftOperator<S>& shift) {
  auto ctx = detail::si_context(shift);
  return {detail::synthesize_masked(ctx.dec, f.basis, f.alpha0, ctx.supp),
          detail::synthesize_masked(ctx.dec, f.basis, f.alpha1, ctx.supp)};
}

template <class S>
MatX<S> dense_matrix(const ClassicalFir<S>& f, const ShiftOperator<S>& shift) {
  const int n = shift.n();
  if (f.taps.empty()) fail(ErrorCode::invalid_argument, "empty tap list");
  MatX<S> h = f.taps.back() * MatX<S>::Identity(n, n);
  for (int k = f.order() - 1; k >= 0; --k)
    h = shift.matrix * h + f.taps[k] * MatX<S>::Identity(n, n);
  return h;
}

template <class S>
MatX<S> dense_matrix(const NodeVariantFir<S>& f,
                     const ShiftOperator<S>& shift) {
  const int n = shift.n();
  MatX<S> h = MatX<S>::Zero(n, n);
  MatX<S> pow = MatX<S>::Identity(n, n);
  for (const auto& v : f.taps) {
    if (v.size() != n) fail(ErrorCode::dimension_mismatch, "NV tap length");
    h += v.asDiagonal() * pow;
    pow = shift.matrix * pow;
  }
  return h;
}

template <class S>
MatX<S> dense_matrix(const EdgeVariantFir<S>& f,
                     const ShiftOperator<S>& shift) {
  const int n = shift.n();
  MatX<S> prod = MatX<S>::Identity(n, n);
  MatX<S> h = MatX<S>::Zero(n, n);
  for (const auto& m : f.mats) {
    prod = m * prod;  // Phi_{k:1}
    h += prod;
  }
  return h;
}

template <class S>
MatX<S> dense_matrix(const ConstrainedEvFir<S>& f,
                     const ShiftOperator<S>& shift) {
  const int n = shift.n();
  MatX<S> pow = MatX<S>::Identity(n, n);
  MatX<S> h = MatX<S>::Zero(n, n);
  for (const auto& m : f.mats) {
    h += m * pow;
    pow = shift.matrix * pow;
  }
  return h;
}

template <class S>
MatX<S> dense_matrix(const ClassicalArma1<S>& f,
                     const ShiftOperator<S>& shift) {
  const int n = shift.n();
  if (std::abs(f.psi) * spectral_norm(shift.matrix) >= 1.0)
    fail(ErrorCode::divergent_filter, "|psi| * ||S||_2 >= 1");
  MatX<S> a = MatX<S>::Identity(n, n) - f.psi * shift.matrix;
  return f.phi * a.partialPivLu().solve(MatX<S>::Identity(n, n));
}

template <class S>
MatX<S> dense_matrix(const EvArma1<S>& f, const ShiftOperator<S>& shift) {
  const int n = shift.n();
  if (spectral_norm(f.phi1) >= 1.0)
    fail(ErrorCode::divergent_filter, "||Phi_1||_2 >= 1");
  MatX<S> a = MatX<S>::Identity(n, n) - f.phi1;
  return a.partialPivLu().solve(f.phi0);
}

template <class S>
MatX<S> dense_matrix(const SievFir<S>& f, const ShiftOperator<S>& shift) {
  auto ev = realize(f, shift);
  return dense_matrix(ev, shift) + realize_order0(f, shift);
}

template <class S>
MatX<S> dense_matrix(const SicevFir<S>& f, const ShiftOperator<S>& shift) {
  auto cev = realize(f, shift);
  return dense_matrix(cev, shift);
}

template <class S>
MatX<S> dense_matrix(const Sieva1<S>& f, const ShiftOperator<S>& shift) {
  auto arma = realize(f, shift);
  return dense_matrix(arma, shift);
}

template <class S>
MatX<S> dense_matrix(const FilterSpec<S>& f, const ShiftOperator<S>& shift) {
  return std::visit([&](const auto& v) { return dense_matrix(v, shift); }, f);
}

// ---------------------------------------------------------------------------
// Local-exchange recursions (centralized execution; the distsim module runs
// the same recursions node-by-node with explicit messages).
// ---------------------------------------------------------------------------

struct ArmaOptions {
  int max_iters = 10000;
  double tol = 1e-10;
};

namespace detail {

template <class S>
VecX<S> arma_recursion(const MatX<S>& phi1, const VecX<S>& forcing,
                       const ArmaOptions& opts) {
  VecX<S> y = VecX<S>::Zero(forcing.size());
  double prev_norm = 0.0;
  int growth_streak = 0;
  for (int t = 0; t < opts.max_iters; ++t) {
    VecX<S> next = phi1 * y + forcing;
    double delta = (next - y).norm();
    double norm = next.norm();
    growth_streak = norm > prev_norm ? growth_streak + 1 : 0;
    if (growth_streak >= 10 && norm > 1e6 * std::max(forcing.norm(), 1.0))
      fail(ErrorCode::divergent_filter, "ARMA recursion diverges");
    y = std::move(next);
    prev_norm = norm;
    if (delta <= opts.tol * std::max(norm, 1e-300)) break;
  }
  return y;
}

}  // namespace detail

template <class S>
VecX<S> apply_recursive(const FilterSpec<S>& f, const ShiftOperator<S>& shift,
                        const VecX<S>& x, const ArmaOptions& opts = {}) {
  if (x.size() != shift.n())
    fail(ErrorCode::dimension_mismatch, "signal length != shift size");
  return std::visit(
      [&](const auto& v) -> VecX<S> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ClassicalFir<S>>) {
          VecX<S> cur = x;
          VecX<S> y = v.taps[0] * x;
          for (int k = 1; k <= v.order(); ++k) {
            cur = shift.matrix * cur;
            y += v.taps[k] * cur;
          }
          return y;
        } else if constexpr (std::is_same_v<T, NodeVariantFir<S>>) {
          VecX<S> cur = x;
          VecX<S> y = v.taps[0].cwiseProduct(x);
          for (int k = 1; k <= v.order(); ++k) {
            cur = shift.matrix * cur;
            y += v.taps[k].cwiseProduct(cur);
          }
          return y;
        } else if constexpr (std::is_same_v<T, EdgeVariantFir<S>>) {
          VecX<S> cur = x;
          VecX<S> y = VecX<S>::Zero(x.size());
          for (const auto& m : v.mats) {
            cur = m * cur;
            y += cur;
          }
          return y;
        } else if constexpr (std::is_same_v<T, ConstrainedEvFir<S>>) {
          VecX<S> cur = x;
          VecX<S> y = VecX<S>::Zero(x.size());
          for (const auto& m : v.mats) {
            y += m * cur;
            cur = shift.matrix * cur;
          }
          return y;
        } else if constexpr (std::is_same_v<T, ClassicalArma1<S>>) {
          return detail::arma_recursion<S>(MatX<S>(v.psi * shift.matrix),
                                           VecX<S>(v.phi * x), opts);
        } else if constexpr (std::is_same_v<T, EvArma1<S>>) {
          return detail::arma_recursion<S>(v.phi1, VecX<S>(v.phi0 * x), opts);
        } else if constexpr (std::is_same_v<T, SievFir<S>>) {
          auto ev = realize(v, shift);
          VecX<S> y = apply_recursive(FilterSpec<S>(ev), shift, x, opts);
          return VecX<S>(y + realize_order0(v, shift) * x);
        } else if constexpr (std::is_same_v<T, SicevFir<S>>) {
          auto cev = realize(v, shift);
          return apply_recursive(FilterSpec<S>(cev), shift, x, opts);
        } else {  // Sieva1
          auto arma = realize(v, shift);
          return apply_recursive(FilterSpec<S>(arma), shift, x, opts);
        }
      },
      f);
}

}  // namespace gfev
