#pragma once

#include <random>
#include <vector>

#include <Eigen/QR>

#include "gfev/common.hpp"
#include "gfev/filters.hpp"
#include "gfev/nullspace.hpp"
#include "gfev/shift.hpp"

namespace gfev {

template <class S>
double nse(const MatX<S>& target, const MatX<S>& h) {
  double tnorm = target.squaredNorm();
  if (tnorm == 0.0) fail(ErrorCode::degenerate_input, "zero target operator");
  return (target - h).squaredNorm() / tnorm;
}

template <class S>
double nse(const VecX<S>& target, const VecX<S>& h) {
  double tnorm = target.squaredNorm();
  if (tnorm == 0.0) fail(ErrorCode::degenerate_input, "zero target response");
  return (target - h).squaredNorm() / tnorm;
}

struct DesignReport {
  double nse = 0.0;
  double modified_nse = 0.0;          // Prony-style designs only
  double margin = 0.0;                // delta - achieved norm (ARMA designs)
  int iterations = 0;
  bool rank_deficient = false;
  std::vector<double> objective_trace;  // BCD only, nonincreasing
};

// ---------------------------------------------------------------------------
// Least-squares plumbing. Columns are rescaled to unit norm before the solve;
// a trace-scaled ridge kicks in only when the system is rank-deficient.
// ---------------------------------------------------------------------------

namespace detail {

template <class S>
VecX<S> solve_lstsq(const MatX<S>& a, const VecX<S>& b,
                    bool* rank_deficient = nullptr) {
  const Eigen::Index m = a.cols();
  VecX<double> scale(m);
  MatX<S> as = a;
  for (Eigen::Index c = 0; c < m; ++c) {
    double nrm = as.col(c).norm();
    scale(c) = nrm > 0.0 ? nrm : 1.0;
    as.col(c) /= S(scale(c));
  }
  Eigen::CompleteOrthogonalDecomposition<MatX<S>> cod(as);
  bool deficient = cod.rank() < m;
  if (rank_deficient) *rank_deficient = deficient;
  VecX<S> x;
  if (!deficient) {
    x = cod.solve(b);
  } else {
    MatX<S> g = as.adjoint() * as;
    double ridge = 1e-10 * real_part(S(g.trace())) / std::max<double>(m, 1);
    g.diagonal().array() += S(ridge);
    x = g.ldlt().solve(MatX<S>(as.adjoint() * b));
  }
  for (Eigen::Index c = 0; c < m; ++c) x(c) /= S(scale(c));
  return x;
}

// Iterative soft-thresholding for the optional l1-penalized solve.
template <class S>
VecX<S> solve_ista(const MatX<S>& a, const VecX<S>& b, double l1_weight,
                   int budget = 500) {
  double lip = spectral_norm(a);
  lip = lip * lip;
  if (lip == 0.0) return VecX<S>::Zero(a.cols());
  const double step = 1.0 / lip;
  VecX<S> x = solve_lstsq(a, b);
  for (int it = 0; it < budget; ++it) {
    VecX<S> grad = a.adjoint() * (a * x - b);
    x -= S(step) * grad;
    for (Eigen::Index c = 0; c < x.size(); ++c) {
      double mag = std::abs(x(c));
      double shrunk = std::max(0.0, mag - l1_weight * step);
      x(c) = mag > 0.0 ? x(c) * S(shrunk / mag) : S(0);
    }
  }
  return x;
}

inline std::vector<int> allowed_cols_of_row(const SupportPattern& supp, int i) {
  std::vector<int> cols;
  for (int j = 0; j < supp.n; ++j)
    if (supp.allowed(i, j)) cols.push_back(j);
  return cols;
}

inline std::vector<int> allowed_rows_of_col(const SupportPattern& supp, int j) {
  std::vector<int> rows;
  for (int i = 0; i < supp.n; ++i)
    if (supp.allowed(i, j)) rows.push_back(i);
  return rows;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Classical FIR: modal-domain Vandermonde LS, fit in a rescaled variable and
// expanded back to monomial taps.
// ---------------------------------------------------------------------------

inline ClassicalFir<double> design_classical_ls(const VecX<double>& lambda,
                                                const VecX<double>& target,
                                                int order,
                                                bool include_constant = true) {
  if (order < 0) fail(ErrorCode::invalid_argument, "order must be >= 0");
  if (lambda.size() != target.size())
    fail(ErrorCode::dimension_mismatch, "lambda/target length mismatch");
  const Eigen::Index n = lambda.size();
  double lo = lambda.minCoeff(), hi = lambda.maxCoeff();
  double center = 0.5 * (lo + hi);
  double radius = 0.5 * (hi - lo);
  if (radius == 0.0) radius = 1.0;
  VecX<double> t = (lambda.array() - center) / radius;

  const int k0 = include_constant ? 0 : 1;
  const int ncoef = order + 1 - k0;
  if (ncoef <= 0) fail(ErrorCode::invalid_argument, "no free coefficients");
  MatX<double> a(n, ncoef);
  VecX<double> pow = VecX<double>::Ones(n);
  for (int k = 0; k <= order; ++k) {
    if (k >= k0) a.col(k - k0) = pow;
    pow = pow.cwiseProduct(t);
  }
  VecX<double> c = detail::solve_lstsq(a, target);

  // expand sum_k c_k ((lambda - center)/radius)^k into monomial taps
  std::vector<double> taps(order + 1, 0.0);
  std::vector<double> base = {1.0};  // ((lambda-center)/radius)^k coefficients
  for (int k = 0; k <= order; ++k) {
    if (k >= k0)
      for (size_t m = 0; m < base.size(); ++m) taps[m] += c(k - k0) * base[m];
    std::vector<double> next(base.size() + 1, 0.0);
    for (size_t m = 0; m < base.size(); ++m) {
      next[m] += base[m] * (-center / radius);
      next[m + 1] += base[m] / radius;
    }
    base = std::move(next);
  }
  return {taps};
}

// ---------------------------------------------------------------------------
// CEV / NV least squares. The Frobenius objective separates across rows of
// the coefficient matrices, so each row is an independent small LS problem;
// build_cev_system below assembles the equivalent stacked regression for
// cross-checks at small N.
// ---------------------------------------------------------------------------

struct CevOptions {
  double l1_weight = 0.0;  // 0 disables the sparsifying penalty
};

template <class S>
struct DesignSystem {
  MatX<S> regression_matrix;                // Psi, N^2 x (nnz * K)
  VecX<S> rhs;                              // vec(H_target)
  std::vector<std::pair<int, std::pair<int, int>>> column_map;  // (k, (i,j))
};

template <class S>
DesignSystem<S> build_cev_system(const ShiftOperator<S>& shift,
                                 const SupportPattern& supp,
                                 const MatX<S>& target, int order) {
  const int n = shift.n();
  DesignSystem<S> sys;
  std::vector<MatX<S>> pow = {MatX<S>::Identity(n, n)};
  for (int k = 1; k < order; ++k) pow.push_back(shift.matrix * pow.back());
  sys.regression_matrix = MatX<S>::Zero(
      static_cast<Eigen::Index>(n) * n,
      static_cast<Eigen::Index>(supp.allowed_indices.size()) * order);
  Eigen::Index col = 0;
  for (int k = 0; k < order; ++k)
    for (const auto& [i, j] : supp.allowed_indices) {
      // vec(E_ij S^k): entry (i, q) holds S^k[j, q]
      for (int q = 0; q < n; ++q)
        sys.regression_matrix(static_cast<Eigen::Index>(q) * n + i, col) =
            pow[k](j, q);
      sys.column_map.push_back({k + 1, {i, j}});
      ++col;
    }
  sys.rhs = VecX<S>(Eigen::Map<const VecX<S>>(target.data(), target.size()));
  return sys;
}

template <class S>
std::pair<ConstrainedEvFir<S>, DesignReport> design_cev_ls(
    const ShiftOperator<S>& shift, const MatX<S>& target, int order,
    const CevOptions& opts = {}) {
  if (order < 1) fail(ErrorCode::invalid_argument, "CEV needs K >= 1");
  const int n = shift.n();
  if (target.rows() != n || target.cols() != n)
    fail(ErrorCode::dimension_mismatch, "target shape != shift shape");
  SupportPattern supp = support_pattern(shift);
  std::vector<MatX<S>> pow = {MatX<S>::Identity(n, n)};
  for (int k = 1; k < order; ++k) pow.push_back(shift.matrix * pow.back());

  std::vector<MatX<S>> mats(order, MatX<S>::Zero(n, n));
  bool any_deficient = false;
#ifdef GFEV_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int i = 0; i < n; ++i) {
    auto cols = detail::allowed_cols_of_row(supp, i);
    const int nvars = static_cast<int>(cols.size()) * order;
    MatX<S> a(n, nvars);
    for (int k = 0; k < order; ++k)
      for (size_t c = 0; c < cols.size(); ++c)
        a.col(static_cast<Eigen::Index>(k) * cols.size() + c) =
            pow[k].row(cols[c]).transpose();
    VecX<S> b = target.row(i).transpose();
    bool deficient = false;
    VecX<S> theta = opts.l1_weight > 0.0
                        ? detail::solve_ista(a, b, opts.l1_weight)
                        : detail::solve_lstsq(a, b, &deficient);
    for (int k = 0; k < order; ++k)
      for (size_t c = 0; c < cols.size(); ++c)
        mats[k](i, cols[c]) = theta(static_cast<Eigen::Index>(k) * cols.size() + c);
    if (deficient) {
#ifdef GFEV_HAVE_OPENMP
#pragma omp critical
#endif
      any_deficient = true;
    }
  }
  ConstrainedEvFir<S> fit{std::move(mats)};
  DesignReport report;
  report.nse = nse(target, dense_matrix(fit, shift));
  report.rank_deficient = any_deficient;
  report.iterations = 1;
  return {std::move(fit), report};
}

template <class S>
std::pair<NodeVariantFir<S>, DesignReport> design_nv_ls(
    const ShiftOperator<S>& shift, const MatX<S>& target, int order) {
  if (order < 0) fail(ErrorCode::invalid_argument, "NV needs K >= 0");
  const int n = shift.n();
  if (target.rows() != n || target.cols() != n)
    fail(ErrorCode::dimension_mismatch, "target shape != shift shape");
  std::vector<MatX<S>> pow = {MatX<S>::Identity(n, n)};
  for (int k = 1; k <= order; ++k) pow.push_back(shift.matrix * pow.back());

  std::vector<VecX<S>> taps(order + 1, VecX<S>::Zero(n));
#ifdef GFEV_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int i = 0; i < n; ++i) {
    MatX<S> a(n, order + 1);
    for (int k = 0; k <= order; ++k) a.col(k) = pow[k].row(i).transpose();
    VecX<S> theta = detail::solve_lstsq(a, VecX<S>(target.row(i).transpose()));
    for (int k = 0; k <= order; ++k) taps[k](i) = theta(k);
  }
  NodeVariantFir<S> fit{std::move(taps)};
  DesignReport report;
  report.nse = nse(target, dense_matrix(fit, shift));
  report.iterations = 1;
  return {std::move(fit), report};
}

// ---------------------------------------------------------------------------
// SICEV least squares: h = M alpha with M = [diag(lambda^0) B, ...,
// diag(lambda^{K-1}) B].
// ---------------------------------------------------------------------------

template <class S>
std::pair<SicevFir<S>, DesignReport> design_sicev_ls(
    const NullspaceBasis<S>& basis, const VecX<S>& lambda,
    const VecX<S>& target, int order) {
  if (order < 1) fail(ErrorCode::invalid_argument, "SICEV needs K >= 1");
  const Eigen::Index n = basis.n();
  if (lambda.size() != n || target.size() != n)
    fail(ErrorCode::dimension_mismatch, "lambda/target length != basis rows");
  const int d = basis.dim;
  MatX<S> m(n, static_cast<Eigen::Index>(d) * order);
  VecX<S> pow = VecX<S>::Ones(n);
  for (int k = 0; k < order; ++k) {
    m.middleCols(static_cast<Eigen::Index>(k) * d, d) =
        pow.asDiagonal() * basis.basis;
    pow = pow.cwiseProduct(lambda);
  }
  DesignReport report;
  VecX<S> alpha = detail::solve_lstsq(m, target, &report.rank_deficient);
  SicevFir<S> fit;
  fit.basis = basis.basis;
  for (int k = 0; k < order; ++k)
    fit.alphas.push_back(alpha.segment(static_cast<Eigen::Index>(k) * d, d));
  report.nse = nse(target, VecX<S>(m * alpha));
  report.iterations = 1;
  return {std::move(fit), report};
}

// ---------------------------------------------------------------------------
// Block-coordinate descent for the general EV FIR fit. Each block problem
// min || R - C Phi L ||_F over the supported entries of Phi is solved through
// its normal equations, assembled from the Gram identity
// <C E_ij L, C E_pq L> = (C^T C)[i,p] * (L L^T)[j,q].
// ---------------------------------------------------------------------------

enum class BcdInit { classical, random, given };

struct BcdOptions {
  BcdInit init = BcdInit::classical;
  int sweeps = 20;
  double tol = 1e-9;
  std::uint64_t seed = 0;
  int starts = 5;  // multi-start for the SIEV design; EV uses a single start
};

namespace detail {

// Constant-free classical taps (c_1..c_K) embedded as Phi_1 = c_1 S,
// Phi_k = (c_k / c_{k-1}) S. The EV product form has no order-0 term, so the
// embedded polynomial omits the constant; near-zero taps are floored to keep
// the telescoping ratios finite.
inline std::vector<MatX<double>> classical_ev_init(
    const ShiftOperator<double>& shift, const MatX<double>& target,
    int order) {
  auto dec = eigendecompose(shift);
  VecX<double> htarget(dec.n());
  // modal target: diagonal of U^{-1} H U
  MatX<double> proj = dec.inv_eigvecs * target * dec.eigvecs;
  htarget = proj.diagonal();
  ClassicalFir<double> cls =
      design_classical_ls(dec.eigvals, htarget, order, /*include_constant=*/false);
  std::vector<double> c(cls.taps.begin() + 1, cls.taps.end());
  double cmax = 0.0;
  for (double v : c) cmax = std::max(cmax, std::abs(v));
  if (cmax == 0.0) cmax = 1.0;
  for (double& v : c)
    if (std::abs(v) < 1e-10 * cmax) v = (v < 0.0 ? -1e-10 : 1e-10) * cmax;
  std::vector<MatX<double>> mats;
  mats.push_back(c[0] * shift.matrix);
  for (int k = 1; k < order; ++k)
    mats.push_back((c[k] / c[k - 1]) * shift.matrix);
  return mats;
}

inline MatX<double> random_supported(const SupportPattern& supp,
                                     std::mt19937_64& rng, double norm_goal) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatX<double> m = MatX<double>::Zero(supp.n, supp.n);
  for (const auto& [i, j] : supp.allowed_indices) m(i, j) = gauss(rng);
  double nrm = spectral_norm(m);
  if (nrm > 0.0) m *= norm_goal / nrm;
  return m;
}

}  // namespace detail

inline std::pair<EdgeVariantFir<double>, DesignReport> design_ev_bcd(
    const ShiftOperator<double>& shift, const MatX<double>& target, int order,
    const BcdOptions& opts = {},
    const std::vector<MatX<double>>* given_init = nullptr) {
  if (order < 1) fail(ErrorCode::invalid_argument, "EV BCD needs K >= 1");
  const int n = shift.n();
  SupportPattern supp = support_pattern(shift);

  std::vector<MatX<double>> mats;
  switch (opts.init) {
    case BcdInit::classical:
      mats = detail::classical_ev_init(shift, target, order);
      break;
    case BcdInit::random: {
      std::mt19937_64 rng(opts.seed);
      for (int k = 0; k < order; ++k)
        mats.push_back(detail::random_supported(supp, rng, 0.5));
      break;
    }
    case BcdInit::given:
      if (!given_init || static_cast<int>(given_init->size()) != order)
        fail(ErrorCode::invalid_argument, "given init has wrong order");
      mats = *given_init;
      for (const auto& m : mats) check_support(m, supp, "EV BCD init");
      break;
  }

  auto objective = [&]() {
    return (target - dense_matrix(EdgeVariantFir<double>{mats}, shift))
        .squaredNorm();
  };

  DesignReport report;
  double obj = objective();
  report.objective_trace.push_back(obj);

  for (int sweep = 0; sweep < opts.sweeps; ++sweep) {
    double sweep_start = obj;
    for (int t = 0; t < order; ++t) {
      MatX<double> left = MatX<double>::Identity(n, n);
      for (int j = 0; j < t; ++j) left = mats[j] * left;  // Phi_{t:1}
      MatX<double> resid = target;
      MatX<double> partial = MatX<double>::Identity(n, n);
      for (int k = 0; k < t; ++k) {
        partial = mats[k] * partial;
        resid -= partial;
      }
      MatX<double> csum = MatX<double>::Identity(n, n);
      MatX<double> cprod = MatX<double>::Identity(n, n);
      for (int k = t + 1; k < order; ++k) {
        cprod = mats[k] * cprod;
        csum += cprod;
      }
      MatX<double> ctc = csum.transpose() * csum;
      MatX<double> llt = left * left.transpose();
      MatX<double> rhs_mat = csum.transpose() * resid * left.transpose();

      const auto& allowed = supp.allowed_indices;
      const int nvars = static_cast<int>(allowed.size());
      MatX<double> gram(nvars, nvars);
      VecX<double> rhs(nvars);
      for (int a = 0; a < nvars; ++a) {
        auto [i, j] = allowed[a];
        rhs(a) = rhs_mat(i, j);
        for (int b = 0; b < nvars; ++b) {
          auto [p, q] = allowed[b];
          gram(a, b) = ctc(i, p) * llt(j, q);
        }
      }
      double ridge = 1e-12 * gram.trace() / std::max(nvars, 1);
      gram.diagonal().array() += ridge;
      VecX<double> sol = gram.ldlt().solve(rhs);

      MatX<double> candidate = MatX<double>::Zero(n, n);
      for (int a = 0; a < nvars; ++a)
        candidate(allowed[a].first, allowed[a].second) = sol(a);
      MatX<double> prev = mats[t];
      mats[t] = candidate;
      double cand_obj = objective();
      if (cand_obj <= obj) {
        obj = cand_obj;
      } else {
        mats[t] = prev;  // block solve degraded by numerics; keep the old point
      }
      report.objective_trace.push_back(obj);
    }
    ++report.iterations;
    if (sweep_start - obj <= opts.tol * std::max(sweep_start, 1e-300)) break;
  }

  EdgeVariantFir<double> fit{std::move(mats)};
  report.nse = nse(target, dense_matrix(fit, shift));
  return {std::move(fit), report};
}

// ---------------------------------------------------------------------------
// SIEV BCD over the basis-expansion blocks alpha_0 .. alpha_K; each block is
// a weighted LS problem since the response is linear in any single block.
// ---------------------------------------------------------------------------

namespace detail {

inline double siev_objective(const MatX<double>& beta,  // n x K, b_i^T alpha_j
                             const VecX<double>& beta0,
                             const VecX<double>& target) {
  const Eigen::Index n = target.size();
  double obj = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double partial = 1.0, h = beta0(i);
    for (Eigen::Index k = 0; k < beta.cols(); ++k) {
      partial *= beta(i, k);
      h += partial;
    }
    double r = target(i) - h;
    obj += r * r;
  }
  return obj;
}

}  // namespace detail

inline std::pair<SievFir<double>, DesignReport> design_siev_bcd(
    const NullspaceBasis<double>& basis, const VecX<double>& lambda,
    const VecX<double>& target, int order, const BcdOptions& opts = {},
    bool use_alpha0 = true) {
  if (order < 1) fail(ErrorCode::invalid_argument, "SIEV BCD needs K >= 1");
  const Eigen::Index n = basis.n();
  const int d = basis.dim;
  if (target.size() != n)
    fail(ErrorCode::dimension_mismatch, "target length != basis rows");

  const MatX<double>& b = basis.basis;

  auto run = [&](std::vector<VecX<double>> alphas, VecX<double> alpha0,
                 DesignReport& rep) {
    MatX<double> beta(n, order);
    for (int k = 0; k < order; ++k) beta.col(k) = b * alphas[k];
    VecX<double> beta0 = use_alpha0 && alpha0.size() > 0
                             ? VecX<double>(b * alpha0)
                             : VecX<double>(VecX<double>::Zero(n));
    double obj = detail::siev_objective(beta, beta0, target);
    rep.objective_trace.push_back(obj);
    const int first_block = use_alpha0 ? 0 : 1;
    for (int sweep = 0; sweep < opts.sweeps; ++sweep) {
      double sweep_start = obj;
      for (int m = first_block; m <= order; ++m) {
        MatX<double> a(n, d);
        VecX<double> y(n);
        if (m == 0) {
          for (Eigen::Index i = 0; i < n; ++i) {
            double s = 0.0, partial = 1.0;
            for (int k = 0; k < order; ++k) {
              partial *= beta(i, k);
              s += partial;
            }
            y(i) = target(i) - s;
          }
          a = b;
        } else {
          for (Eigen::Index i = 0; i < n; ++i) {
            double prefix = 1.0;  // prod_{j<m} beta_j
            double c = beta0(i);
            double partial = 1.0;
            for (int k = 1; k < m; ++k) {
              partial *= beta(i, k - 1);
              c += partial;
            }
            prefix = partial;
            double w = 0.0, suffix = 1.0;  // sum over k >= m
            for (int k = m; k <= order; ++k) {
              if (k > m) suffix *= beta(i, k - 1);
              w += prefix * suffix;
            }
            y(i) = target(i) - c;
            a.row(i) = w * b.row(i);
          }
        }
        VecX<double> sol = detail::solve_lstsq(a, y);
        // accept only non-degrading updates so the trace stays monotone
        if (m == 0) {
          VecX<double> old = alpha0;
          alpha0 = sol;
          VecX<double> nb0 = b * alpha0;
          double cand = detail::siev_objective(beta, nb0, target);
          if (cand <= obj) {
            beta0 = nb0;
            obj = cand;
          } else {
            alpha0 = old;
          }
        } else {
          VecX<double> old = alphas[m - 1];
          alphas[m - 1] = sol;
          MatX<double> nbeta = beta;
          nbeta.col(m - 1) = b * sol;
          double cand = detail::siev_objective(nbeta, beta0, target);
          if (cand <= obj) {
            beta.col(m - 1) = nbeta.col(m - 1);
            obj = cand;
          } else {
            alphas[m - 1] = old;
          }
        }
        rep.objective_trace.push_back(obj);
      }
      ++rep.iterations;
      if (sweep_start - obj <= opts.tol * std::max(sweep_start, 1e-300)) break;
    }
    SievFir<double> fit;
    fit.basis = b;
    fit.alphas = std::move(alphas);
    if (use_alpha0) fit.alpha0 = alpha0;
    return std::make_pair(std::move(fit), obj);
  };

  // start 0: requested init; remaining starts: random coefficients
  auto classical_start = [&]() {
    ClassicalFir<double> cls =
        design_classical_ls(lambda, target, order, use_alpha0);
    std::vector<double> c(cls.taps.begin() + 1, cls.taps.end());
    double cmax = 0.0;
    for (double v : c) cmax = std::max(cmax, std::abs(v));
    if (cmax == 0.0) cmax = 1.0;
    for (double& v : c)
      if (std::abs(v) < 1e-10 * cmax) v = (v < 0.0 ? -1e-10 : 1e-10) * cmax;
    std::vector<VecX<double>> alphas;
    for (int k = 0; k < order; ++k) {
      double ratio = k == 0 ? c[0] : c[k] / c[k - 1];
      alphas.push_back(detail::solve_lstsq(b, VecX<double>(ratio * lambda)));
    }
    VecX<double> alpha0 = use_alpha0
                              ? VecX<double>(detail::solve_lstsq(
                                    b, VecX<double>(cls.taps[0] *
                                                    VecX<double>::Ones(n))))
                              : VecX<double>();
    return std::make_pair(std::move(alphas), std::move(alpha0));
  };

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_start = [&]() {
    std::vector<VecX<double>> alphas;
    for (int k = 0; k < order; ++k) {
      VecX<double> al(d);
      for (int c = 0; c < d; ++c) al(c) = gauss(rng);
      double mag = (b * al).cwiseAbs().maxCoeff();
      if (mag > 0.0) al *= 0.8 / mag;
      alphas.push_back(al);
    }
    VecX<double> alpha0;
    if (use_alpha0) {
      alpha0 = VecX<double>(d);
      for (int c = 0; c < d; ++c) alpha0(c) = gauss(rng);
    }
    return std::make_pair(std::move(alphas), std::move(alpha0));
  };

  std::pair<SievFir<double>, double> best;
  DesignReport best_rep;
  bool have_best = false;
  const int starts = std::max(1, opts.starts);
  for (int s = 0; s < starts; ++s) {
    DesignReport rep;
    std::pair<std::vector<VecX<double>>, VecX<double>> init;
    if (s == 0 && opts.init == BcdInit::classical)
      init = classical_start();
    else
      init = random_start();
    auto result = run(std::move(init.first), std::move(init.second), rep);
    if (!have_best || result.second < best.second) {
      best = std::move(result);
      best_rep = std::move(rep);
      have_best = true;
    }
  }
  best_rep.nse = best.second / target.squaredNorm();
  return {std::move(best.first), best_rep};
}

// ---------------------------------------------------------------------------
// Prony-style two-step ARMA designs.
// ---------------------------------------------------------------------------

/// Step 1 minimizes the modified error ||H - Phi_1 H - Phi_0||_F (separable
/// across rows), then scales Phi_1 onto the feasible ball ||Phi_1||_2 <= delta.
/// Step 2 refits Phi_0 against the true error with Phi_1 fixed (separable
/// across columns).
template <class S>
std::pair<EvArma1<S>, DesignReport> design_ev_arma1(
    const ShiftOperator<S>& shift, const MatX<S>& target, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    fail(ErrorCode::invalid_argument, "delta must lie in (0, 1)");
  const int n = shift.n();
  if (target.rows() != n || target.cols() != n)
    fail(ErrorCode::dimension_mismatch, "target shape != shift shape");
  SupportPattern supp = support_pattern(shift);

  MatX<S> phi0 = MatX<S>::Zero(n, n), phi1 = MatX<S>::Zero(n, n);
#ifdef GFEV_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int i = 0; i < n; ++i) {
    auto cols = detail::allowed_cols_of_row(supp, i);
    const int m = static_cast<int>(cols.size());
    MatX<S> a = MatX<S>::Zero(n, 2 * m);
    for (int c = 0; c < m; ++c) {
      a.col(c) = target.row(cols[c]).transpose();  // Phi_1 block
      a(cols[c], m + c) = S(1);                    // Phi_0 block
    }
    VecX<S> theta = detail::solve_lstsq(a, VecX<S>(target.row(i).transpose()));
    for (int c = 0; c < m; ++c) {
      phi1(i, cols[c]) = theta(c);
      phi0(i, cols[c]) = theta(m + c);
    }
  }

  double norm1 = spectral_norm(phi1);
  if (norm1 > delta) phi1 *= S(delta / norm1);

  DesignReport report;
  report.modified_nse =
      (target - phi1 * target - phi0).squaredNorm() / target.squaredNorm();

  // step 2: true-error refit of Phi_0, column-separable in G = (I-Phi_1)^{-1}
  MatX<S> g = (MatX<S>::Identity(n, n) - phi1)
                  .partialPivLu()
                  .solve(MatX<S>::Identity(n, n));
#ifdef GFEV_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int j = 0; j < n; ++j) {
    auto rows = detail::allowed_rows_of_col(supp, j);
    MatX<S> a(n, rows.size());
    for (size_t r = 0; r < rows.size(); ++r) a.col(r) = g.col(rows[r]);
    VecX<S> theta = detail::solve_lstsq(a, VecX<S>(target.col(j)));
    for (size_t r = 0; r < rows.size(); ++r) phi0(rows[r], j) = theta(r);
  }

  EvArma1<S> fit{std::move(phi0), std::move(phi1)};
  report.nse = nse(target, dense_matrix(fit, shift));
  report.margin = delta - spectral_norm(fit.phi1);
  report.iterations = 2;
  return {std::move(fit), report};
}

template <class S>
std::pair<Sieva1<S>, DesignReport> design_sieva1(const NullspaceBasis<S>& basis,
                                                 const VecX<S>& lambda,
                                                 const VecX<S>& target,
                                                 double delta) {
  (void)lambda;  // the modal system depends on the target response only
  if (!(delta > 0.0 && delta < 1.0))
    fail(ErrorCode::invalid_argument, "delta must lie in (0, 1)");
  const Eigen::Index n = basis.n();
  if (target.size() != n)
    fail(ErrorCode::dimension_mismatch, "target length != basis rows");
  const int d = basis.dim;
  const MatX<S>& b = basis.basis;

  MatX<S> psi(n, 2 * d);
  psi.leftCols(d) = b;
  psi.rightCols(d) = target.asDiagonal() * b;
  VecX<S> bar = detail::solve_lstsq(psi, target);
  VecX<S> alpha0 = bar.head(d), alpha1 = bar.tail(d);

  double inf_norm = (b * alpha1).cwiseAbs().maxCoeff();
  if (inf_norm > delta) alpha1 *= S(delta / inf_norm);

  DesignReport report;
  report.modified_nse =
      (target - b * alpha0 -
       VecX<S>(target.asDiagonal() * (b * alpha1)))
          .squaredNorm() /
      target.squaredNorm();

  // step 2: weighted LS refit of alpha_0 against the true modal error
  VecX<S> den = VecX<S>::Ones(n) - b * alpha1;
  MatX<S> a(n, d);
  for (Eigen::Index i = 0; i < n; ++i) a.row(i) = b.row(i) / den(i);
  alpha0 = detail::solve_lstsq(a, target);

  Sieva1<S> fit{alpha0, alpha1, b};
  report.nse = nse(target, VecX<S>(modal_response(fit)));
  report.margin = delta - (b * alpha1).cwiseAbs().maxCoeff();
  report.iterations = 2;
  return {std::move(fit), report};
}

}  // namespace gfev
