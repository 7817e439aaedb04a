#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gfev {

using Real = double;
using Cplx = std::complex<double>;

template <class S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

enum class ErrorCode {
  unsupported_kind,
  defective_operator,
  degenerate_input,
  dimension_mismatch,
  divergent_filter,
  singular_mode,
  locality_violation,
  support_violation,
  invalid_argument,
  io_error,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

template <class S>
inline constexpr bool is_complex_v = false;
template <class T>
inline constexpr bool is_complex_v<std::complex<T>> = true;

inline double real_part(double x) { return x; }
inline double real_part(const Cplx& x) { return x.real(); }
inline double imag_part(double) { return 0.0; }
inline double imag_part(const Cplx& x) { return x.imag(); }

}  // namespace gfev
