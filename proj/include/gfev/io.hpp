#pragma once

#include <string>
#include <vector>

#include "gfev/common.hpp"

namespace gfev {

// Full-precision decimal so determinism checks can compare bytes.
std::string format_number(double v);
std::string format_number(const Cplx& v);  // "re+imi" pair style: "re,im"

// Matrix Market coordinate format, general symmetry, real or complex field.
MatX<double> read_matrix_market(const std::string& path);
MatX<Cplx> read_matrix_market_complex(const std::string& path);
void write_matrix_market(const MatX<double>& m, const std::string& path);
void write_matrix_market(const MatX<Cplx>& m, const std::string& path);

// Signal CSV: one value per line (real) or "re,im" per line (complex).
VecX<double> read_signal_csv(const std::string& path);
VecX<Cplx> read_signal_csv_complex(const std::string& path);
void write_signal_csv(const VecX<double>& x, const std::string& path);
void write_signal_csv(const VecX<Cplx>& x, const std::string& path);

// Multi-column CSV of per-node observations (rows = samples, cols = nodes).
MatX<double> read_samples_csv(const std::string& path);

}  // namespace gfev
