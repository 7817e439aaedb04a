#include "gfev/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace gfev {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_number(const Cplx& v) {
  return format_number(v.real()) + "," + format_number(v.imag());
}

namespace {

struct MmHeader {
  bool complex_field = false;
  bool symmetric = false;
  int rows = 0, cols = 0, nnz = 0;
};

MmHeader read_mm_header(std::ifstream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    fail(ErrorCode::io_error, "missing MatrixMarket banner in " + path);
  MmHeader h;
  h.complex_field = line.find("complex") != std::string::npos;
  h.symmetric = line.find("symmetric") != std::string::npos;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    if (!(ls >> h.rows >> h.cols >> h.nnz))
      fail(ErrorCode::io_error, "malformed size line in " + path);
    return h;
  }
  fail(ErrorCode::io_error, "missing size line in " + path);
}

}  // namespace

MatX<double> read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path);
  MmHeader h = read_mm_header(in, path);
  if (h.complex_field)
    fail(ErrorCode::io_error, "complex matrix read as real: " + path);
  MatX<double> m = MatX<double>::Zero(h.rows, h.cols);
  for (int k = 0; k < h.nnz; ++k) {
    int i, j;
    double v;
    if (!(in >> i >> j >> v)) fail(ErrorCode::io_error, "truncated " + path);
    m(i - 1, j - 1) = v;
    if (h.symmetric && i != j) m(j - 1, i - 1) = v;
  }
  return m;
}

MatX<Cplx> read_matrix_market_complex(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path);
  MmHeader h = read_mm_header(in, path);
  MatX<Cplx> m = MatX<Cplx>::Zero(h.rows, h.cols);
  for (int k = 0; k < h.nnz; ++k) {
    int i, j;
    double re, im = 0.0;
    if (h.complex_field) {
      if (!(in >> i >> j >> re >> im))
        fail(ErrorCode::io_error, "truncated " + path);
    } else if (!(in >> i >> j >> re)) {
      fail(ErrorCode::io_error, "truncated " + path);
    }
    m(i - 1, j - 1) = Cplx(re, im);
    if (h.symmetric && i != j) m(j - 1, i - 1) = Cplx(re, im);
  }
  return m;
}

void write_matrix_market(const MatX<double>& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot open " + path);
  int nnz = 0;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) ++nnz;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << " " << m.cols() << " " << nnz << "\n";
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0)
        out << i + 1 << " " << j + 1 << " " << format_number(m(i, j)) << "\n";
}

void write_matrix_market(const MatX<Cplx>& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot open " + path);
  int nnz = 0;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (m(i, j) != Cplx(0.0, 0.0)) ++nnz;
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << m.rows() << " " << m.cols() << " " << nnz << "\n";
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (m(i, j) != Cplx(0.0, 0.0))
        out << i + 1 << " " << j + 1 << " " << format_number(m(i, j).real())
            << " " << format_number(m(i, j).imag()) << "\n";
}

VecX<double> read_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path);
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    vals.push_back(std::stod(line));
  }
  return Eigen::Map<VecX<double>>(vals.data(), vals.size());
}

VecX<Cplx> read_signal_csv_complex(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path);
  std::vector<Cplx> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    double re = std::stod(line.substr(0, comma));
    double im = comma == std::string::npos ? 0.0 : std::stod(line.substr(comma + 1));
    vals.push_back(Cplx(re, im));
  }
  return Eigen::Map<VecX<Cplx>>(vals.data(), vals.size());
}

void write_signal_csv(const VecX<double>& x, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot open " + path);
  for (Eigen::Index i = 0; i < x.size(); ++i) out << format_number(x(i)) << "\n";
}

void write_signal_csv(const VecX<Cplx>& x, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot open " + path);
  for (Eigen::Index i = 0; i < x.size(); ++i) out << format_number(x(i)) << "\n";
}

MatX<double> read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorCode::io_error, "ragged CSV in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::io_error, "empty CSV " + path);
  MatX<double> m(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace gfev
