#include "s2p/matrix.hpp"

#include <cmath>
#include <cstring>
#include <utility>

namespace s2p {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> elems)
    : rows_(rows), cols_(cols), elems_(std::move(elems)) {
  require(elems_.size() == rows_ * cols_, "Matrix: element count != rows*cols");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(const Vector& v) {
  return Matrix(v.size(), 1, v);
}

bool Matrix::all_finite() const {
  for (double x : elems_)
    if (!std::isfinite(x)) return false;
  return true;
}

void Matrix::require_finite(const char* what) const {
  if (!all_finite()) throw std::invalid_argument(std::string(what) + ": non-finite element");
}

Vector Matrix::as_vector() const {
  require(cols_ == 1, "as_vector: matrix is not a column");
  return elems_;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "add: shape mismatch");
  Matrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) r.elems()[i] = a.elems()[i] + b.elems()[i];
  return r;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "sub: shape mismatch");
  Matrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) r.elems()[i] = a.elems()[i] - b.elems()[i];
  return r;
}

Matrix mul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "mul: inner dimension mismatch");
  Matrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = &b.elems()[k * b.cols()];
      double* rrow = &r.elems()[i * b.cols()];
      for (std::size_t j = 0; j < b.cols(); ++j) rrow[j] += aik * brow[j];
    }
  }
  return r;
}

Matrix transpose(const Matrix& a) {
  Matrix r(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
  return r;
}

void scale_inplace(Matrix& a, double s) {
  for (double& x : a.elems()) x *= s;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double x : a.elems()) m = std::max(m, std::fabs(x));
  return m;
}

double max_abs(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 24));
}

uint32_t get_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

}  // namespace

void encode_matrix(const Matrix& m, std::vector<uint8_t>& out) {
  put_u32(out, static_cast<uint32_t>(m.rows()));
  put_u32(out, static_cast<uint32_t>(m.cols()));
  std::size_t off = out.size();
  out.resize(off + m.size() * 8);
  for (std::size_t i = 0; i < m.size(); ++i) {
    uint64_t bits;
    std::memcpy(&bits, &m.elems()[i], 8);
    for (int b = 0; b < 8; ++b) out[off + i * 8 + b] = static_cast<uint8_t>(bits >> (8 * b));
  }
}

Matrix decode_matrix(const uint8_t* data, std::size_t len, std::size_t* consumed) {
  if (len < 8) throw TransportError("decode_matrix: truncated header");
  uint32_t rows = get_u32(data);
  uint32_t cols = get_u32(data + 4);
  std::size_t need = 8 + static_cast<std::size_t>(rows) * cols * 8;
  if (len < need) throw TransportError("decode_matrix: truncated payload");
  std::vector<double> elems(static_cast<std::size_t>(rows) * cols);
  for (std::size_t i = 0; i < elems.size(); ++i) {
    uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<uint64_t>(data[8 + i * 8 + b]) << (8 * b);
    std::memcpy(&elems[i], &bits, 8);
  }
  if (consumed) *consumed = need;
  return Matrix(rows, cols, std::move(elems));
}

std::vector<uint8_t> encode_matrices(const std::vector<Matrix>& ms) {
  std::vector<uint8_t> out;
  for (const Matrix& m : ms) encode_matrix(m, out);
  return out;
}

std::vector<Matrix> decode_matrices(const std::vector<uint8_t>& buf) {
  std::vector<Matrix> ms;
  std::size_t off = 0;
  while (off < buf.size()) {
    std::size_t used = 0;
    ms.push_back(decode_matrix(buf.data() + off, buf.size() - off, &used));
    off += used;
  }
  return ms;
}

}  // namespace s2p
