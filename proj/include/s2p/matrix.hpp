#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "s2p/common.hpp"

namespace s2p {

using Vector = std::vector<double>;

// Dense row-major matrix of binary64 values. All protocol payloads and
// model state use this one representation; vectors travel as n x 1.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), elems_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> elems);

  static Matrix identity(std::size_t n);
  static Matrix column(const Vector& v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return elems_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return elems_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return elems_[r * cols_ + c]; }

  const std::vector<double>& elems() const { return elems_; }
  std::vector<double>& elems() { return elems_; }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool all_finite() const;
  void require_finite(const char* what) const;

  Vector as_vector() const;  // requires cols == 1

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> elems_;
};

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix mul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
void scale_inplace(Matrix& a, double s);
double max_abs(const Matrix& a);
double max_abs(const Vector& v);
bool all_finite(const Vector& v);

// Wire layout: two 32-bit little-endian unsigned dims, then the row-major
// elements as 64-bit IEEE-754 little-endian. Decode is bit-exact.
void encode_matrix(const Matrix& m, std::vector<uint8_t>& out);
Matrix decode_matrix(const uint8_t* data, std::size_t len, std::size_t* consumed);
std::vector<uint8_t> encode_matrices(const std::vector<Matrix>& ms);
std::vector<Matrix> decode_matrices(const std::vector<uint8_t>& buf);

}  // namespace s2p
