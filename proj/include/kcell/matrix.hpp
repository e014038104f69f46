#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "kcell/ring.hpp"

namespace kcell {

/// Dense exact matrix over a Ring. Entries are arbitrary-precision integers;
/// over F_p they are kept reduced into [0, p).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, Ring ring = Ring::integers());
  Matrix(Ring ring, std::initializer_list<std::initializer_list<long>> rows);
  static Matrix from_rows(Ring ring, const std::vector<std::vector<long>>& rows, std::size_t cols_if_empty = 0);
  static Matrix identity(std::size_t n, Ring ring = Ring::integers());
  static Matrix zero(std::size_t rows, std::size_t cols, Ring ring = Ring::integers()) { return Matrix(rows, cols, ring); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Ring ring() const { return ring_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, const Integer& v) {
    Integer& e = data_[i * cols_ + j];
    e = v;
    ring_.normalize(e);
  }

  /// Reinterpret the entries in another ring (reducing mod p when needed).
  Matrix over(Ring ring) const;

  Matrix transpose() const;
  Matrix column(std::size_t j) const;
  std::vector<Integer> column_vector(std::size_t j) const;
  std::vector<Integer> row_vector(std::size_t i) const;
  Matrix select_columns(const std::vector<std::size_t>& idx) const;
  Matrix select_rows(const std::vector<std::size_t>& idx) const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& m);

  bool is_zero() const;
  bool is_identity() const;
  bool operator==(const Matrix& other) const;

  Matrix operator*(const Matrix& other) const;
  Matrix operator+(const Matrix& other) const;
  Matrix operator-(const Matrix& other) const;
  Matrix operator-() const;
  Matrix scaled(const Integer& s) const;
  Matrix pow(unsigned e) const;

  static Matrix column_from(Ring ring, const std::vector<Integer>& v);
  static Matrix hstack(const Matrix& a, const Matrix& b);
  static Matrix vstack(const Matrix& a, const Matrix& b);
  static Matrix block_diag(const Matrix& a, const Matrix& b);
  static Matrix hstack_all(const std::vector<Matrix>& parts, std::size_t rows, Ring ring);

  std::vector<std::vector<long>> to_rows() const;
  std::string to_string() const;

  const std::vector<Integer>& data() const { return data_; }

 private:
  void check_same(const Matrix& other, const char* op) const;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Ring ring_{};
  std::vector<Integer> data_;
};

}  // namespace kcell
