#include "kcell/matrix.hpp"

#include <sstream>

#include "kcell/errors.hpp"
#include "kcell/kernels.hpp"

namespace kcell {

Matrix::Matrix(std::size_t rows, std::size_t cols, Ring ring)
    : rows_(rows), cols_(cols), ring_(ring), data_(rows * cols) {}

Matrix::Matrix(Ring ring, std::initializer_list<std::initializer_list<long>> rows) : ring_(ring) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, ErrorCode::InvalidInput, "ragged matrix literal");
    for (long v : r) {
      Integer x = v;
      ring_.normalize(x);
      data_.push_back(x);
    }
  }
}

Matrix Matrix::from_rows(Ring ring, const std::vector<std::vector<long>>& rows, std::size_t cols_if_empty) {
  Matrix m(rows.size(), rows.empty() ? cols_if_empty : rows[0].size(), ring);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == m.cols_, ErrorCode::InvalidInput, "ragged matrix rows");
    for (std::size_t j = 0; j < m.cols_; ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

Matrix Matrix::identity(std::size_t n, Ring ring) {
  Matrix m(n, n, ring);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Matrix Matrix::over(Ring ring) const {
  Matrix m = *this;
  m.ring_ = ring;
  for (auto& x : m.data_) ring.normalize(x);
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_, ring_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::column(std::size_t j) const { return block(0, j, rows_, 1); }

std::vector<Integer> Matrix::column_vector(std::size_t j) const {
  std::vector<Integer> v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

std::vector<Integer> Matrix::row_vector(std::size_t i) const {
  return std::vector<Integer>(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                              data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

Matrix Matrix::select_columns(const std::vector<std::size_t>& idx) const {
  Matrix m(rows_, idx.size(), ring_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) m(i, j) = (*this)(i, idx[j]);
  return m;
}

Matrix Matrix::select_rows(const std::vector<std::size_t>& idx) const {
  Matrix m(idx.size(), cols_, ring_);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(idx[i], j);
  return m;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  require(r0 + nr <= rows_ && c0 + nc <= cols_, ErrorCode::InvalidInput, "block out of range");
  Matrix m(nr, nc, ring_);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
  return m;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& m) {
  require(r0 + m.rows_ <= rows_ && c0 + m.cols_ <= cols_, ErrorCode::InvalidInput, "set_block out of range");
  for (std::size_t i = 0; i < m.rows_; ++i)
    for (std::size_t j = 0; j < m.cols_; ++j) set(r0 + i, c0 + j, m(i, j));
}

bool Matrix::is_zero() const {
  for (const auto& x : data_)
    if (x != 0) return false;
  return true;
}

bool Matrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(i, j) != (i == j ? 1 : 0)) return false;
  return true;
}

bool Matrix::operator==(const Matrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && ring_ == other.ring_ && data_ == other.data_;
}

void Matrix::check_same(const Matrix& other, const char* op) const {
  if (!(ring_ == other.ring_))
    fail(ErrorCode::CoefficientMismatch, std::string(op) + ": " + ring_.name() + " vs " + other.ring_.name());
}

Matrix Matrix::operator*(const Matrix& other) const {
  check_same(other, "multiply");
  require(cols_ == other.rows_, ErrorCode::InvalidInput,
          "multiply: shape " + std::to_string(rows_) + "x" + std::to_string(cols_) + " by " +
              std::to_string(other.rows_) + "x" + std::to_string(other.cols_));
  Matrix c(rows_, other.cols_, ring_);
  if (ring_.p != 0 && ring_.p < kernels::kMaxFastPrime) {
    std::vector<kernels::Word> a(data_.size()), b(other.data_.size()), out(rows_ * other.cols_);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = data_[i].get_ui();
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = other.data_[i].get_ui();
    kernels::fp_matmul(a.data(), b.data(), out.data(), rows_, cols_, other.cols_, ring_.p, kernels::default_exec());
    for (std::size_t i = 0; i < out.size(); ++i) c.data_[i] = static_cast<unsigned long>(out[i]);
    return c;
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t t = 0; t < cols_; ++t) {
      const Integer& f = (*this)(i, t);
      if (f == 0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) {
        const Integer& y = other(t, j);
        if (y != 0) c(i, j) += f * y;
      }
    }
  }
  for (auto& x : c.data_) ring_.normalize(x);
  return c;
}

Matrix Matrix::operator+(const Matrix& other) const {
  check_same(other, "add");
  require(rows_ == other.rows_ && cols_ == other.cols_, ErrorCode::InvalidInput, "add: shape mismatch");
  Matrix c = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    c.data_[i] += other.data_[i];
    ring_.normalize(c.data_[i]);
  }
  return c;
}

Matrix Matrix::operator-(const Matrix& other) const {
  check_same(other, "subtract");
  require(rows_ == other.rows_ && cols_ == other.cols_, ErrorCode::InvalidInput, "subtract: shape mismatch");
  Matrix c = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    c.data_[i] -= other.data_[i];
    ring_.normalize(c.data_[i]);
  }
  return c;
}

Matrix Matrix::operator-() const { return scaled(-1); }

Matrix Matrix::scaled(const Integer& s) const {
  Matrix c = *this;
  for (auto& x : c.data_) {
    x *= s;
    ring_.normalize(x);
  }
  return c;
}

Matrix Matrix::pow(unsigned e) const {
  require(rows_ == cols_, ErrorCode::InvalidInput, "pow of non-square matrix");
  Matrix result = identity(rows_, ring_);
  Matrix base = *this;
  while (e) {
    if (e & 1u) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

Matrix Matrix::column_from(Ring ring, const std::vector<Integer>& v) {
  Matrix m(v.size(), 1, ring);
  for (std::size_t i = 0; i < v.size(); ++i) m.set(i, 0, v[i]);
  return m;
}

Matrix Matrix::hstack(const Matrix& a, const Matrix& b) {
  a.check_same(b, "hstack");
  require(a.rows_ == b.rows_, ErrorCode::InvalidInput, "hstack: row mismatch");
  Matrix m(a.rows_, a.cols_ + b.cols_, a.ring_);
  m.set_block(0, 0, a);
  m.set_block(0, a.cols_, b);
  return m;
}

Matrix Matrix::vstack(const Matrix& a, const Matrix& b) {
  a.check_same(b, "vstack");
  require(a.cols_ == b.cols_, ErrorCode::InvalidInput, "vstack: column mismatch");
  Matrix m(a.rows_ + b.rows_, a.cols_, a.ring_);
  m.set_block(0, 0, a);
  m.set_block(a.rows_, 0, b);
  return m;
}

Matrix Matrix::block_diag(const Matrix& a, const Matrix& b) {
  a.check_same(b, "block_diag");
  Matrix m(a.rows_ + b.rows_, a.cols_ + b.cols_, a.ring_);
  m.set_block(0, 0, a);
  m.set_block(a.rows_, a.cols_, b);
  return m;
}

Matrix Matrix::hstack_all(const std::vector<Matrix>& parts, std::size_t rows, Ring ring) {
  std::size_t cols = 0;
  for (const auto& p : parts) {
    require(p.rows_ == rows, ErrorCode::InvalidInput, "hstack_all: row mismatch");
    cols += p.cols_;
  }
  Matrix m(rows, cols, ring);
  std::size_t c = 0;
  for (const auto& p : parts) {
    m.set_block(0, c, p);
    c += p.cols_;
  }
  return m;
}

std::vector<std::vector<long>> Matrix::to_rows() const {
  std::vector<std::vector<long>> out(rows_, std::vector<long>(cols_));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) {
      require((*this)(i, j).fits_slong_p(), ErrorCode::TooLarge, "entry does not fit in a machine word");
      out[i][j] = (*this)(i, j).get_si();
    }
  return out;
}

std::string Matrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? " " : "") << (*this)(i, j);
    os << "]";
  }
  os << "]";
  return os.str();
}

}  // namespace kcell
