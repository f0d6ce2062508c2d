#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tumod/errors.hpp"

namespace tumod {

/// Dense row-major matrix of 64-bit integers.
///
/// Holds every structure matrix of the toolkit (biadjacency, incidence,
/// interval/refractoriness and constraint matrices). Zero-row matrices are
/// allowed so that e.g. the incidence matrix of a one-node tree (0 x 1) is
/// representable.
class IntMatrix {
 public:
  using value_type = std::int64_t;

  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols, value_type fill = 0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  IntMatrix(std::initializer_list<std::initializer_list<value_type>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw DimensionError("IntMatrix: ragged initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  value_type& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  value_type operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const value_type> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<value_type> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  IntMatrix transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  IntMatrix submatrix(std::span<const std::size_t> row_idx,
                      std::span<const std::size_t> col_idx) const {
    IntMatrix s(row_idx.size(), col_idx.size());
    for (std::size_t i = 0; i < row_idx.size(); ++i)
      for (std::size_t j = 0; j < col_idx.size(); ++j) s(i, j) = (*this)(row_idx[i], col_idx[j]);
    return s;
  }

  /// Columns [first, first + count).
  IntMatrix column_slice(std::size_t first, std::size_t count) const {
    if (first + count > cols_) throw DimensionError("IntMatrix: column slice out of range");
    std::vector<std::size_t> ri(rows_), ci(count);
    for (std::size_t i = 0; i < rows_; ++i) ri[i] = i;
    for (std::size_t j = 0; j < count; ++j) ci[j] = first + j;
    return submatrix(ri, ci);
  }

  bool entries_in(value_type lo, value_type hi) const {
    return std::all_of(data_.begin(), data_.end(),
                       [&](value_type v) { return v >= lo && v <= hi; });
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<value_type> data_;
};

/// [top; bottom]
inline IntMatrix concat_rows(const IntMatrix& top, const IntMatrix& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  if (top.cols() != bottom.cols()) throw DimensionError("concat_rows: column count mismatch");
  IntMatrix out(top.rows() + bottom.rows(), top.cols());
  for (std::size_t r = 0; r < top.rows(); ++r)
    std::copy_n(top.row(r).begin(), top.cols(), out.row(r).begin());
  for (std::size_t r = 0; r < bottom.rows(); ++r)
    std::copy_n(bottom.row(r).begin(), bottom.cols(), out.row(top.rows() + r).begin());
  return out;
}

/// [left, right]
inline IntMatrix concat_cols(const IntMatrix& left, const IntMatrix& right) {
  if (left.rows() != right.rows()) throw DimensionError("concat_cols: row count mismatch");
  IntMatrix out(left.rows(), left.cols() + right.cols());
  for (std::size_t r = 0; r < left.rows(); ++r) {
    std::copy_n(left.row(r).begin(), left.cols(), out.row(r).begin());
    std::copy_n(right.row(r).begin(), right.cols(), out.row(r).begin() + left.cols());
  }
  return out;
}

inline IntMatrix negate(IntMatrix m) {
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (auto& v : m.row(r)) v = -v;
  return m;
}

/// Exact determinant by fraction-free (Bareiss) elimination.
///
/// Every intermediate of the elimination is itself a minor of the input, so
/// the arithmetic is exact; products are formed in 128 bits and an
/// OverflowError is thrown if a quotient leaves the 64-bit range.
inline std::int64_t bareiss_determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("bareiss_determinant: matrix is not square");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  std::vector<__int128> a(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) a[r * n + c] = m(r, c);
  auto at = [&](std::size_t r, std::size_t c) -> __int128& { return a[r * n + c]; };

  constexpr __int128 kMax = INT64_MAX;
  constexpr __int128 kMin = INT64_MIN;
  int sign = 1;
  __int128 prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (at(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && at(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      for (std::size_t c = 0; c < n; ++c) std::swap(at(k, c), at(swap, c));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        const __int128 v = (at(k, k) * at(i, j) - at(i, k) * at(k, j)) / prev;
        if (v > kMax || v < kMin) throw OverflowError("bareiss_determinant: 64-bit overflow");
        at(i, j) = v;
      }
      at(i, k) = 0;
    }
    prev = at(k, k);
  }
  return static_cast<std::int64_t>(sign * at(n - 1, n - 1));
}

// --- text format: "rows cols" then one whitespace-separated row per line ---

inline IntMatrix read_int_matrix(std::istream& in) {
  long long rows = -1, cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw ParseError("matrix: expected header \"rows cols\"");
  IntMatrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      long long v;
      if (!(in >> v))
        throw ParseError("matrix: missing or non-integer entry at row " + std::to_string(r + 1));
      m(r, c) = v;
    }
  return m;
}

inline IntMatrix parse_int_matrix(const std::string& text) {
  std::istringstream in(text);
  return read_int_matrix(in);
}

inline void write_int_matrix(std::ostream& out, const IntMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
    out << '\n';
  }
}

inline std::string to_string(const IntMatrix& m) {
  std::ostringstream out;
  write_int_matrix(out, m);
  return out.str();
}

}  // namespace tumod
