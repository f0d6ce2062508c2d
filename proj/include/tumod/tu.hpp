#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tumod/errors.hpp"
#include "tumod/int_matrix.hpp"

namespace tumod {

/// Exhaustive verification is limited to matrices whose smaller dimension
/// (after removing zero and repeated rows/columns) is at most this.
inline constexpr std::size_t kExhaustiveTuCap = 8;

enum class TuStatus { TU, NotTU };

inline const char* to_string(TuStatus s) { return s == TuStatus::TU ? "TU" : "NotTU"; }

/// A square submatrix (0-based indices into the checked matrix) whose
/// determinant lies outside {-1, 0, 1}.
struct TuWitness {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  std::int64_t determinant = 0;
};

struct TuVerdict {
  TuStatus status = TuStatus::TU;
  std::optional<TuWitness> witness;

  bool is_tu() const { return status == TuStatus::TU; }
};

enum class TuMethod {
  /// Signing criterion for the verdict, minor enumeration for the witness.
  Auto,
  /// Enumerate every square minor; slower, used to cross-check Auto.
  Exhaustive,
};

namespace detail {

/// Indices of rows kept after dropping all-zero rows and rows equal to
/// +/- an earlier kept row. Minors through dropped rows are 0 or repeat a
/// kept minor up to sign, so the TU status is unchanged.
inline std::vector<std::size_t> representative_rows(const IntMatrix& m) {
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    bool zero = true;
    for (auto v : row) zero = zero && v == 0;
    if (zero) continue;
    bool repeated = false;
    for (auto k : keep) {
      const auto other = m.row(k);
      bool same = true, opposite = true;
      for (std::size_t c = 0; c < m.cols(); ++c) {
        same = same && row[c] == other[c];
        opposite = opposite && row[c] == -other[c];
      }
      if (same || opposite) {
        repeated = true;
        break;
      }
    }
    if (!repeated) keep.push_back(r);
  }
  return keep;
}

struct ReducedMatrix {
  IntMatrix matrix;
  std::vector<std::size_t> rows;  // reduced index -> original row
  std::vector<std::size_t> cols;  // reduced index -> original column
};

inline ReducedMatrix reduce(const IntMatrix& m) {
  ReducedMatrix out;
  out.rows = representative_rows(m);
  std::vector<std::size_t> all_cols(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) all_cols[c] = c;
  const IntMatrix row_reduced = m.submatrix(out.rows, all_cols);
  out.cols = representative_rows(row_reduced.transpose());
  std::vector<std::size_t> local_rows(out.rows.size());
  for (std::size_t i = 0; i < local_rows.size(); ++i) local_rows[i] = i;
  out.matrix = row_reduced.submatrix(local_rows, out.cols);
  return out;
}

/// Ghouila-Houri: a {0,+-1} matrix is TU iff every subset of its columns can
/// be signed so that the signed column sum lies in {-1,0,1}^rows.
inline bool ghouila_houri_columns(const IntMatrix& m) {
  const std::size_t n = m.cols(), rows = m.rows();
  if (n > 20) throw SizeError("ghouila_houri_columns: too many columns");
  std::vector<std::int64_t> sum(rows);
  for (std::uint32_t subset = 1; subset < (1u << n); ++subset) {
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < n; ++j)
      if (subset & (1u << j)) members.push_back(j);
    // the first member's sign can be fixed to +
    const std::uint32_t signings = 1u << (members.size() - 1);
    bool ok = false;
    for (std::uint32_t s = 0; s < signings && !ok; ++s) {
      std::fill(sum.begin(), sum.end(), 0);
      for (std::size_t t = 0; t < members.size(); ++t) {
        const bool minus = t > 0 && (s & (1u << (t - 1)));
        for (std::size_t r = 0; r < rows; ++r)
          sum[r] += minus ? -m(r, members[t]) : m(r, members[t]);
      }
      ok = true;
      for (auto v : sum)
        if (v < -1 || v > 1) {
          ok = false;
          break;
        }
    }
    if (!ok) return false;
  }
  return true;
}

/// Lexicographically first square submatrix (by size, then row tuple, then
/// column tuple) with |det| >= 2.
inline std::optional<TuWitness> first_violating_minor(const IntMatrix& m) {
  const std::size_t kmax = std::min(m.rows(), m.cols());
  for (std::size_t k = 1; k <= kmax; ++k) {
    std::vector<std::size_t> ri(k), ci(k);
    for (std::size_t i = 0; i < k; ++i) ri[i] = i;
    while (true) {
      for (std::size_t i = 0; i < k; ++i) ci[i] = i;
      while (true) {
        const std::int64_t det = bareiss_determinant(m.submatrix(ri, ci));
        if (det > 1 || det < -1) return TuWitness{ri, ci, det};
        // next column combination
        std::size_t pos = k;
        while (pos > 0 && ci[pos - 1] == m.cols() - k + pos - 1) --pos;
        if (pos == 0) break;
        ++ci[pos - 1];
        for (std::size_t i = pos; i < k; ++i) ci[i] = ci[i - 1] + 1;
      }
      std::size_t pos = k;
      while (pos > 0 && ri[pos - 1] == m.rows() - k + pos - 1) --pos;
      if (pos == 0) break;
      ++ri[pos - 1];
      for (std::size_t i = pos; i < k; ++i) ri[i] = ri[i - 1] + 1;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Exact total-unimodularity test.
///
/// Entries outside {-1, 0, 1} give an immediate 1x1 witness. Otherwise zero
/// and repeated (up to sign) rows and columns are removed; if the smaller
/// remaining dimension exceeds kExhaustiveTuCap a SizeError is thrown (use
/// check_two_nonzero_row_condition / is_interval_matrix instead). On NotTU
/// the witness is the lexicographically first violating minor of the input.
inline TuVerdict is_totally_unimodular(const IntMatrix& m, TuMethod method = TuMethod::Auto) {
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m(r, c) < -1 || m(r, c) > 1)
        return {TuStatus::NotTU, TuWitness{{r}, {c}, m(r, c)}};

  const auto red = detail::reduce(m);
  const std::size_t dim = std::min(red.matrix.rows(), red.matrix.cols());
  if (dim > kExhaustiveTuCap)
    throw SizeError("is_totally_unimodular: reduced matrix is " +
                    std::to_string(red.matrix.rows()) + "x" + std::to_string(red.matrix.cols()) +
                    ", above the exhaustive cap of " + std::to_string(kExhaustiveTuCap) +
                    "; use a sufficient condition (two-nonzero rows, interval matrix)");
  if (dim == 0) return {};

  if (method == TuMethod::Auto) {
    const bool tu = red.matrix.cols() <= red.matrix.rows()
                        ? detail::ghouila_houri_columns(red.matrix)
                        : detail::ghouila_houri_columns(red.matrix.transpose());
    if (tu) return {};
  }
  auto witness = detail::first_violating_minor(red.matrix);
  if (!witness) {
    if (method == TuMethod::Auto)
      throw std::logic_error("is_totally_unimodular: signing test and minor search disagree");
    return {};
  }
  for (auto& r : witness->rows) r = red.rows[r];
  for (auto& c : witness->cols) c = red.cols[c];
  return {TuStatus::NotTU, std::move(witness)};
}

/// Sufficient condition: every row has at most two nonzeros in {-1,0,1}, and
/// rows with two nonzeros sum to zero (a network-matrix row pattern).
inline bool check_two_nonzero_row_condition(const IntMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    int nonzeros = 0;
    std::int64_t sum = 0;
    for (auto v : m.row(r)) {
      if (v < -1 || v > 1) return false;
      if (v != 0) {
        ++nonzeros;
        sum += v;
      }
    }
    if (nonzeros > 2 || (nonzeros == 2 && sum != 0)) return false;
  }
  return true;
}

/// Sufficient condition: a 0/1 matrix whose ones are consecutive in every row.
inline bool is_interval_matrix(const IntMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    int runs = 0;
    std::int64_t prev = 0;
    for (auto v : m.row(r)) {
      if (v != 0 && v != 1) return false;
      if (v == 1 && prev == 0) ++runs;
      prev = v;
    }
    if (runs > 1) return false;
  }
  return true;
}

enum class TuOp { Transpose, AppendIdentity, AppendUnitRow, DuplicateRow };

/// Matrix transformations used when assembling TU systems. Transpose,
/// AppendIdentity ([M | I]) and DuplicateRow preserve total unimodularity;
/// AppendUnitRow ([M; 1']) does not in general and must be re-verified.
inline IntMatrix tu_preserving(const IntMatrix& m, TuOp op, std::size_t row = 0) {
  switch (op) {
    case TuOp::Transpose: return m.transpose();
    case TuOp::AppendIdentity: return concat_cols(m, IntMatrix::identity(m.rows()));
    case TuOp::AppendUnitRow: return concat_rows(m, IntMatrix(1, m.cols(), 1));
    case TuOp::DuplicateRow: {
      if (row >= m.rows()) throw DimensionError("tu_preserving: row index out of range");
      IntMatrix dup(1, m.cols());
      std::copy_n(m.row(row).begin(), m.cols(), dup.row(0).begin());
      return concat_rows(m, dup);
    }
  }
  return m;
}

/// Best available exact verdict: sufficient conditions first (in either
/// orientation), then the exhaustive test when within the cap. Empty when
/// neither applies; callers treat that as "not certified".
inline std::optional<TuVerdict> certify_totally_unimodular(const IntMatrix& m) {
  if (check_two_nonzero_row_condition(m) || is_interval_matrix(m)) return TuVerdict{};
  const IntMatrix t = m.transpose();
  if (check_two_nonzero_row_condition(t) || is_interval_matrix(t)) return TuVerdict{};
  try {
    return is_totally_unimodular(m);
  } catch (const SizeError&) {
    return std::nullopt;
  }
}

}  // namespace tumod
