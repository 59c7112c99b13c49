#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fairalloc {

/// One stored coefficient, 0-based indices.
struct Entry {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Constraint matrix with strictly positive stored entries, kept in both
/// compressed-row and compressed-column form.
///
/// Within a row, entries are ordered by column; within a column, by row.
/// Every row and every column holds at least one entry.
class SparseNonnegMatrix {
 public:
  /// Validates and compresses `entries`. Throws Error with NegativeEntry,
  /// DomainError (zero or non-finite value), DimensionMismatch (index out of
  /// range), DuplicateEntry, AllZero or EmptyRowOrColumn.
  static SparseNonnegMatrix from_entries(std::size_t rows, std::size_t cols,
                                         std::vector<Entry> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return row_values_.size(); }

  std::span<const std::size_t> row_indices(std::size_t i) const;  // column ids in row i
  std::span<const double> row_values(std::size_t i) const;
  std::span<const std::size_t> col_indices(std::size_t j) const;  // row ids in column j
  std::span<const double> col_values(std::size_t j) const;
  /// Natural logs of col_values(j), computed once at construction.
  std::span<const double> col_log_values(std::size_t j) const;

  double min_value() const noexcept { return min_value_; }
  double max_value() const noexcept { return max_value_; }

  /// Value at (i, j), or 0 when not stored.
  double at(std::size_t i, std::size_t j) const;
  bool contains(std::size_t i, std::size_t j) const;

  /// Entries in row-major order.
  std::vector<Entry> entries() const;

  /// Copy with every entry divided by `divisor` (> 0).
  SparseNonnegMatrix divided(double divisor) const;

  /// Transposed copy: rows become columns.
  SparseNonnegMatrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> row_cols_;
  std::vector<double> row_values_;
  std::vector<std::size_t> col_ptr_;
  std::vector<std::size_t> col_rows_;
  std::vector<double> col_values_;
  std::vector<double> col_log_values_;
  double min_value_ = 0.0;
  double max_value_ = 0.0;
};

}  // namespace fairalloc
