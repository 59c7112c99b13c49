#include "fairalloc/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairalloc/error.hpp"

namespace fairalloc {

namespace {

std::string position(const Entry& e) {
  return "(" + std::to_string(e.row + 1) + ", " + std::to_string(e.col + 1) + ")";
}

}  // namespace

SparseNonnegMatrix SparseNonnegMatrix::from_entries(std::size_t rows, std::size_t cols,
                                                    std::vector<Entry> entries) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::DimensionMismatch, "matrix must have at least one row and column");
  }
  if (entries.empty()) throw Error(ErrorCode::AllZero, "matrix has no nonzero entries");
  for (const Entry& e : entries) {
    if (e.row >= rows || e.col >= cols) {
      throw Error(ErrorCode::DimensionMismatch, "entry " + position(e) + " outside " +
                                                    std::to_string(rows) + "x" +
                                                    std::to_string(cols));
    }
    if (std::isnan(e.value) || std::isinf(e.value)) {
      throw Error(ErrorCode::DomainError, "non-finite value at " + position(e));
    }
    if (e.value < 0.0) throw Error(ErrorCode::NegativeEntry, "negative value at " + position(e));
    if (e.value == 0.0) throw Error(ErrorCode::DomainError, "explicit zero at " + position(e));
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (entries[k].row == entries[k - 1].row && entries[k].col == entries[k - 1].col) {
      throw Error(ErrorCode::DuplicateEntry, "duplicate entry at " + position(entries[k]));
    }
  }

  SparseNonnegMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(rows + 1, 0);
  m.col_ptr_.assign(cols + 1, 0);
  for (const Entry& e : entries) {
    ++m.row_ptr_[e.row + 1];
    ++m.col_ptr_[e.col + 1];
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (m.row_ptr_[i + 1] == 0) {
      throw Error(ErrorCode::EmptyRowOrColumn, "row " + std::to_string(i + 1) + " is empty");
    }
    m.row_ptr_[i + 1] += m.row_ptr_[i];
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (m.col_ptr_[j + 1] == 0) {
      throw Error(ErrorCode::EmptyRowOrColumn, "column " + std::to_string(j + 1) + " is empty");
    }
    m.col_ptr_[j + 1] += m.col_ptr_[j];
  }

  const std::size_t nnz = entries.size();
  m.row_cols_.resize(nnz);
  m.row_values_.resize(nnz);
  m.col_rows_.resize(nnz);
  m.col_values_.resize(nnz);
  m.col_log_values_.resize(nnz);
  std::vector<std::size_t> col_fill(m.col_ptr_.begin(), m.col_ptr_.end() - 1);
  // entries are row-major sorted, so the column fill visits rows in order
  for (std::size_t k = 0; k < nnz; ++k) {
    const Entry& e = entries[k];
    m.row_cols_[k] = e.col;
    m.row_values_[k] = e.value;
    const std::size_t slot = col_fill[e.col]++;
    m.col_rows_[slot] = e.row;
    m.col_values_[slot] = e.value;
    m.col_log_values_[slot] = std::log(e.value);
  }
  const auto [lo, hi] = std::minmax_element(m.row_values_.begin(), m.row_values_.end());
  m.min_value_ = *lo;
  m.max_value_ = *hi;
  return m;
}

std::span<const std::size_t> SparseNonnegMatrix::row_indices(std::size_t i) const {
  return {row_cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}

std::span<const double> SparseNonnegMatrix::row_values(std::size_t i) const {
  return {row_values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}

std::span<const std::size_t> SparseNonnegMatrix::col_indices(std::size_t j) const {
  return {col_rows_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
}

std::span<const double> SparseNonnegMatrix::col_values(std::size_t j) const {
  return {col_values_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
}

std::span<const double> SparseNonnegMatrix::col_log_values(std::size_t j) const {
  return {col_log_values_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
}

double SparseNonnegMatrix::at(std::size_t i, std::size_t j) const {
  const auto cols = row_indices(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return row_values(i)[static_cast<std::size_t>(it - cols.begin())];
}

bool SparseNonnegMatrix::contains(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) return false;
  const auto cols = row_indices(i);
  return std::binary_search(cols.begin(), cols.end(), j);
}

std::vector<Entry> SparseNonnegMatrix::entries() const {
  std::vector<Entry> out;
  out.reserve(nnz());
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto cols = row_indices(i);
    const auto vals = row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) out.push_back({i, cols[k], vals[k]});
  }
  return out;
}

SparseNonnegMatrix SparseNonnegMatrix::divided(double divisor) const {
  std::vector<Entry> out = entries();
  for (Entry& e : out) e.value /= divisor;
  return from_entries(rows_, cols_, std::move(out));
}

SparseNonnegMatrix SparseNonnegMatrix::transposed() const {
  std::vector<Entry> out = entries();
  for (Entry& e : out) std::swap(e.row, e.col);
  return from_entries(cols_, rows_, std::move(out));
}

}  // namespace fairalloc
