#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "fairalloc/sparse_matrix.hpp"

namespace fairalloc {

struct RawMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Entry> entries;  // 0-based
};

/// Reads "%%MatrixMarket matrix coordinate real general" with 1-based
/// indices. Zero values, duplicates, negative values and malformed lines are
/// rejected with the matching ErrorCode.
RawMatrix read_matrix_market(std::istream& in);
RawMatrix read_matrix_market_file(const std::string& path);

void write_matrix_market(std::ostream& out, const RawMatrix& matrix);

}  // namespace fairalloc
