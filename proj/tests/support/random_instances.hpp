#pragma once

// Hand-rolled generators for property tests. Everything is driven by an
// explicit seed so failures replay exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fairalloc/problem.hpp"
#include "fairalloc/sparse_matrix.hpp"

namespace fairalloc::testing {

struct RandomShape {
  std::size_t max_rows = 10;
  std::size_t max_cols = 10;
  double density = 0.4;
  double max_width = 10.0;  // values drawn log-uniformly from [1, max_width]
};

inline std::vector<Entry> random_entries(std::mt19937_64& rng, std::size_t m, std::size_t n,
                                         double density, double width) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto value = [&] { return std::exp(unit(rng) * std::log(width)); };
  std::vector<std::vector<bool>> used(m, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) used[i][j] = unit(rng) < density;
  }
  // every row and column needs an entry
  std::uniform_int_distribution<std::size_t> pick_col(0, n - 1);
  std::uniform_int_distribution<std::size_t> pick_row(0, m - 1);
  for (std::size_t i = 0; i < m; ++i) {
    if (std::none_of(used[i].begin(), used[i].end(), [](bool b) { return b; })) {
      used[i][pick_col(rng)] = true;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < m; ++i) any = any || used[i][j];
    if (!any) used[pick_row(rng)][j] = true;
  }
  std::vector<Entry> out;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (used[i][j]) out.push_back({i, j, value()});
    }
  }
  // pin the extremes so the width is exactly what was asked for
  out.front().value = 1.0;
  if (out.size() > 1) out.back().value = width;
  return out;
}

struct RandomInstance {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Entry> entries;
};

inline RandomInstance random_instance(std::uint64_t seed, const RandomShape& shape) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> rows(1, shape.max_rows);
  std::uniform_int_distribution<std::size_t> cols(1, shape.max_cols);
  RandomInstance r;
  r.rows = rows(rng);
  r.cols = cols(rng);
  r.entries = random_entries(rng, r.rows, r.cols, shape.density, shape.max_width);
  return r;
}

inline PackingInstance random_packing(std::uint64_t seed, const RandomShape& shape, double alpha) {
  RandomInstance r = random_instance(seed, shape);
  return standardize_packing(r.rows, r.cols, std::move(r.entries), alpha);
}

inline CoveringInstance random_covering(std::uint64_t seed, const RandomShape& shape,
                                        double beta) {
  RandomInstance r = random_instance(seed, shape);
  return standardize_covering(r.rows, r.cols, std::move(r.entries), beta);
}

inline std::vector<double> random_positive(std::mt19937_64& rng, std::size_t n, double lo,
                                           double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> out(n);
  for (double& v : out) v = d(rng);
  return out;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

inline SparseNonnegMatrix dense_matrix(std::size_t m, std::size_t n,
                                       const std::vector<double>& row_major) {
  std::vector<Entry> e;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (row_major[i * n + j] != 0.0) e.push_back({i, j, row_major[i * n + j]});
    }
  }
  return SparseNonnegMatrix::from_entries(m, n, std::move(e));
}

inline PackingInstance packing_from_dense(std::size_t m, std::size_t n,
                                          const std::vector<double>& row_major, double alpha) {
  std::vector<Entry> e;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (row_major[i * n + j] != 0.0) e.push_back({i, j, row_major[i * n + j]});
    }
  }
  return standardize_packing(m, n, std::move(e), alpha);
}

inline CoveringInstance covering_from_dense(std::size_t m, std::size_t n,
                                            const std::vector<double>& row_major, double beta) {
  std::vector<Entry> e;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (row_major[i * n + j] != 0.0) e.push_back({i, j, row_major[i * n + j]});
    }
  }
  return standardize_covering(m, n, std::move(e), beta);
}

inline std::vector<double> identity(std::size_t n) {
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) out[i * n + i] = 1.0;
  return out;
}

}  // namespace fairalloc::testing
