#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fairalloc/sparse_matrix.hpp"

namespace fairalloc {

/// How a standardized instance relates to the one it came from: the original
/// matrix equals `scale` times the standardized matrix.
struct ScalingRecord {
  double scale = 1.0;
  double alpha_used = 0.0;
};

/// max f_alpha(x) s.t. A x <= 1, x >= 0, with min nonzero of A equal to 1.
struct PackingInstance {
  SparseNonnegMatrix matrix;
  double rho = 1.0;
  ScalingRecord scaling;
};

/// min g_beta(y) s.t. A^T y >= 1, y >= 0; each column of A is one constraint.
struct CoveringInstance {
  SparseNonnegMatrix matrix;
  double rho = 1.0;
  ScalingRecord scaling;
};

struct PackingConfig {
  double alpha = 1.0;
  double epsilon = 0.1;
  std::optional<std::uint64_t> max_iterations;
  bool early_stop = false;
  std::optional<std::uint64_t> trace_stride;
};

struct CoveringConfig {
  double beta = 1.0;
  double epsilon = 0.1;
  std::optional<std::uint64_t> max_iterations;
  std::optional<std::uint64_t> trace_stride;
};

/// Largest admissible epsilon for fairness parameter alpha:
/// min{1/2, 1/(10|alpha-1|)}, and 1/2 at alpha = 1.
double packing_epsilon_limit(double alpha);

/// Throw InvalidAlpha / EpsilonOutOfRange on inadmissible parameters.
void validate(const PackingConfig& config);
void validate(const CoveringConfig& config);

/// Divide a raw nonnegative matrix by its smallest nonzero entry. Zero
/// entries in `raw` are dropped.
PackingInstance standardize_packing(std::size_t rows, std::size_t cols, std::vector<Entry> raw,
                                    double alpha);
CoveringInstance standardize_covering(std::size_t rows, std::size_t cols, std::vector<Entry> raw,
                                      double beta);

/// Sum of x_j^{1-alpha}/(1-alpha), or sum of ln x_j at alpha = 1.
double f_alpha_value(std::span<const double> x, double alpha);

/// Sum of y_i^{1+beta}/(1+beta).
double g_beta_value(std::span<const double> y, double beta);

/// Map between the linearized coordinates and allocations:
/// x = x_hat^{1/(1-alpha)} (alpha != 1), x = exp(x_hat) (alpha = 1).
double transform(double x_hat, double alpha);
double transform_inverse(double x, double alpha);
std::vector<double> transform(std::span<const double> x_hat, double alpha);
std::vector<double> transform_inverse(std::span<const double> x, double alpha);

/// A x, summed in the stored order of each row.
std::vector<double> constraint_loads(const SparseNonnegMatrix& a, std::span<const double> x);
void constraint_loads(const SparseNonnegMatrix& a, std::span<const double> x,
                      std::span<double> out);

/// A^T y, summed in the stored order of each column.
std::vector<double> column_loads(const SparseNonnegMatrix& a, std::span<const double> y);

struct ValueBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds on the optimum of sum x_hat/(1-alpha) (or sum x_hat at alpha = 1).
ValueBounds optimum_bounds(const PackingInstance& instance, double alpha);

/// Bounds on the optimal covering cost g_beta(y*).
ValueBounds covering_optimum_bounds(const CoveringInstance& instance, double beta);

/// Original-space allocation for a standardized one: x / scale.
std::vector<double> to_original(std::span<const double> standardized, const ScalingRecord& scaling);

}  // namespace fairalloc
