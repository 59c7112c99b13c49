#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "fairalloc/sparse_matrix.hpp"

namespace fairalloc {

// Reference optima for verification. Nothing here touches the regularized
// objective or the truncated-gradient machinery of the solvers.

enum class OracleMethod { ClosedForm, Newton };

std::string_view to_string(OracleMethod method);

struct OracleSolution {
  std::vector<double> point;  // x* for packing, y* for covering
  double objective = 0.0;     // f_alpha(x*) or g_beta(y*)
  OracleMethod method = OracleMethod::ClosedForm;
  /// Relative optimality bound; 0 for closed forms.
  double accuracy = 0.0;
};

/// max f_alpha(x) s.t. <a, x> <= 1. For alpha = 0 the LP optimum puts
/// everything on the smallest a_j (lowest index on ties).
OracleSolution single_constraint_packing_optimum(std::span<const double> a, double alpha);

/// max f_alpha(x) s.t. d_j x_j <= 1: x_j = 1/d_j.
OracleSolution diagonal_packing_optimum(std::span<const double> d, double alpha);

/// Log-barrier path following on max f_alpha(x) s.t. A x <= 1, x >= 0. Stops
/// once the barrier duality bound is below 1e-3 * tol relative to the
/// objective; throws NonConvergence when the Newton budget runs out.
OracleSolution small_dense_packing_optimum(const SparseNonnegMatrix& a, double alpha,
                                           double tol = 1e-9);

/// Diagonal instance (y_i = 1/a_ii) or a single covering constraint
/// (y_i proportional to a_i^{1/beta}); other shapes are UnsupportedStructure.
OracleSolution covering_closed_form_optimum(const SparseNonnegMatrix& a, double beta);

/// Barrier path following on min g_beta(y) s.t. A^T y >= 1, y >= 0.
OracleSolution small_dense_covering_optimum(const SparseNonnegMatrix& a, double beta,
                                            double tol = 1e-9);

/// Maximizer x* of the covering dual <1, x> - beta/(1+beta) sum_i (A x)_i^{(1+beta)/beta}
/// over x >= 0 (beta > 0). `objective` holds the dual value.
OracleSolution covering_dual_optimum(const SparseNonnegMatrix& a, double beta, double tol = 1e-9);

}  // namespace fairalloc
