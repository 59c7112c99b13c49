#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fairalloc/sparse_matrix.hpp"

namespace fairalloc {

/// Exponents above this are treated as overflow; exp(709.8) is the largest
/// finite double.
inline constexpr double kSaturationExponent = 700.0;

/// Constants of the packing method. `log_c` is ln C with C = (1+eps/2)^{1/beta};
/// C itself is never formed. `beta_prime` and `step_size` are set only for
/// alpha < 1.
struct PackingRegParams {
  double alpha = 0.0;
  double epsilon = 0.0;
  double beta = 0.0;
  double log_c = 0.0;
  double beta_prime = 0.0;
  double step_size = 0.0;
  std::uint64_t iterations = 0;

  /// Test-only: arbitrary barrier constants, no iteration budget.
  static PackingRegParams injected(double alpha, double beta, double log_c);
};

struct CoveringRegParams {
  double epsilon = 0.0;
  double beta = 0.0;       // fairness exponent actually used
  double beta_floor = 0.0; // (eps/4)/ln(mn rho/eps)
  double beta_prime = 0.0;
  double step_size = 0.0;
  std::uint64_t iterations = 0;
  bool beta_was_reset = false;
  bool below_floor = false;  // 0 < beta < beta_floor; guarantees are not claimed
};

PackingRegParams derive_packing_params(std::size_t m, std::size_t n, double rho, double alpha,
                                       double epsilon);
CoveringRegParams derive_covering_params(std::size_t m, std::size_t n, double rho, double beta,
                                         double epsilon);

/// The three numbers the regularized objective depends on. Covering uses
/// alpha = 0 and log_c = 0 with its fairness beta as the barrier exponent.
struct BarrierParams {
  double alpha = 0.0;
  double beta = 1.0;
  double log_c = 0.0;
};

BarrierParams barrier_of(const PackingRegParams& params);
BarrierParams barrier_of(const CoveringRegParams& params);

/// f_r value; `overflow` set when the barrier exceeds double range, in which
/// case `value` is +inf and carries no other meaning.
struct RegularizedValue {
  double value = 0.0;
  bool overflow = false;
};

struct GradientPair {
  std::vector<double> grad;       // +-inf where saturated
  std::vector<double> truncated;  // in [-1, 1]
  std::vector<double> log_loads;  // ln (A F(x_hat))_i, -inf for zero loads
  std::vector<unsigned char> saturated;
};

/// f_r(x_hat) = -f_hat(x_hat) + (beta/(1+beta)) sum_i exp(log_c + (1+beta)/beta ln load_i).
RegularizedValue f_r_value(const SparseNonnegMatrix& a, const BarrierParams& params,
                           std::span<const double> x_hat);
/// Same, with loads A F(x_hat) already at hand.
RegularizedValue f_r_from_loads(std::span<const double> x_hat, std::span<const double> loads,
                                const BarrierParams& params);

GradientPair grad_f_r(const SparseNonnegMatrix& a, const BarrierParams& params,
                      std::span<const double> x_hat);

/// Scale by (1-alpha) (not at alpha = 1) and clip from above at 1. Values
/// below -1 beyond rounding throw TruncationDomainViolation.
double truncate(double grad, double alpha);

// Per-coordinate pieces. The monolithic solvers and the round engine build
// gradients from exactly these calls so that both produce identical bits.

/// ln C + ln(load)/beta, the log of C load^{1/beta}; -inf for a zero load.
double row_log_weight(double load, const BarrierParams& params);

/// ln of x_hat^{alpha/(1-alpha)} (alpha != 1) or x_hat itself (alpha = 1).
double log_gradient_prefactor(double x_hat, double alpha);

struct CoordinateGradient {
  double grad = 0.0;
  double truncated = 0.0;
  bool saturated = false;
};

/// Gradient coordinate from its log-domain pieces. `log_terms[k]` is
/// ln A_ij + row_log_weight(load_i) over the incident rows i of the column.
CoordinateGradient coordinate_gradient(double log_prefactor, std::span<const double> log_terms,
                                       double alpha);

}  // namespace fairalloc
