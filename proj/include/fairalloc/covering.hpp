#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "fairalloc/packing.hpp"
#include "fairalloc/problem.hpp"
#include "fairalloc/regularization.hpp"

namespace fairalloc {

/// Iterate of the covering method. `x` and `z` live on the n columns (the
/// packing side), `y_avg` on the m rows.
struct CoveringState {
  std::vector<double> x;
  std::vector<double> z;
  std::vector<double> y_avg;
  std::uint64_t k = 0;
  std::vector<TraceRow> trace;
};

struct CoveringResidual {
  double min_load = 0.0;
  std::vector<std::size_t> violated_columns;
};

struct CoveringSolution {
  std::vector<double> y;      // (1+eps) y_avg, original space
  std::vector<double> y_avg;  // original space
  double cost = 0.0;          // g_beta(y)
  double cost_avg = 0.0;      // g_beta(y_avg), the quantity the guarantee bounds
  double pre_scale_residual = 0.0;  // min_j (A^T y_avg)_j
  double min_column_load = 0.0;     // min_j (A^T y)_j
  std::uint64_t iterations_run = 0;
  bool certificate_checked = false;  // false when the run was cut short
  /// Final packing-side iterate as a point of the covering dual
  /// <1, x> - beta/(1+beta) sum_i (A x)_i^{(1+beta)/beta}, original space.
  std::vector<double> dual_certificate;
  double dual_value = 0.0;
  double gap = 0.0;  // cost - dual_value >= 0 by weak duality
  CoveringRegParams params;
  std::vector<TraceRow> trace;
};

/// x_j = (1/(n rho)) (1/(m rho))^beta, z_j = x_j^{-beta'} - 1, y_avg = 0.
CoveringState init_covering(const CoveringInstance& instance, const CoveringRegParams& params);

/// Running average ((k-1)/k) y_avg + load^{1/beta}/k for the k-th sample.
inline double covering_average(double y_avg, double load, double beta, std::uint64_t k) {
  const double kd = static_cast<double>(k);
  return (kd - 1.0) / kd * y_avg + std::pow(load, 1.0 / beta) / kd;
}

CoveringState step_covering(CoveringState state, const CoveringInstance& instance,
                            const CoveringRegParams& params);

/// Exact min_j (A^T y)_j and the columns where it falls below 1.
CoveringResidual covering_residual(const SparseNonnegMatrix& a, std::span<const double> y);

/// Trace row: utility holds g_beta(y_avg) in original space, max_load the
/// largest (A x)_i, f_r the covering regularized objective at x.
TraceRow covering_trace_row(const CoveringInstance& instance, const CoveringRegParams& params,
                            std::span<const double> x, std::span<const double> y_avg,
                            std::span<const double> loads, std::uint64_t k);

/// Covering dual objective at x >= 0 (beta > 0).
double covering_dual_value(const SparseNonnegMatrix& a, std::span<const double> x, double beta);

std::uint64_t covering_trace_stride(const CoveringConfig& config, std::uint64_t budget);

/// Scales and maps the average back. When `full_run` is set the pre-scale
/// certificate min A^T y_avg >= 1 - eps/2 is enforced (CertificateShortfall).
CoveringSolution finalize_covering(const CoveringInstance& instance,
                                   const CoveringRegParams& params, const CoveringState& state,
                                   bool full_run);

class CoveringSolver {
 public:
  CoveringSolver(const CoveringInstance& instance, const CoveringConfig& config);

  void step();
  CoveringSolution run();

  const CoveringState& state() const noexcept { return state_; }
  const CoveringRegParams& params() const noexcept { return params_; }
  std::span<const double> loads() const noexcept { return loads_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  void record_trace();

  const CoveringInstance& instance_;
  CoveringConfig config_;
  CoveringRegParams params_;
  CoveringState state_;
  std::uint64_t budget_ = 0;
  std::uint64_t stride_ = 1;
  std::vector<double> loads_;
  std::vector<double> weights_;
  std::vector<double> terms_;
};

CoveringSolution solve_covering(const CoveringInstance& instance, const CoveringConfig& config);

}  // namespace fairalloc
