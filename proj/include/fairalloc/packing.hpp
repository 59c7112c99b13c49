#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fairalloc/problem.hpp"
#include "fairalloc/regularization.hpp"

namespace fairalloc {

struct TraceRow {
  std::uint64_t iteration = 0;
  double utility = 0.0;   // f_alpha of the original-space allocation
  double max_load = 0.0;  // max_i (A x)_i
  RegularizedValue f_r;
  std::optional<double> gap;        // alpha > 1 only
  std::optional<double> slackness;  // alpha > 1 only, see slackness_ratio()
};

/// Iterate of the packing method. `u` caches F_alpha(x_hat); `z` is the mirror
/// state and is empty unless alpha < 1.
struct PackingState {
  std::vector<double> x_hat;
  std::vector<double> z;
  std::vector<double> u;
  std::uint64_t k = 0;
  std::vector<TraceRow> trace;
};

struct FeasibilityReport {
  double max_load = 0.0;
  std::vector<std::size_t> violated_rows;
  bool is_feasible = true;
};

/// Lagrangian certificate for alpha > 1. `y` is the dual vector (standardized
/// space) and `gap` = -sum(x_hat)/(1-alpha) - dual_value bounds the true
/// optimality gap from above.
struct DualityGap {
  std::vector<double> y;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
};

struct PackingSolution {
  std::vector<double> x;  // original space
  double utility = 0.0;
  /// eps*n at alpha = 1, eps*(1-alpha)*utility otherwise; the returned
  /// utility stands in for the unknown optimum.
  double eps_f = 0.0;
  /// 3 for alpha <= 1, 10 for alpha > 1: the guarantee is gap <= multiplier * |eps_f|.
  double guarantee_multiplier = 0.0;
  std::uint64_t iterations_run = 0;
  double max_load = 0.0;
  std::optional<std::vector<double>> dual_certificate;  // original space
  std::optional<double> gap;                            // original space
  bool stopped_early = false;
  std::uint64_t slackness_warnings = 0;
  PackingRegParams params;
  std::vector<TraceRow> trace;
};

// Per-coordinate update rules, shared with the round engine.

inline double mirror_point(double z, double beta_prime) {
  return std::pow(1.0 + z, -1.0 / beta_prime);
}

/// alpha = 1: additive step; alpha > 1: multiplicative step.
inline double packing_primal_update(double x_hat, double truncated, const PackingRegParams& p) {
  if (p.alpha == 1.0) return x_hat - p.beta / (4.0 * (1.0 + p.beta)) * truncated;
  return (1.0 - p.beta * (1.0 - p.alpha) / (4.0 * (1.0 + p.alpha * p.beta)) * truncated) * x_hat;
}

inline double mirror_update(double z, double truncated, double epsilon, double step_size) {
  return z + epsilon * step_size * truncated;
}

/// Starting point: allocation (1-eps)/(n rho) in every coordinate; for alpha < 1
/// the mirror state z_j = x_hat_j^{-beta'} - 1 reproduces x_hat on the first step.
PackingState init_packing(const PackingInstance& instance, const PackingRegParams& params);

/// One iteration of the matching alpha branch. Throws FeasibilityViolation
/// if the new iterate leaves {A x <= 1}.
PackingState step(PackingState state, const PackingInstance& instance,
                  const PackingRegParams& params);

FeasibilityReport feasibility_report(const SparseNonnegMatrix& a, std::span<const double> x);

/// Duality gap for alpha > 1. The dual direction is y_i ~ load_i^{1/beta};
/// its length is chosen to maximize the dual function along that ray.
DualityGap packing_duality_gap(const SparseNonnegMatrix& a, std::span<const double> x_hat,
                               const PackingRegParams& params);

/// g(y) = -<1, y> + alpha/(alpha-1) sum_j (A^T y)_j^{(alpha-1)/alpha}, alpha > 1.
double packing_dual_value(const SparseNonnegMatrix& a, std::span<const double> y, double alpha);

/// sum_i y_i / sum_i y_i load_i with y_i ~ load_i^{1/beta}; approximate
/// complementary slackness holds when this is at most 1 + eps.
double slackness_ratio(std::span<const double> loads, double beta);

/// Iterates the packing method with a private workspace. Loads of the
/// current iterate are always available through loads().
class PackingSolver {
 public:
  PackingSolver(const PackingInstance& instance, const PackingConfig& config);
  /// Uses `params` instead of the derived constants (test hook).
  PackingSolver(const PackingInstance& instance, const PackingConfig& config,
                const PackingRegParams& params);

  void step();
  PackingSolution run();

  const PackingState& state() const noexcept { return state_; }
  const PackingRegParams& params() const noexcept { return params_; }
  std::span<const double> loads() const noexcept { return loads_; }
  double max_load() const noexcept { return max_load_; }
  std::uint64_t budget() const noexcept { return budget_; }
  std::uint64_t trace_stride() const noexcept { return stride_; }
  RegularizedValue current_f_r() const;

 private:
  void refresh_loads();
  void compute_truncated();
  void record_trace();

  const PackingInstance& instance_;
  PackingConfig config_;
  PackingRegParams params_;
  PackingState state_;
  std::uint64_t budget_ = 0;
  std::uint64_t stride_ = 1;
  bool stopped_early_ = false;
  double max_load_ = 0.0;
  std::vector<double> loads_;
  std::vector<double> weights_;
  std::vector<double> terms_;
  std::vector<double> truncated_;
};

PackingSolution solve_packing(const PackingInstance& instance, const PackingConfig& config);

/// Trace row for an iterate whose loads are already known.
TraceRow packing_trace_row(const PackingInstance& instance, const PackingRegParams& params,
                           std::span<const double> x_hat, std::span<const double> u,
                           std::span<const double> loads, std::uint64_t k);

/// Default trace stride max(1, budget/1000) unless the config overrides it.
std::uint64_t packing_trace_stride(const PackingConfig& config, std::uint64_t budget);

/// True when the alpha > 1 early-stop rule fires on this trace row.
bool early_stop_reached(const TraceRow& row, const PackingInstance& instance,
                        const PackingRegParams& params);

/// Assemble the reported solution from a finished state (shared with the
/// round engine).
PackingSolution finalize_packing(const PackingInstance& instance, const PackingRegParams& params,
                                 const PackingState& state);

}  // namespace fairalloc
