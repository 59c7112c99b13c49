#include "fairalloc/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fairalloc/error.hpp"

namespace fairalloc {

namespace {

struct Workspace {
  std::vector<double> loads;
  std::vector<double> weights;
  std::vector<double> terms;
};

void advance(CoveringState& state, const SparseNonnegMatrix& a, const CoveringRegParams& params,
             Workspace& ws) {
  const BarrierParams barrier = barrier_of(params);
  const std::size_t n = a.cols();
  for (std::size_t j = 0; j < n; ++j) state.x[j] = mirror_point(state.z[j], params.beta_prime);
  ++state.k;
  constraint_loads(a, state.x, ws.loads);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    state.y_avg[i] = covering_average(state.y_avg[i], ws.loads[i], params.beta, state.k);
    ws.weights[i] = row_log_weight(ws.loads[i], barrier);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto rows = a.col_indices(j);
    const auto logs = a.col_log_values(j);
    ws.terms.resize(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) ws.terms[k] = logs[k] + ws.weights[rows[k]];
    const double t = coordinate_gradient(0.0, ws.terms, 0.0).truncated;
    state.z[j] = mirror_update(state.z[j], t, params.epsilon, params.step_size);
  }
}

}  // namespace

CoveringState init_covering(const CoveringInstance& instance, const CoveringRegParams& params) {
  const double m = static_cast<double>(instance.matrix.rows());
  const double n = static_cast<double>(instance.matrix.cols());
  const double start = std::pow(1.0 / (m * instance.rho), params.beta) / (n * instance.rho);
  CoveringState state;
  state.x.assign(instance.matrix.cols(), start);
  state.z.assign(instance.matrix.cols(), std::pow(start, -params.beta_prime) - 1.0);
  state.y_avg.assign(instance.matrix.rows(), 0.0);
  return state;
}

CoveringState step_covering(CoveringState state, const CoveringInstance& instance,
                            const CoveringRegParams& params) {
  const SparseNonnegMatrix& a = instance.matrix;
  if (state.x.size() != a.cols() || state.z.size() != a.cols() || state.y_avg.size() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "step_covering: state size");
  }
  Workspace ws{std::vector<double>(a.rows()), std::vector<double>(a.rows()), {}};
  advance(state, a, params, ws);
  return state;
}

CoveringResidual covering_residual(const SparseNonnegMatrix& a, std::span<const double> y) {
  for (double v : y) {
    if (v < 0.0) throw Error(ErrorCode::NegativeCoordinate, "covering_residual: y must be >= 0");
  }
  const std::vector<double> aty = column_loads(a, y);
  CoveringResidual out;
  out.min_load = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < aty.size(); ++j) {
    out.min_load = std::min(out.min_load, aty[j]);
    if (aty[j] < 1.0) out.violated_columns.push_back(j);
  }
  return out;
}

TraceRow covering_trace_row(const CoveringInstance& instance, const CoveringRegParams& params,
                            std::span<const double> x, std::span<const double> y_avg,
                            std::span<const double> loads, std::uint64_t k) {
  TraceRow row;
  row.iteration = k;
  row.utility = g_beta_value(to_original(y_avg, instance.scaling), params.beta);
  for (double l : loads) row.max_load = std::max(row.max_load, l);
  row.f_r = f_r_from_loads(x, loads, barrier_of(params));
  return row;
}

double covering_dual_value(const SparseNonnegMatrix& a, std::span<const double> x, double beta) {
  const std::vector<double> loads = constraint_loads(a, x);
  const double power = (1.0 + beta) / beta;
  double linear = 0.0;
  for (double v : x) linear += v;
  double barrier = 0.0;
  for (double l : loads) barrier += std::pow(l, power);
  return linear - beta / (1.0 + beta) * barrier;
}

std::uint64_t covering_trace_stride(const CoveringConfig& config, std::uint64_t budget) {
  if (config.trace_stride && *config.trace_stride > 0) return *config.trace_stride;
  return std::max<std::uint64_t>(1, budget / 1000);
}

CoveringSolution finalize_covering(const CoveringInstance& instance,
                                   const CoveringRegParams& params, const CoveringState& state,
                                   bool full_run) {
  CoveringSolution sol;
  sol.params = params;
  sol.iterations_run = state.k;
  sol.pre_scale_residual = covering_residual(instance.matrix, state.y_avg).min_load;
  sol.certificate_checked = full_run;
  if (full_run && sol.pre_scale_residual < 1.0 - params.epsilon / 2.0) {
    throw Error(ErrorCode::CertificateShortfall,
                "min column load of the averaged certificate is " +
                    std::to_string(sol.pre_scale_residual) + " < 1 - eps/2");
  }
  std::vector<double> scaled(state.y_avg.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = (1.0 + params.epsilon) * state.y_avg[i];
  sol.min_column_load = covering_residual(instance.matrix, scaled).min_load;
  sol.y_avg = to_original(state.y_avg, instance.scaling);
  sol.y = to_original(scaled, instance.scaling);
  sol.cost_avg = g_beta_value(sol.y_avg, params.beta);
  sol.cost = g_beta_value(sol.y, params.beta);
  // with A = c A', the dual point for the original matrix is c^{-(1+beta)} x
  const double shrink = std::pow(instance.scaling.scale, -(1.0 + params.beta));
  sol.dual_certificate = state.x;
  for (double& v : sol.dual_certificate) v *= shrink;
  sol.dual_value = shrink * covering_dual_value(instance.matrix, state.x, params.beta);
  sol.gap = sol.cost - sol.dual_value;
  sol.trace = state.trace;
  return sol;
}

CoveringSolver::CoveringSolver(const CoveringInstance& instance, const CoveringConfig& config)
    : instance_(instance), config_(config) {
  params_ = derive_covering_params(instance.matrix.rows(), instance.matrix.cols(), instance.rho,
                                   config.beta, config.epsilon);
  state_ = init_covering(instance_, params_);
  budget_ = config_.max_iterations.value_or(params_.iterations);
  stride_ = covering_trace_stride(config_, budget_);
  loads_ = constraint_loads(instance_.matrix, state_.x);
  weights_.resize(instance_.matrix.rows());
  record_trace();
}

void CoveringSolver::step() {
  Workspace ws{std::move(loads_), std::move(weights_), std::move(terms_)};
  advance(state_, instance_.matrix, params_, ws);
  loads_ = std::move(ws.loads);
  weights_ = std::move(ws.weights);
  terms_ = std::move(ws.terms);
}

void CoveringSolver::record_trace() {
  state_.trace.push_back(
      covering_trace_row(instance_, params_, state_.x, state_.y_avg, loads_, state_.k));
}

CoveringSolution CoveringSolver::run() {
  while (state_.k < budget_) {
    step();
    if (state_.k % stride_ == 0 || state_.k == budget_) record_trace();
  }
  return finalize_covering(instance_, params_, state_, budget_ >= params_.iterations);
}

CoveringSolution solve_covering(const CoveringInstance& instance, const CoveringConfig& config) {
  validate(config);
  CoveringSolver solver(instance, config);
  return solver.run();
}

}  // namespace fairalloc
