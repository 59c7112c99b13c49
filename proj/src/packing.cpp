#include "fairalloc/packing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fairalloc/error.hpp"

namespace fairalloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void throw_infeasible(std::uint64_t k, std::size_t row, double load) {
  throw Error(ErrorCode::FeasibilityViolation, "iteration " + std::to_string(k) + ": row " +
                                                   std::to_string(row + 1) + " has load " +
                                                   std::to_string(load) + " > 1");
}

double max_of(std::span<const double> v) {
  double top = 0.0;
  for (double x : v) top = std::max(top, x);
  return top;
}

// factor mapping standardized utilities (and duals) to the original instance
double utility_scale(const ScalingRecord& scaling, double alpha) {
  return alpha == 1.0 ? 1.0 : std::pow(scaling.scale, alpha - 1.0);
}

}  // namespace

PackingState init_packing(const PackingInstance& instance, const PackingRegParams& params) {
  const std::size_t n = instance.matrix.cols();
  const double start = (1.0 - params.epsilon) / (static_cast<double>(n) * instance.rho);
  PackingState state;
  state.x_hat.assign(n, transform_inverse(start, params.alpha));
  state.u.resize(n);
  for (std::size_t j = 0; j < n; ++j) state.u[j] = transform(state.x_hat[j], params.alpha);
  if (params.alpha < 1.0) {
    state.z.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      state.z[j] = std::pow(state.x_hat[j], -params.beta_prime) - 1.0;
    }
  }
  return state;
}

FeasibilityReport feasibility_report(const SparseNonnegMatrix& a, std::span<const double> x) {
  for (double v : x) {
    if (v < 0.0) throw Error(ErrorCode::NegativeCoordinate, "feasibility_report: x must be >= 0");
  }
  const std::vector<double> loads = constraint_loads(a, x);
  FeasibilityReport report;
  for (std::size_t i = 0; i < loads.size(); ++i) {
    report.max_load = std::max(report.max_load, loads[i]);
    if (loads[i] > 1.0) report.violated_rows.push_back(i);
  }
  report.is_feasible = report.violated_rows.empty();
  return report;
}

double packing_dual_value(const SparseNonnegMatrix& a, std::span<const double> y, double alpha) {
  if (!(alpha > 1.0)) throw Error(ErrorCode::InvalidAlpha, "dual value defined for alpha > 1");
  const std::vector<double> aty = column_loads(a, y);
  double total = 0.0;
  for (double v : y) total -= v;
  const double power = (alpha - 1.0) / alpha;
  double sum = 0.0;
  for (double v : aty) sum += std::pow(v, power);
  return total + alpha / (alpha - 1.0) * sum;
}

DualityGap packing_duality_gap(const SparseNonnegMatrix& a, std::span<const double> x_hat,
                               const PackingRegParams& params) {
  const double alpha = params.alpha;
  if (!(alpha > 1.0)) throw Error(ErrorCode::InvalidAlpha, "duality gap defined for alpha > 1");
  const std::vector<double> u = transform(x_hat, alpha);
  const std::vector<double> loads = constraint_loads(a, u);

  // direction load^{1/beta}, normalized by its largest entry in log space
  double top = -kInf;
  for (double l : loads) {
    if (l > 0.0) top = std::max(top, std::log(l));
  }
  if (top == -kInf) throw Error(ErrorCode::DualDomainError, "all constraint loads are zero");
  std::vector<double> y(loads.size(), 0.0);
  for (std::size_t i = 0; i < loads.size(); ++i) {
    if (loads[i] > 0.0) y[i] = std::exp((std::log(loads[i]) - top) / params.beta);
  }

  // g(t y) = -t S + alpha/(alpha-1) t^{(alpha-1)/alpha} Q peaks at t = (Q/S)^alpha
  const std::vector<double> aty = column_loads(a, y);
  double s = 0.0;
  for (double v : y) s += v;
  double q = 0.0;
  for (double v : aty) q += std::pow(v, (alpha - 1.0) / alpha);
  if (!(q > 0.0)) throw Error(ErrorCode::DualDomainError, "A^T y vanishes");
  const double t = std::pow(q / s, alpha);
  for (double& v : y) v *= t;

  DualityGap out;
  double linear = 0.0;
  for (double v : x_hat) linear += v;
  out.primal_value = linear / (alpha - 1.0);
  out.dual_value = packing_dual_value(a, y, alpha);
  out.gap = out.primal_value - out.dual_value;
  out.y = std::move(y);
  return out;
}

double slackness_ratio(std::span<const double> loads, double beta) {
  double top = -kInf;
  for (double l : loads) {
    if (l > 0.0) top = std::max(top, std::log(l));
  }
  double total = 0.0;
  double weighted = 0.0;
  for (double l : loads) {
    if (l <= 0.0) continue;
    const double y = std::exp((std::log(l) - top) / beta);
    total += y;
    weighted += y * l;
  }
  return total / weighted;
}

TraceRow packing_trace_row(const PackingInstance& instance, const PackingRegParams& params,
                           std::span<const double> x_hat, std::span<const double> u,
                           std::span<const double> loads, std::uint64_t k) {
  TraceRow row;
  row.iteration = k;
  const double scale = utility_scale(instance.scaling, params.alpha);
  row.utility = f_alpha_value(to_original(u, instance.scaling), params.alpha);
  row.max_load = max_of(loads);
  row.f_r = f_r_from_loads(x_hat, loads, barrier_of(params));
  if (params.alpha > 1.0) {
    try {
      row.gap = scale * packing_duality_gap(instance.matrix, x_hat, params).gap;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DualDomainError) throw;
    }
    row.slackness = slackness_ratio(loads, params.beta);
  }
  return row;
}

std::uint64_t packing_trace_stride(const PackingConfig& config, std::uint64_t budget) {
  if (config.trace_stride && *config.trace_stride > 0) return *config.trace_stride;
  return std::max<std::uint64_t>(1, budget / 1000);
}

bool early_stop_reached(const TraceRow& row, const PackingInstance& /*instance*/,
                        const PackingRegParams& params) {
  if (!(params.alpha > 1.0) || !row.gap) return false;
  return *row.gap <= 10.0 * params.epsilon * (params.alpha - 1.0) * std::abs(row.utility);
}

PackingSolution finalize_packing(const PackingInstance& instance, const PackingRegParams& params,
                                 const PackingState& state) {
  const double alpha = params.alpha;
  PackingSolution sol;
  sol.params = params;
  sol.x = to_original(state.u, instance.scaling);
  sol.utility = f_alpha_value(sol.x, alpha);
  sol.eps_f = alpha == 1.0 ? params.epsilon * static_cast<double>(sol.x.size())
                           : params.epsilon * (1.0 - alpha) * sol.utility;
  sol.guarantee_multiplier = alpha > 1.0 ? 10.0 : 3.0;
  sol.iterations_run = state.k;
  sol.max_load = max_of(constraint_loads(instance.matrix, state.u));
  if (alpha > 1.0) {
    const double scale = utility_scale(instance.scaling, alpha);
    try {
      DualityGap gap = packing_duality_gap(instance.matrix, state.x_hat, params);
      for (double& v : gap.y) v *= scale;
      sol.dual_certificate = std::move(gap.y);
      sol.gap = scale * gap.gap;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DualDomainError) throw;
    }
    // complementary slackness is only expected after O(1/beta) iterations
    const auto burn_in = static_cast<std::uint64_t>(std::ceil(10.0 / params.beta));
    for (const TraceRow& row : state.trace) {
      if (row.iteration >= burn_in && row.slackness && *row.slackness > 1.0 + params.epsilon) {
        ++sol.slackness_warnings;
      }
    }
  }
  sol.trace = state.trace;
  return sol;
}

PackingSolver::PackingSolver(const PackingInstance& instance, const PackingConfig& config)
    : PackingSolver(instance, config,
                    derive_packing_params(instance.matrix.rows(), instance.matrix.cols(),
                                          instance.rho, config.alpha, config.epsilon)) {}

PackingSolver::PackingSolver(const PackingInstance& instance, const PackingConfig& config,
                             const PackingRegParams& params)
    : instance_(instance), config_(config), params_(params) {
  state_ = init_packing(instance_, params_);
  budget_ = config_.max_iterations.value_or(params_.iterations);
  stride_ = packing_trace_stride(config_, budget_);
  loads_.resize(instance_.matrix.rows());
  weights_.resize(instance_.matrix.rows());
  truncated_.resize(instance_.matrix.cols());
  refresh_loads();
  record_trace();
}

void PackingSolver::refresh_loads() {
  constraint_loads(instance_.matrix, state_.u, loads_);
  const BarrierParams barrier = barrier_of(params_);
  max_load_ = 0.0;
  for (std::size_t i = 0; i < loads_.size(); ++i) {
    if (loads_[i] > 1.0) throw_infeasible(state_.k, i, loads_[i]);
    max_load_ = std::max(max_load_, loads_[i]);
    weights_[i] = row_log_weight(loads_[i], barrier);
  }
}

void PackingSolver::compute_truncated() {
  const SparseNonnegMatrix& a = instance_.matrix;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const auto rows = a.col_indices(j);
    const auto logs = a.col_log_values(j);
    terms_.resize(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) terms_[k] = logs[k] + weights_[rows[k]];
    truncated_[j] =
        coordinate_gradient(log_gradient_prefactor(state_.x_hat[j], params_.alpha), terms_,
                            params_.alpha)
            .truncated;
  }
}

void PackingSolver::step() {
  const std::size_t n = state_.x_hat.size();
  const double alpha = params_.alpha;
  if (alpha < 1.0) {
    for (std::size_t j = 0; j < n; ++j) {
      state_.x_hat[j] = mirror_point(state_.z[j], params_.beta_prime);
      state_.u[j] = transform(state_.x_hat[j], alpha);
    }
    ++state_.k;
    refresh_loads();
    compute_truncated();
    for (std::size_t j = 0; j < n; ++j) {
      state_.z[j] = mirror_update(state_.z[j], truncated_[j], params_.epsilon, params_.step_size);
    }
  } else {
    compute_truncated();
    for (std::size_t j = 0; j < n; ++j) {
      state_.x_hat[j] = packing_primal_update(state_.x_hat[j], truncated_[j], params_);
      state_.u[j] = transform(state_.x_hat[j], alpha);
    }
    ++state_.k;
    refresh_loads();
  }
}

RegularizedValue PackingSolver::current_f_r() const {
  return f_r_from_loads(state_.x_hat, loads_, barrier_of(params_));
}

void PackingSolver::record_trace() {
  state_.trace.push_back(
      packing_trace_row(instance_, params_, state_.x_hat, state_.u, loads_, state_.k));
}

PackingSolution PackingSolver::run() {
  while (state_.k < budget_) {
    step();
    if (state_.k % stride_ == 0 || state_.k == budget_) {
      record_trace();
      if (config_.early_stop && early_stop_reached(state_.trace.back(), instance_, params_)) {
        stopped_early_ = true;
        break;
      }
    }
  }
  PackingSolution sol = finalize_packing(instance_, params_, state_);
  sol.stopped_early = stopped_early_;
  return sol;
}

PackingState step(PackingState state, const PackingInstance& instance,
                  const PackingRegParams& params) {
  const SparseNonnegMatrix& a = instance.matrix;
  const BarrierParams barrier = barrier_of(params);
  const std::size_t n = state.x_hat.size();
  if (n != a.cols()) throw Error(ErrorCode::DimensionMismatch, "step: state length");

  std::vector<double> loads(a.rows());
  std::vector<double> weights(a.rows());
  auto refresh = [&] {
    constraint_loads(a, state.u, loads);
    for (std::size_t i = 0; i < loads.size(); ++i) {
      if (loads[i] > 1.0) throw_infeasible(state.k, i, loads[i]);
      weights[i] = row_log_weight(loads[i], barrier);
    }
  };
  std::vector<double> truncated(n);
  std::vector<double> terms;
  auto gradient = [&] {
    for (std::size_t j = 0; j < n; ++j) {
      const auto rows = a.col_indices(j);
      const auto logs = a.col_log_values(j);
      terms.resize(rows.size());
      for (std::size_t k = 0; k < rows.size(); ++k) terms[k] = logs[k] + weights[rows[k]];
      truncated[j] =
          coordinate_gradient(log_gradient_prefactor(state.x_hat[j], params.alpha), terms,
                              params.alpha)
              .truncated;
    }
  };

  if (params.alpha < 1.0) {
    for (std::size_t j = 0; j < n; ++j) {
      state.x_hat[j] = mirror_point(state.z[j], params.beta_prime);
      state.u[j] = transform(state.x_hat[j], params.alpha);
    }
    ++state.k;
    refresh();
    gradient();
    for (std::size_t j = 0; j < n; ++j) {
      state.z[j] = mirror_update(state.z[j], truncated[j], params.epsilon, params.step_size);
    }
  } else {
    refresh();
    gradient();
    for (std::size_t j = 0; j < n; ++j) {
      state.x_hat[j] = packing_primal_update(state.x_hat[j], truncated[j], params);
      state.u[j] = transform(state.x_hat[j], params.alpha);
    }
    ++state.k;
    refresh();
  }
  return state;
}

PackingSolution solve_packing(const PackingInstance& instance, const PackingConfig& config) {
  validate(config);
  PackingSolver solver(instance, config);
  return solver.run();
}

}  // namespace fairalloc
