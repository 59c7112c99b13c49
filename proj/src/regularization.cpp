#include "fairalloc/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fairalloc/error.hpp"
#include "fairalloc/problem.hpp"

namespace fairalloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t ceil_count(double value) {
  return static_cast<std::uint64_t>(std::ceil(value));
}

void check_dims(std::size_t m, std::size_t n, double rho) {
  if (m == 0 || n == 0) throw Error(ErrorCode::DimensionMismatch, "m and n must be positive");
  if (!(rho >= 1.0)) throw Error(ErrorCode::DomainError, "width must be >= 1");
}

}  // namespace

PackingRegParams PackingRegParams::injected(double alpha, double beta, double log_c) {
  PackingRegParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.log_c = log_c;
  return p;
}

PackingRegParams derive_packing_params(std::size_t m, std::size_t n, double rho, double alpha,
                                       double epsilon) {
  PackingConfig config;
  config.alpha = alpha;
  config.epsilon = epsilon;
  validate(config);
  check_dims(m, n, rho);
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);

  PackingRegParams p;
  p.alpha = alpha;
  p.epsilon = epsilon;
  p.beta = (epsilon / 4.0) / ((1.0 + alpha) * std::log(4.0 * md * nd * rho / epsilon));
  p.log_c = std::log1p(epsilon / 2.0) / p.beta;
  if (alpha < 1.0) {
    p.beta_prime = (1.0 - alpha) * (epsilon / 4.0) / std::log(nd * rho / (1.0 - epsilon));
    p.step_size = (1.0 - alpha) * p.beta * p.beta_prime /
                  (16.0 * epsilon * (1.0 + alpha * p.beta));
    p.iterations = ceil_count(2.0 / ((1.0 - alpha) * p.step_size * epsilon));
  } else if (alpha == 1.0) {
    const double l = std::log(8.0 * rho * md * nd / epsilon);
    p.iterations = ceil_count(10.0 * l * l / (epsilon * p.beta));
  } else {
    const double slack = std::min(alpha - 1.0, 1.0);
    p.iterations = ceil_count(800.0 * (1.0 + alpha) * (1.0 + alpha) *
                              std::log(nd * rho / (epsilon * slack)) / (p.beta * slack));
  }
  return p;
}

CoveringRegParams derive_covering_params(std::size_t m, std::size_t n, double rho, double beta,
                                         double epsilon) {
  CoveringConfig config;
  config.beta = beta;
  config.epsilon = epsilon;
  validate(config);
  check_dims(m, n, rho);
  const double log_size = std::log(static_cast<double>(m) * static_cast<double>(n) * rho / epsilon);

  CoveringRegParams p;
  p.epsilon = epsilon;
  p.beta_floor = (epsilon / 4.0) / log_size;
  if (beta <= 0.0) {
    p.beta = p.beta_floor;
    p.beta_was_reset = true;
  } else {
    p.beta = beta;
    p.below_floor = beta < p.beta_floor;
  }
  p.beta_prime = (epsilon / 4.0) / ((1.0 + p.beta) * log_size);
  p.step_size = p.beta * p.beta_prime / (16.0 * epsilon);
  p.iterations = 1 + ceil_count(2.0 / (p.step_size * epsilon));
  return p;
}

BarrierParams barrier_of(const PackingRegParams& params) {
  return {params.alpha, params.beta, params.log_c};
}

BarrierParams barrier_of(const CoveringRegParams& params) {
  return {0.0, params.beta, 0.0};
}

double row_log_weight(double load, const BarrierParams& params) {
  if (load <= 0.0) return -kInf;
  return params.log_c + std::log(load) / params.beta;
}

double log_gradient_prefactor(double x_hat, double alpha) {
  if (alpha == 1.0) return x_hat;
  if (alpha == 0.0) return 0.0;
  return alpha / (1.0 - alpha) * std::log(x_hat);
}

CoordinateGradient coordinate_gradient(double log_prefactor, std::span<const double> log_terms,
                                       double alpha) {
  double top = -kInf;
  for (double t : log_terms) top = std::max(top, t);
  double log_positive = -kInf;
  if (top > -kInf) {
    double sum = 0.0;
    for (double t : log_terms) sum += std::exp(t - top);
    log_positive = log_prefactor + top + std::log(sum);
  }

  CoordinateGradient g;
  if (log_positive > kSaturationExponent) {
    // the scaled gradient is astronomically above 1: truncation is certain
    g.saturated = true;
    g.truncated = 1.0;
    g.grad = alpha > 1.0 ? -kInf : kInf;
    return g;
  }
  const double scaled = std::exp(log_positive) - 1.0;
  g.grad = alpha == 1.0 ? scaled : scaled / (1.0 - alpha);
  g.truncated = std::min(scaled, 1.0);
  return g;
}

double truncate(double grad, double alpha) {
  const double scaled = alpha == 1.0 ? grad : (1.0 - alpha) * grad;
  if (std::isnan(scaled)) throw Error(ErrorCode::TruncationDomainViolation, "NaN gradient");
  if (scaled > 1.0) return 1.0;
  if (scaled < -1.0) {
    // tolerate the rounding of a (1-alpha) round trip on an exact -1
    if (scaled >= -1.0 - 8.0 * std::numeric_limits<double>::epsilon()) return -1.0;
    throw Error(ErrorCode::TruncationDomainViolation,
                "scaled gradient " + std::to_string(scaled) + " below -1");
  }
  return scaled;
}

RegularizedValue f_r_from_loads(std::span<const double> x_hat, std::span<const double> loads,
                                const BarrierParams& params) {
  double linear = 0.0;
  for (double v : x_hat) linear += v;
  const double primal = params.alpha == 1.0 ? -linear : -linear / (1.0 - params.alpha);

  const double power = (1.0 + params.beta) / params.beta;
  double barrier = 0.0;
  for (double load : loads) {
    if (load <= 0.0) continue;
    const double exponent = params.log_c + power * std::log(load);
    if (exponent > kSaturationExponent) return {kInf, true};
    barrier += std::exp(exponent);
  }
  barrier *= params.beta / (1.0 + params.beta);
  if (!std::isfinite(barrier)) return {kInf, true};
  return {primal + barrier, false};
}

RegularizedValue f_r_value(const SparseNonnegMatrix& a, const BarrierParams& params,
                           std::span<const double> x_hat) {
  if (x_hat.size() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "f_r_value: length");
  const std::vector<double> u = transform(x_hat, params.alpha);
  const std::vector<double> loads = constraint_loads(a, u);
  return f_r_from_loads(x_hat, loads, params);
}

GradientPair grad_f_r(const SparseNonnegMatrix& a, const BarrierParams& params,
                      std::span<const double> x_hat) {
  if (x_hat.size() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "grad_f_r: length");
  const std::vector<double> u = transform(x_hat, params.alpha);
  const std::vector<double> loads = constraint_loads(a, u);

  GradientPair out;
  out.log_loads.resize(a.rows());
  std::vector<double> weights(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    out.log_loads[i] = loads[i] > 0.0 ? std::log(loads[i]) : -kInf;
    weights[i] = row_log_weight(loads[i], params);
  }
  out.grad.resize(a.cols());
  out.truncated.resize(a.cols());
  out.saturated.resize(a.cols());
  std::vector<double> terms;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const auto rows = a.col_indices(j);
    const auto logs = a.col_log_values(j);
    terms.resize(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) terms[k] = logs[k] + weights[rows[k]];
    const CoordinateGradient g =
        coordinate_gradient(log_gradient_prefactor(x_hat[j], params.alpha), terms, params.alpha);
    out.grad[j] = g.grad;
    out.truncated[j] = g.truncated;
    out.saturated[j] = g.saturated ? 1 : 0;
  }
  return out;
}

}  // namespace fairalloc
