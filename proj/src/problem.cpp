#include "fairalloc/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairalloc/error.hpp"

namespace fairalloc {

namespace {

std::vector<Entry> drop_zeros(std::vector<Entry> raw) {
  for (const Entry& e : raw) {
    if (e.value < 0.0) {
      throw Error(ErrorCode::NegativeEntry, "negative value at (" + std::to_string(e.row + 1) +
                                                ", " + std::to_string(e.col + 1) + ")");
    }
  }
  std::erase_if(raw, [](const Entry& e) { return e.value == 0.0; });
  if (raw.empty()) throw Error(ErrorCode::AllZero, "matrix has no positive entry");
  return raw;
}

SparseNonnegMatrix standardized_matrix(std::size_t rows, std::size_t cols, std::vector<Entry> raw,
                                       double& scale, double& rho) {
  SparseNonnegMatrix original = SparseNonnegMatrix::from_entries(rows, cols, drop_zeros(std::move(raw)));
  scale = original.min_value();
  SparseNonnegMatrix standardized = original.divided(scale);
  rho = standardized.max_value();
  return standardized;
}

}  // namespace

double packing_epsilon_limit(double alpha) {
  if (alpha == 1.0) return 0.5;
  return std::min(0.5, 1.0 / (10.0 * std::abs(alpha - 1.0)));
}

void validate(const PackingConfig& config) {
  if (!std::isfinite(config.alpha) || config.alpha < 0.0) {
    throw Error(ErrorCode::InvalidAlpha, "alpha must be a finite value >= 0");
  }
  const double limit = packing_epsilon_limit(config.alpha);
  if (!(config.epsilon > 0.0 && config.epsilon <= limit)) {
    throw Error(ErrorCode::EpsilonOutOfRange,
                "epsilon must lie in (0, min{1/2, 1/(10|alpha-1|)}] = (0, " +
                    std::to_string(limit) + "]");
  }
}

void validate(const CoveringConfig& config) {
  if (!std::isfinite(config.beta)) throw Error(ErrorCode::InvalidAlpha, "beta must be finite");
  if (!(config.epsilon > 0.0 && config.epsilon <= 0.5)) {
    throw Error(ErrorCode::EpsilonOutOfRange, "epsilon must lie in (0, 1/2]");
  }
}

PackingInstance standardize_packing(std::size_t rows, std::size_t cols, std::vector<Entry> raw,
                                    double alpha) {
  PackingInstance out;
  out.matrix = standardized_matrix(rows, cols, std::move(raw), out.scaling.scale, out.rho);
  out.scaling.alpha_used = alpha;
  return out;
}

CoveringInstance standardize_covering(std::size_t rows, std::size_t cols, std::vector<Entry> raw,
                                      double beta) {
  CoveringInstance out;
  out.matrix = standardized_matrix(rows, cols, std::move(raw), out.scaling.scale, out.rho);
  out.scaling.alpha_used = beta;
  return out;
}

double f_alpha_value(std::span<const double> x, double alpha) {
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < 0.0 || std::isnan(x[j])) {
      throw Error(ErrorCode::NegativeCoordinate, "coordinate " + std::to_string(j + 1));
    }
    if (alpha >= 1.0 && x[j] == 0.0) {
      throw Error(ErrorCode::NonPositiveCoordinate, "coordinate " + std::to_string(j + 1));
    }
  }
  if (alpha == 1.0) {
    for (double v : x) total += std::log(v);
  } else {
    const double e = 1.0 - alpha;
    for (double v : x) total += std::pow(v, e) / e;
  }
  return total;
}

double g_beta_value(std::span<const double> y, double beta) {
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0.0 || std::isnan(y[i])) {
      throw Error(ErrorCode::NegativeCoordinate, "coordinate " + std::to_string(i + 1));
    }
    total += std::pow(y[i], 1.0 + beta);
  }
  return total / (1.0 + beta);
}

double transform(double x_hat, double alpha) {
  if (alpha == 1.0) return std::exp(x_hat);
  if (!(x_hat > 0.0)) throw Error(ErrorCode::DomainError, "transformed coordinate must be > 0");
  return std::pow(x_hat, 1.0 / (1.0 - alpha));
}

double transform_inverse(double x, double alpha) {
  if (!(x > 0.0)) throw Error(ErrorCode::DomainError, "allocation coordinate must be > 0");
  if (alpha == 1.0) return std::log(x);
  return std::pow(x, 1.0 - alpha);
}

std::vector<double> transform(std::span<const double> x_hat, double alpha) {
  std::vector<double> out(x_hat.size());
  std::transform(x_hat.begin(), x_hat.end(), out.begin(),
                 [alpha](double v) { return transform(v, alpha); });
  return out;
}

std::vector<double> transform_inverse(std::span<const double> x, double alpha) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(),
                 [alpha](double v) { return transform_inverse(v, alpha); });
  return out;
}

void constraint_loads(const SparseNonnegMatrix& a, std::span<const double> x,
                      std::span<double> out) {
  if (x.size() != a.cols() || out.size() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "constraint_loads: vector length");
  }
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_indices(i);
    const auto vals = a.row_values(i);
    double sum = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) sum += vals[k] * x[cols[k]];
    out[i] = sum;
  }
}

std::vector<double> constraint_loads(const SparseNonnegMatrix& a, std::span<const double> x) {
  std::vector<double> out(a.rows());
  constraint_loads(a, x, out);
  return out;
}

std::vector<double> column_loads(const SparseNonnegMatrix& a, std::span<const double> y) {
  if (y.size() != a.rows()) throw Error(ErrorCode::DimensionMismatch, "column_loads: vector length");
  std::vector<double> out(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const auto rows = a.col_indices(j);
    const auto vals = a.col_values(j);
    double sum = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) sum += vals[k] * y[rows[k]];
    out[j] = sum;
  }
  return out;
}

ValueBounds optimum_bounds(const PackingInstance& instance, double alpha) {
  const double n = static_cast<double>(instance.matrix.cols());
  if (alpha == 1.0) return {-n * std::log(n * instance.rho), 0.0};
  const double lead = n / (1.0 - alpha);
  const double scaled = lead * std::pow(n * instance.rho, alpha - 1.0);
  // for alpha > 1 both terms are negative and the scaled one is the smaller
  return {std::min(lead, scaled), std::max(lead, scaled)};
}

ValueBounds covering_optimum_bounds(const CoveringInstance& instance, double beta) {
  const double m = static_cast<double>(instance.matrix.rows());
  const double upper = m / (1.0 + beta);
  return {std::pow(1.0 / (m * instance.rho), 1.0 + beta) * upper, upper};
}

std::vector<double> to_original(std::span<const double> standardized,
                                const ScalingRecord& scaling) {
  std::vector<double> out(standardized.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = standardized[j] / scaling.scale;
  return out;
}

}  // namespace fairalloc
