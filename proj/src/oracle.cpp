#include "fairalloc/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "fairalloc/error.hpp"

namespace fairalloc {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

MatrixXd dense(const SparseNonnegMatrix& a) {
  MatrixXd out = MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()),
                                static_cast<Eigen::Index>(a.cols()));
  for (const Entry& e : a.entries()) {
    out(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = e.value;
  }
  return out;
}

double utility(const VectorXd& x, double alpha) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    total += alpha == 1.0 ? std::log(x(j)) : std::pow(x(j), 1.0 - alpha) / (1.0 - alpha);
  }
  return total;
}

double cost(const VectorXd& y, double beta) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) total += std::pow(y(i), 1.0 + beta);
  return total / (1.0 + beta);
}

std::vector<double> to_vector(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Smooth convex function with value, gradient and Hessian.
struct Convex {
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> gradient;
  std::function<MatrixXd(const VectorXd&)> hessian;
};

struct BarrierResult {
  VectorXd point;
  double gap_bound = 0.0;
};

// Minimizes phi over {G v < h} starting from a strictly feasible v0: Newton
// centering on t*phi - sum ln(h - G v) for t growing geometrically.
BarrierResult barrier_minimize(const Convex& phi, const MatrixXd& g, const VectorXd& h,
                               VectorXd v, double rel_gap) {
  constexpr int kNewtonBudget = 20000;
  constexpr double kGrowth = 8.0;
  const double constraints = static_cast<double>(g.rows());
  auto slack = [&](const VectorXd& p) -> VectorXd { return h - g * p; };
  auto merit = [&](const VectorXd& p, double t) {
    const VectorXd s = slack(p);
    if ((s.array() <= 0.0).any()) return kInf;
    const double f = phi.value(p);
    if (!std::isfinite(f)) return kInf;
    return t * f - s.array().log().sum();
  };

  double t = 1.0;
  int newton_steps = 0;
  while (true) {
    for (int inner = 0;; ++inner) {
      if (++newton_steps > kNewtonBudget) {
        throw Error(ErrorCode::NonConvergence, "barrier Newton budget exhausted");
      }
      const VectorXd s = slack(v);
      const VectorXd inv = s.cwiseInverse();
      const VectorXd grad = t * phi.gradient(v) + g.transpose() * inv;
      const MatrixXd hess =
          t * phi.hessian(v) + g.transpose() * inv.cwiseAbs2().asDiagonal() * g;
      const VectorXd step = hess.ldlt().solve(-grad);
      const double decrement = -grad.dot(step);
      if (!std::isfinite(decrement)) {
        throw Error(ErrorCode::NonConvergence, "barrier Newton produced a non-finite step");
      }
      const double current = merit(v, t);
      if (decrement / 2.0 <= 1e-10) break;
      double length = 1.0;
      bool moved = false;
      while (length > 1e-14) {
        const VectorXd trial = v + length * step;
        const double value = merit(trial, t);
        if (value < current && value <= current - 0.25 * length * decrement) {
          v = trial;
          moved = true;
          break;
        }
        length *= 0.5;
      }
      // no descent left at working precision: the point is as centered as it gets
      if (!moved) break;
    }
    const double bound = constraints / t;
    const double scale = std::abs(phi.value(v));
    // the absolute floor only matters when the optimum value is ~0
    if (bound <= rel_gap * scale || bound <= 1e-15) return {v, bound / std::max(scale, 1e-300)};
    t *= kGrowth;
  }
}

void check_alpha(double alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw Error(ErrorCode::DomainError, "alpha must be a finite value >= 0");
  }
}

void check_positive(std::span<const double> a, const char* what) {
  if (a.empty()) throw Error(ErrorCode::DomainError, std::string(what) + " is empty");
  for (double v : a) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::DomainError, std::string(what) + " must be positive and finite");
    }
  }
}

void check_tol(double tol) {
  if (!(tol >= 1e-9) || !std::isfinite(tol)) {
    throw Error(ErrorCode::DomainError, "oracle tolerance must be >= 1e-9");
  }
}

}  // namespace

std::string_view to_string(OracleMethod method) {
  return method == OracleMethod::ClosedForm ? "closed-form" : "newton";
}

OracleSolution single_constraint_packing_optimum(std::span<const double> a, double alpha) {
  check_alpha(alpha);
  check_positive(a, "constraint row");
  const auto n = static_cast<Eigen::Index>(a.size());
  VectorXd x = VectorXd::Zero(n);
  if (alpha == 0.0) {
    const auto best = std::min_element(a.begin(), a.end()) - a.begin();
    x(best) = 1.0 / a[static_cast<std::size_t>(best)];
  } else {
    double lambda_root = 0.0;  // lambda^{1/alpha}
    for (double v : a) lambda_root += std::pow(v, (alpha - 1.0) / alpha);
    for (Eigen::Index j = 0; j < n; ++j) {
      x(j) = std::pow(a[static_cast<std::size_t>(j)], -1.0 / alpha) / lambda_root;
    }
  }
  return {to_vector(x), utility(x, alpha), OracleMethod::ClosedForm, 0.0};
}

OracleSolution diagonal_packing_optimum(std::span<const double> d, double alpha) {
  check_alpha(alpha);
  check_positive(d, "diagonal");
  VectorXd x(static_cast<Eigen::Index>(d.size()));
  for (std::size_t j = 0; j < d.size(); ++j) x(static_cast<Eigen::Index>(j)) = 1.0 / d[j];
  return {to_vector(x), utility(x, alpha), OracleMethod::ClosedForm, 0.0};
}

OracleSolution small_dense_packing_optimum(const SparseNonnegMatrix& a, double alpha, double tol) {
  check_alpha(alpha);
  check_tol(tol);
  const MatrixXd am = dense(a);
  const Eigen::Index m = am.rows();
  const Eigen::Index n = am.cols();

  // minimize -f_alpha(x) over A x <= 1, -x <= 0
  Convex phi;
  phi.value = [alpha](const VectorXd& x) {
    if ((x.array() <= 0.0).any()) return kInf;
    return -utility(x, alpha);
  };
  phi.gradient = [alpha](const VectorXd& x) -> VectorXd {
    return -x.array().pow(-alpha).matrix();
  };
  phi.hessian = [alpha](const VectorXd& x) -> MatrixXd {
    if (alpha == 0.0) return MatrixXd::Zero(x.size(), x.size());
    return (alpha * x.array().pow(-alpha - 1.0)).matrix().asDiagonal();
  };

  MatrixXd g(m + n, n);
  g << am, -MatrixXd::Identity(n, n);
  VectorXd h(m + n);
  h << VectorXd::Ones(m), VectorXd::Zero(n);
  const double widest_row = am.rowwise().sum().maxCoeff();
  const VectorXd start = VectorXd::Constant(n, 0.5 / widest_row);

  const BarrierResult r = barrier_minimize(phi, g, h, start, 1e-3 * tol);
  return {to_vector(r.point), utility(r.point, alpha), OracleMethod::Newton, r.gap_bound};
}

OracleSolution covering_closed_form_optimum(const SparseNonnegMatrix& a, double beta) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw Error(ErrorCode::DomainError, "beta must be a finite value >= 0");
  }
  const std::size_t m = a.rows();
  VectorXd y = VectorXd::Zero(static_cast<Eigen::Index>(m));

  bool diagonal = a.rows() == a.cols() && a.nnz() == m;
  for (std::size_t i = 0; diagonal && i < m; ++i) diagonal = a.contains(i, i);
  if (diagonal) {
    for (std::size_t i = 0; i < m; ++i) y(static_cast<Eigen::Index>(i)) = 1.0 / a.at(i, i);
  } else if (a.cols() == 1) {
    std::vector<double> col(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) col[i] = a.at(i, 0);
    if (beta == 0.0) {
      // linear cost: all weight on the largest coefficient, lowest index on ties
      const auto best = std::max_element(col.begin(), col.end()) - col.begin();
      y(best) = 1.0 / col[static_cast<std::size_t>(best)];
    } else {
      double norm = 0.0;
      for (double v : col) {
        if (v > 0.0) norm += std::pow(v, 1.0 + 1.0 / beta);
      }
      for (std::size_t i = 0; i < m; ++i) {
        if (col[i] > 0.0) y(static_cast<Eigen::Index>(i)) = std::pow(col[i], 1.0 / beta) / norm;
      }
    }
  } else {
    throw Error(ErrorCode::UnsupportedStructure,
                "closed form needs a diagonal matrix or a single column");
  }
  return {to_vector(y), cost(y, beta), OracleMethod::ClosedForm, 0.0};
}

OracleSolution small_dense_covering_optimum(const SparseNonnegMatrix& a, double beta, double tol) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw Error(ErrorCode::DomainError, "beta must be a finite value >= 0");
  }
  check_tol(tol);
  const MatrixXd am = dense(a);
  const Eigen::Index m = am.rows();
  const Eigen::Index n = am.cols();

  Convex phi;
  phi.value = [beta](const VectorXd& y) {
    if ((y.array() <= 0.0).any()) return kInf;
    return cost(y, beta);
  };
  phi.gradient = [beta](const VectorXd& y) -> VectorXd { return y.array().pow(beta).matrix(); };
  phi.hessian = [beta](const VectorXd& y) -> MatrixXd {
    if (beta == 0.0) return MatrixXd::Zero(y.size(), y.size());
    return (beta * y.array().pow(beta - 1.0)).matrix().asDiagonal();
  };

  // -A^T y <= -1 and -y <= 0
  MatrixXd g(n + m, m);
  g << -am.transpose(), -MatrixXd::Identity(m, m);
  VectorXd h(n + m);
  h << -VectorXd::Ones(n), VectorXd::Zero(m);
  const double thinnest_col = am.colwise().sum().minCoeff();
  const VectorXd start = VectorXd::Constant(m, 2.0 / thinnest_col);

  const BarrierResult r = barrier_minimize(phi, g, h, start, 1e-3 * tol);
  return {to_vector(r.point), cost(r.point, beta), OracleMethod::Newton, r.gap_bound};
}

OracleSolution covering_dual_optimum(const SparseNonnegMatrix& a, double beta, double tol) {
  if (!std::isfinite(beta) || !(beta > 0.0)) {
    throw Error(ErrorCode::DomainError, "the covering dual needs beta > 0");
  }
  check_tol(tol);
  const MatrixXd am = dense(a);
  const Eigen::Index n = am.cols();
  const double power = (1.0 + beta) / beta;

  auto dual_value = [&am, beta, power](const VectorXd& x) {
    const VectorXd loads = am * x;
    return x.sum() - beta / (1.0 + beta) * loads.array().pow(power).sum();
  };
  Convex phi;
  phi.value = [&](const VectorXd& x) {
    if ((x.array() <= 0.0).any()) return kInf;
    return -dual_value(x);
  };
  phi.gradient = [&am, beta](const VectorXd& x) -> VectorXd {
    const VectorXd weights = (am * x).array().pow(1.0 / beta).matrix();
    return -VectorXd::Ones(x.size()) + am.transpose() * weights;
  };
  phi.hessian = [&am, beta](const VectorXd& x) -> MatrixXd {
    const VectorXd curvature = ((am * x).array().pow(1.0 / beta - 1.0) / beta).matrix();
    return am.transpose() * curvature.asDiagonal() * am;
  };

  const MatrixXd g = -MatrixXd::Identity(n, n);
  const VectorXd h = VectorXd::Zero(n);
  const double widest_row = am.rowwise().sum().maxCoeff();
  const VectorXd start = VectorXd::Constant(n, 0.5 / widest_row);

  BarrierResult r = barrier_minimize(phi, g, h, start, 1e-3 * tol);
  // The dual is flat near its maximizer, so a small value gap still leaves the
  // point loose. Polish with undamped Newton on the stationarity condition.
  VectorXd& x = r.point;
  double residual = phi.gradient(x).norm();
  for (int k = 0; k < 50 && residual > 0.0; ++k) {
    const VectorXd trial = x + phi.hessian(x).ldlt().solve(-phi.gradient(x));
    if ((trial.array() <= 0.0).any()) break;
    const double next = phi.gradient(trial).norm();
    if (!(next < residual)) break;
    x = trial;
    residual = next;
  }
  return {to_vector(x), dual_value(x), OracleMethod::Newton, r.gap_bound};
}

}  // namespace fairalloc
