#include <doctest.h>

#include <cmath>

#include "fairalloc/covering.hpp"
#include "fairalloc/error.hpp"
#include "support/random_instances.hpp"

using namespace fairalloc;
using fairalloc::testing::covering_from_dense;
using fairalloc::testing::rel_diff;

namespace {

CoveringConfig cover_config(double beta, double epsilon,
                            std::optional<std::uint64_t> max_iterations = std::nullopt) {
  CoveringConfig c;
  c.beta = beta;
  c.epsilon = epsilon;
  c.max_iterations = max_iterations;
  return c;
}

CoveringRegParams params_for(const CoveringInstance& c, double beta, double epsilon) {
  return derive_covering_params(c.matrix.rows(), c.matrix.cols(), c.rho, beta, epsilon);
}

}  // namespace

TEST_CASE("covering init examples") {
  SUBCASE("1x1") {
    const CoveringInstance c = covering_from_dense(1, 1, {1}, 1.0);
    const CoveringState s = init_covering(c, params_for(c, 1.0, 0.1));
    CHECK(s.x[0] == 1.0);
    CHECK(s.z[0] == 0.0);
    CHECK(s.y_avg[0] == 0.0);
    CHECK(s.k == 0);
  }
  SUBCASE("identity 2x2") {
    const CoveringInstance c = covering_from_dense(2, 2, fairalloc::testing::identity(2), 1.0);
    const CoveringState s = init_covering(c, params_for(c, 1.0, 0.1));
    CHECK(s.x[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(s.x[1] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(s.y_avg == std::vector<double>{0.0, 0.0});
  }
}

TEST_CASE("1x1 fixed point at the optimum") {
  const CoveringInstance c = covering_from_dense(1, 1, {1}, 1.0);
  const CoveringRegParams p = params_for(c, 1.0, 0.1);
  CoveringState s = init_covering(c, p);
  s = step_covering(s, c, p);
  CHECK(s.x[0] == 1.0);
  CHECK(s.z[0] == 0.0);
  CHECK(s.y_avg[0] == 1.0);
  CHECK(s.k == 1);
}

TEST_CASE("running average identity") {
  CHECK(covering_average(0.0, 0.3, 1.0, 1) == doctest::Approx(0.3));
  const double y1 = covering_average(0.0, 0.4, 1.0, 1);
  const double y2 = covering_average(y1, 0.8, 1.0, 2);
  CHECK(y2 == doctest::Approx(0.6));

  // y_avg after k steps equals the plain mean of the per-step duals
  const CoveringInstance c = fairalloc::testing::random_covering(3, {6, 6, 0.5, 10.0}, 1.5);
  const CoveringRegParams p = params_for(c, 1.5, 0.1);
  CoveringState s = init_covering(c, p);
  std::vector<double> sum(c.matrix.rows(), 0.0);
  for (int k = 0; k < 300; ++k) {
    s = step_covering(s, c, p);
    const auto loads = constraint_loads(c.matrix, s.x);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += std::pow(loads[i], 1.0 / p.beta);
    for (double v : s.x) CHECK(v > 0.0);
  }
  for (std::size_t i = 0; i < sum.size(); ++i) {
    CHECK(rel_diff(s.y_avg[i], sum[i] / 300.0) < 1e-9);
    CHECK(s.y_avg[i] >= 0.0);
  }
}

TEST_CASE("covering residual examples") {
  const SparseNonnegMatrix id2 = fairalloc::testing::dense_matrix(2, 2, {1, 0, 0, 1});
  const CoveringResidual ok = covering_residual(id2, std::vector{1.0, 1.0});
  CHECK(ok.min_load == 1.0);
  CHECK(ok.violated_columns.empty());
  const CoveringResidual half = covering_residual(id2, std::vector{1.0, 0.5});
  CHECK(half.min_load == 0.5);
  CHECK(half.violated_columns == std::vector<std::size_t>{1});
  const CoveringResidual none = covering_residual(id2, std::vector{0.0, 0.0});
  CHECK(none.min_load == 0.0);
  CHECK(none.violated_columns.size() == 2);
  CHECK_THROWS_AS(covering_residual(id2, std::vector{1.0}), Error);
}

TEST_CASE("covering solve examples") {
  SUBCASE("identity 2x2, beta 1") {
    const CoveringInstance c = covering_from_dense(2, 2, fairalloc::testing::identity(2), 1.0);
    const CoveringSolution s = solve_covering(c, cover_config(1.0, 0.1));
    CHECK(s.iterations_run == 9445);
    CHECK(s.certificate_checked);
    CHECK(s.pre_scale_residual >= 0.95);
    CHECK(s.cost_avg <= 1.6);
    CHECK(s.min_column_load >= 1.0);
    for (std::size_t i = 0; i < 2; ++i) CHECK(s.y[i] == doctest::Approx(1.1 * s.y_avg[i]));
    CHECK(s.gap >= 0.0);
  }
  SUBCASE("single column (1;1), beta 1") {
    const CoveringInstance c = covering_from_dense(2, 1, {1, 1}, 1.0);
    const CoveringSolution s = solve_covering(c, cover_config(1.0, 0.1));
    CHECK(s.pre_scale_residual >= 0.95);
    CHECK(s.cost_avg <= 0.25 * (1.0 + 3.0 * 0.1 * 2.0));
    CHECK(s.min_column_load >= 1.0);
  }
  SUBCASE("beta 0 resets") {
    const CoveringInstance c = covering_from_dense(2, 2, fairalloc::testing::identity(2), 0.0);
    const CoveringSolution s = solve_covering(c, cover_config(0.0, 0.1));
    CHECK(s.params.beta_was_reset);
    const double beta = s.params.beta;
    // diagonal optimum y* = 1 for every beta
    const double optimum = 2.0 / (1.0 + beta);
    CHECK(s.cost_avg <= (1.0 + 3.0 * 0.1 * (1.0 + beta)) * optimum);
    CHECK(s.min_column_load >= 1.0);
  }
}

TEST_CASE("cut-short runs skip the certificate check") {
  const CoveringInstance c = covering_from_dense(2, 2, fairalloc::testing::identity(2), 1.0);
  const CoveringSolution s = solve_covering(c, cover_config(1.0, 0.1, 3));
  CHECK_FALSE(s.certificate_checked);
  CHECK(s.iterations_run == 3);
}

TEST_CASE("covering maps back to the original scale") {
  // column (2; 4) standardizes to (1; 2) with scale 2
  const std::vector<Entry> e{{0, 0, 2.0}, {1, 0, 4.0}};
  const CoveringInstance c = standardize_covering(2, 1, e, 1.0);
  const CoveringSolution s = solve_covering(c, cover_config(1.0, 0.1));
  const SparseNonnegMatrix original = SparseNonnegMatrix::from_entries(2, 1, e);
  CHECK(covering_residual(original, s.y).min_load >= 1.0 - 1e-15);
  CHECK(rel_diff(covering_residual(original, s.y).min_load, s.min_column_load) < 1e-14);
  // optimum of min (y1^2 + y2^2)/2 s.t. 2 y1 + 4 y2 >= 1 is 1/40
  CHECK(s.cost_avg <= (1.0 + 3.0 * 0.1 * 2.0) / 40.0);
  CHECK(s.gap >= 0.0);
  CHECK(s.dual_value <= 1.0 / 40.0 + 1e-15);
}

TEST_CASE("covering guarantees on random instances") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    for (double beta : {0.5, 1.0, 2.0}) {
      CAPTURE(seed);
      CAPTURE(beta);
      const CoveringInstance c =
          fairalloc::testing::random_covering(seed * 13, {5, 5, 0.5, 8.0}, beta);
      const CoveringSolution s = solve_covering(c, cover_config(beta, 0.2));
      CHECK(s.pre_scale_residual >= 1.0 - 0.1);
      CHECK(s.min_column_load >= 1.0);
      CHECK(s.gap >= -1e-12);
      for (double y : s.y) CHECK(y >= 0.0);
    }
  }
}
