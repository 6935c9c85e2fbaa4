#include <doctest.h>

#include <cmath>
#include <random>

#include "reserving/hybrid.hpp"
#include "test_util.hpp"

using namespace reserving;

namespace {

FuzzyTriangle table2_fuzzy() {
  const auto t = test_util::table2();
  return fuzzify(t, residuals(t, fit_mle(t)));
}

ResidualSet zero_residuals(const RunOffTriangle& t) {
  ResidualSet res;
  res.n = t.n();
  res.p = 2 * t.k() - 1;
  res.pearson = Eigen::VectorXd::Zero(t.n());
  res.adjusted = Eigen::VectorXd::Zero(t.n());
  return res;
}

void check_orthogonality(const FuzzyTriangle& ft, const HybridFit& fit) {
  const auto rel = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double scale = std::max(1.0, a.norm() * b.norm());
    return std::abs(a.dot(b)) / scale;
  };
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ft.log_center.size());
  const Eigen::VectorXd ec = ft.log_center - fit.fitted_log_center;
  const Eigen::VectorXd el = ft.log_left - fit.fitted_log_left;
  const Eigen::VectorXd er = ft.log_right - fit.fitted_log_right;
  CHECK(rel(fit.fitted_log_center, ec) < 1e-8);
  CHECK(rel(ones, ec) < 1e-8);
  CHECK(rel(ones, el) < 1e-8);
  CHECK(rel(ones, er) < 1e-8);
  CHECK(rel(fit.fitted_log_left, el) < 1e-8);
  CHECK(rel(fit.fitted_log_right, er) < 1e-8);
}

}  // namespace

TEST_CASE("fuzzify builds symmetric spreads of half the adjusted residual") {
  const RunOffTriangle t({{100, 50}, {30}});
  ResidualSet res = zero_residuals(t);
  res.adjusted << -4.0, 0.0, 2.0;  // cells (1,1), (2,1), (1,2)
  const auto ft = fuzzify(t, res);
  REQUIRE(ft.cells.size() == 3);
  CHECK(ft.cells[0] == Tfn{98, 100, 102});
  CHECK(ft.cells[1] == Tfn{30, 30, 30});
  CHECK(ft.cells[2] == Tfn{49, 50, 51});
  CHECK(ft.log_left(0) == doctest::Approx(std::log(98.0)));
  CHECK(ft.log_center(0) == doctest::Approx(std::log(100.0)));
  CHECK(ft.log_right(2) == doctest::Approx(std::log(51.0)));
}

TEST_CASE("fuzzify rejects a non-positive left channel") {
  const RunOffTriangle t({{1, 2}, {5}});
  ResidualSet res = zero_residuals(t);
  res.adjusted << 4.0, 0.0, 0.0;  // left channel 1 - 2 = -1
  CHECK_THROWS_AS(fuzzify(t, res), NonPositiveLeftChannel);
  res.adjusted << 2.0, 0.0, 0.0;  // left channel exactly zero
  CHECK_THROWS_AS(fuzzify(t, res), NonPositiveLeftChannel);
}

TEST_CASE("hybrid fit on Table 2 reaches the known fixed point") {
  const auto t = test_util::table2();
  const auto ft = table2_fuzzy();
  const auto fit = fit_hybrid(ft, build_design_matrix(t));
  REQUIRE(fit.converged);
  const auto& prm = fit.params;

  // Published coefficients, reordered to (tau, alphas, gammas).
  const double beta_ref[] = {7.0032610203,  -0.0849264367, 0.0005455323,
                             0.1937759436,  0.2551496695,  0.6583597871,
                             0.8598194144,  0.9812255202,  1.0455297360};
  for (int c = 0; c < 9; ++c) {
    CHECK(prm.beta(c) == test_util::near(beta_ref[c], 2e-5));
  }
  CHECK(prm.theta == test_util::near(1.0004368594, 1e-6));
  CHECK(prm.delta == test_util::near(0.9995634445, 1e-6));
  CHECK(prm.lambda == test_util::near(-0.0035275341, 1e-6));
  CHECK(prm.mu == test_util::near(0.0035251306, 1e-6));
  CHECK(fit.gof.r2_fuzzy == test_util::near(0.9986105, 1e-4));

  SUBCASE("fitted center channel matches the published fitted table") {
    // Spot values from the worked example (log scale).
    int row11 = -1, row15 = -1;
    const auto order = cell_order(t);
    for (int r = 0; r < static_cast<int>(order.size()); ++r) {
      if (order[r].origin == 1 && order[r].dev == 1) row11 = r;
      if (order[r].origin == 1 && order[r].dev == 5) row15 = r;
    }
    CHECK(fit.fitted_log_center(row11) ==
          test_util::near(7.0032610203, 1e-4));
    CHECK(fit.fitted_log_center(row15) ==
          test_util::near(7.0032610203 + 1.0455297360, 1e-4));
  }
}

TEST_CASE("crisp input collapses the hybrid model onto least squares") {
  const auto t = test_util::table2();
  const auto ft = fuzzify(t, zero_residuals(t));
  const auto fit = fit_hybrid(ft, build_design_matrix(t));
  REQUIRE(fit.converged);
  CHECK(fit.params.theta == test_util::near(1.0, 1e-9));
  CHECK(fit.params.delta == test_util::near(fit.params.theta, 1e-10));
  CHECK(fit.params.lambda == test_util::near(0.0, 1e-8));
  CHECK(fit.params.mu == test_util::near(fit.params.lambda, 1e-9));
  const auto ls = fit_least_squares(t);
  CHECK((fit.params.beta - ls.beta).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("swapping the channels swaps (theta, lambda) with (delta, mu)") {
  const auto t = test_util::table2();
  const auto ft = table2_fuzzy();
  FuzzyTriangle swapped = ft;
  std::swap(swapped.log_left, swapped.log_right);
  const auto x = build_design_matrix(t);
  const auto a = fit_hybrid(ft, x);
  const auto b = fit_hybrid(swapped, x);
  CHECK(b.params.theta == test_util::near(a.params.delta, 1e-9));
  CHECK(b.params.delta == test_util::near(a.params.theta, 1e-9));
  CHECK(b.params.lambda == test_util::near(a.params.mu, 1e-9));
  CHECK(b.params.mu == test_util::near(a.params.lambda, 1e-9));
  CHECK((a.params.beta - b.params.beta).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("objective trace never increases") {
  const auto t = test_util::table2();
  const auto fit = fit_hybrid(table2_fuzzy(), build_design_matrix(t));
  REQUIRE(!fit.objective_trace.empty());
  for (size_t i = 1; i < fit.objective_trace.size(); ++i) {
    CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1] + 1e-10);
  }
}

TEST_CASE("orthogonality relations hold at convergence") {
  const auto t = test_util::table2();
  const auto ft = table2_fuzzy();
  const auto fit = fit_hybrid(ft, build_design_matrix(t));
  check_orthogonality(ft, fit);
}

TEST_CASE("sum of squares decomposition") {
  SUBCASE("Table 2") {
    const auto fit =
        fit_hybrid(table2_fuzzy(), build_design_matrix(test_util::table2()));
    const auto& g = fit.gof;
    CHECK(std::abs(g.fsst - g.fssr - g.fsse) <= 1e-8 * g.fsst);
    CHECK(g.r2_fuzzy >= 0.0);
    CHECK(g.r2_fuzzy <= 1.0);
  }
  SUBCASE("random triangles") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const auto t = test_util::random_poisson_triangle(4, rng);
      const auto ft = fuzzify(t, residuals(t, fit_mle(t)));
      const auto fit = fit_hybrid(ft, build_design_matrix(t));
      REQUIRE(fit.converged);
      const auto& g = fit.gof;
      CHECK(std::abs(g.fsst - g.fssr - g.fsse) <= 1e-8 * g.fsst);
      CHECK(g.r2_fuzzy >= 0.0);
      CHECK(g.r2_fuzzy <= 1.0);
      check_orthogonality(ft, fit);
    }
  }
  SUBCASE("perfect fit scores one") {
    const auto t = test_util::exact_loglinear(6.0, {0.0, 0.2, -0.1},
                                              {0.0, 0.5, 0.7});
    const auto ft = fuzzify(t, zero_residuals(t));
    const auto fit = fit_hybrid(ft, build_design_matrix(t));
    CHECK(fit.gof.fsse == test_util::near(0.0, 1e-12));
    CHECK(fit.gof.r2_fuzzy == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("constant channels have no variance to explain") {
    const auto t = test_util::constant_triangle(3, 100.0);
    const auto ft = fuzzify(t, zero_residuals(t));
    CHECK_THROWS_AS(fit_hybrid(ft, build_design_matrix(t)),
                    DegenerateVariance);
  }
}

TEST_CASE("fuzzy predictions and the total reserve") {
  const auto t = test_util::table2();
  const auto fit = fit_hybrid(table2_fuzzy(), build_design_matrix(t));
  auto pred = predict_fuzzy(fit, t);
  REQUIRE(pred.cells.size() == 10);
  for (const auto& [cell, tfn] : pred.cells) {
    CHECK(!t.observed(cell.origin, cell.dev));
    CHECK(tfn.left <= tfn.center);
    CHECK(tfn.center <= tfn.right);
    CHECK(tfn.left > 0.0);
  }
  pred = total_reserve(std::move(pred), 1.0);
  CHECK(pred.total.left == test_util::near(33384.963, 0.01));
  CHECK(pred.total.center == test_util::near(33386.645, 0.01));
  CHECK(pred.total.right == test_util::near(33388.329, 0.01));
  CHECK(pred.crisp_value ==
        doctest::Approx((pred.total.center + pred.total.right) / 2.0));
  CHECK(pred.crisp_value == test_util::near(33387.487, 0.01));

  SUBCASE("defuzzification is linear in pi") {
    const auto at0 = total_reserve(pred, 0.0).crisp_value;
    const auto at1 = total_reserve(pred, 1.0).crisp_value;
    const auto mid = total_reserve(pred, 0.5).crisp_value;
    CHECK(mid == doctest::Approx((at0 + at1) / 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(total_reserve(pred, 1.5), PiOutOfRange);
  }
}

TEST_CASE("crisp input gives crisp predictions") {
  const auto t = test_util::table2();
  const auto ft = fuzzify(t, zero_residuals(t));
  const auto fit = fit_hybrid(ft, build_design_matrix(t));
  const auto pred = predict_fuzzy(fit, t);
  for (const auto& [cell, tfn] : pred.cells) {
    CHECK(tfn.left == doctest::Approx(tfn.center).epsilon(1e-7));
    CHECK(tfn.right == doctest::Approx(tfn.center).epsilon(1e-7));
  }
}

TEST_CASE("single-cell triangle has nothing to predict") {
  const auto t = test_util::constant_triangle(1, 5.0);
  HybridFit fit;
  fit.params.beta = Eigen::VectorXd::Constant(1, std::log(5.0));
  CHECK_THROWS_AS(predict_fuzzy(fit, t), NothingToPredict);
}
