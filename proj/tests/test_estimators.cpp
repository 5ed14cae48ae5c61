#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "spillover/error.hpp"
#include "spillover/estimators.hpp"

using namespace spill;

TEST_SUITE("estimators") {

TEST_CASE("ols agrees with the normal equations") {
  Eigen::MatrixXd X = testing::gaussian(120, 4, 1);
  X.col(2) *= 1e4;  // badly scaled column
  Eigen::VectorXd y = (X * Eigen::Vector4d(1.0, -2.0, 3e-4, 0.0) + 0.3 * testing::gaussian(120, 1, 2).col(0)).array() + 0.5;
  LinearFit fit = ols_fit(X, y);
  oracle::Ols ref = oracle::ols(X, y);
  CHECK(fit.intercept == doctest::Approx(static_cast<double>(ref.beta[0])).epsilon(1e-9));
  for (int j = 0; j < 4; ++j) {
    CHECK(fit.coefficients(j) == doctest::Approx(static_cast<double>(ref.beta[static_cast<std::size_t>(j) + 1])).epsilon(1e-9));
  }
  CHECK(fit.r_squared == doctest::Approx(ref.r_squared).epsilon(1e-10));
  const double ssr = fit.residuals.squaredNorm();
  CHECK(fit.bic == doctest::Approx(120 * std::log(ssr / 120) + 5 * std::log(120.0)));
}

TEST_CASE("rank-deficient designs are degenerate") {
  Eigen::MatrixXd X = testing::gaussian(50, 3, 3);
  X.col(2) = 2.0 * X.col(0) - X.col(1);
  Eigen::VectorXd y = testing::gaussian(50, 1, 4).col(0);
  CHECK_THROWS_AS(ols_fit(X, y), DegenerateDataError);
  Eigen::MatrixXd C = Eigen::MatrixXd::Constant(50, 1, 3.0);
  CHECK_THROWS_AS(ols_fit(C, y, true), DegenerateDataError);
}

TEST_CASE("lag matrix layout") {
  Eigen::MatrixXd d(5, 2);
  d << 1, 10, 2, 20, 3, 30, 4, 40, 5, 50;
  Eigen::MatrixXd L = lag_matrix(d, 2, 2);
  REQUIRE(L.rows() == 3);
  REQUIRE(L.cols() == 4);
  Eigen::RowVector4d first(2, 20, 1, 10);
  CHECK(L.row(0) == first);
  Eigen::RowVector4d last(4, 40, 3, 30);
  CHECK(L.row(2) == last);
}

TEST_CASE("var fit equals equation-by-equation least squares") {
  SimulationSpec spec = SimulationSpec::independent(3, 400, 5);
  spec.phi << 0.4, 0.1, 0.0, -0.2, 0.3, 0.0, 0.0, 0.25, 0.1;
  ReturnPanel r = simulate_returns(spec);
  VarModel m = var_fit(r, 2);
  CHECK(m.p == 2);
  CHECK(m.labels == r.labels);
  Eigen::MatrixXd X = lag_matrix(r.returns, 2, 2);
  Eigen::MatrixXd E(398, 3);
  for (int k = 0; k < 3; ++k) {
    oracle::Ols ref = oracle::ols(X, r.returns.col(k).tail(398));
    CHECK(m.intercept(k) == doctest::Approx(static_cast<double>(ref.beta[0])).epsilon(1e-9));
    for (int j = 0; j < 3; ++j) {
      CHECK(m.coeff[0](k, j) == doctest::Approx(static_cast<double>(ref.beta[1 + j])).epsilon(1e-8));
      CHECK(m.coeff[1](k, j) == doctest::Approx(static_cast<double>(ref.beta[4 + j])).epsilon(1e-8));
    }
    E.col(k) = ref.residuals;
  }
  Eigen::MatrixXd S = E.transpose() * E / 398.0;
  CHECK((m.sigma - S).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(m.stable());
}

TEST_CASE("companion spectral radius") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2) * 0.5;
  CHECK(companion_spectral_radius({a}) == doctest::Approx(0.5));
  // y_t = 0.5 y_{t-1} + 0.3 y_{t-2}: roots of z^2 - 0.5 z - 0.3
  Eigen::MatrixXd a1(1, 1), a2(1, 1);
  a1 << 0.5;
  a2 << 0.3;
  CHECK(companion_spectral_radius({a1, a2}) == doctest::Approx((0.5 + std::sqrt(0.25 + 1.2)) / 2));
  Eigen::MatrixXd explosive(1, 1);
  explosive << 1.1;
  CHECK(companion_spectral_radius({explosive}) == doctest::Approx(1.1));
}

TEST_CASE("bic picks the true lag of an AR(2)") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd d(2000, 2);
  double y1 = 0, y2 = 0;
  for (int t = 0; t < 2000; ++t) {
    const double y = 0.2 * y1 + 0.5 * y2 + normal(rng);
    y2 = y1;
    y1 = y;
    d(t, 0) = y;
    d(t, 1) = normal(rng);
  }
  CHECK(select_lag_bic(d, 5) == 2);
  CHECK(select_lag_bic(testing::gaussian(500, 2, 12), 4) == 1);
}

TEST_CASE("quantile regression reaches the exact LP optimum") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double tau : {0.1, 0.5, 0.75}) {
    for (int rep = 0; rep < 5; ++rep) {
      Eigen::VectorXd x(40), y(40);
      for (int i = 0; i < 40; ++i) {
        x(i) = normal(rng);
        y(i) = 1.0 + 2.0 * x(i) + std::exp(normal(rng));
      }
      double a = 0, b = 0;
      const double best = oracle::quantile_objective_2d(x, y, tau, a, b);
      QuantileFit fit = quantile_fit(x, y, tau);
      CHECK(fit.objective == doctest::Approx(check_loss(fit.residuals, tau)));
      CHECK(fit.objective <= best + 1e-8 * (1 + best));
      CHECK(fit.objective >= best - 1e-8 * (1 + best));
      CHECK(fit.converged);
    }
  }
}

TEST_CASE("median regression on a constant is the sample median") {
  Eigen::MatrixXd X(0, 0);
  X.resize(7, 0);
  Eigen::VectorXd y(7);
  y << 5, 1, 9, 3, 7, 2, 8;
  QuantileFit fit = quantile_fit(X, y, 0.5);
  CHECK(fit.intercept == doctest::Approx(5.0));
}

TEST_CASE("check loss") {
  Eigen::VectorXd r(3);
  r << -2, 0, 4;
  CHECK(check_loss(r, 0.25) == doctest::Approx(2 * 0.75 + 4 * 0.25));
}

TEST_CASE("symmetric square root and psd repair") {
  Eigen::MatrixXd B = testing::gaussian(4, 4, 14);
  Eigen::MatrixXd S = B * B.transpose();
  Eigen::MatrixXd R = symmetric_sqrt(S);
  CHECK((R * R - S).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((R - R.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::MatrixXd asym = S;
  asym(0, 1) += 1.0;
  CHECK_THROWS_AS(symmetric_sqrt(asym), std::invalid_argument);

  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(3, 3);
  C(0, 1) = C(1, 0) = 0.3;
  PsdRepair same = nearest_psd(C);
  CHECK_FALSE(same.repaired);
  CHECK(same.matrix == C);

  Eigen::MatrixXd bad(3, 3);
  bad << 1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1;
  CHECK(min_eigenvalue(bad) < 0);
  PsdRepair fixed = nearest_psd(bad);
  CHECK(fixed.repaired);
  CHECK(fixed.distance > 0);
  CHECK(min_eigenvalue(fixed.matrix) > -1e-12);
  CHECK((fixed.matrix.diagonal().array() - 1.0).abs().maxCoeff() < 1e-12);
}

}
