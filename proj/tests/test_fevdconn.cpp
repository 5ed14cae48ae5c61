#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "spillover/estimators.hpp"
#include "spillover/fevdconn.hpp"

using namespace spill;

namespace {

// A_h by feeding a unit impulse through the VAR(p) recursion one period at a time.
Eigen::MatrixXd impulse_response(const std::vector<Eigen::MatrixXd>& phi, int h) {
  const Eigen::Index K = phi.front().rows();
  Eigen::MatrixXd out(K, K);
  for (Eigen::Index shock = 0; shock < K; ++shock) {
    std::vector<Eigen::VectorXd> path;
    for (int t = 0; t <= h; ++t) {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(K);
      if (t == 0) y(shock) = 1.0;
      for (std::size_t j = 1; j <= phi.size(); ++j) {
        if (t >= static_cast<int>(j)) y += phi[j - 1] * path[static_cast<std::size_t>(t) - j];
      }
      path.push_back(y);
    }
    out.col(shock) = path.back();
  }
  return out;
}

}  // namespace

TEST_SUITE("fevdconn") {

TEST_CASE("moving-average matrices match impulse simulation") {
  Eigen::MatrixXd a1 = 0.3 * testing::gaussian(3, 3, 1);
  Eigen::MatrixXd a2 = 0.2 * testing::gaussian(3, 3, 2);
  auto A = ma_coefficients({a1, a2}, 6);
  REQUIRE(A.size() == 6);
  CHECK(A[0] == Eigen::MatrixXd::Identity(3, 3));
  CHECK((A[1] - a1).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((A[2] - (a1 * a1 + a2)).cwiseAbs().maxCoeff() < 1e-14);
  for (int h = 0; h < 6; ++h) {
    CHECK((A[static_cast<std::size_t>(h)] - impulse_response({a1, a2}, h)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("gfevd matches the companion-power oracle, VAR(1) and VAR(2)") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const int K = 2 + rep % 4;
    std::vector<Eigen::MatrixXd> phi;
    for (int j = 0; j < 1 + rep % 2; ++j) phi.push_back(0.25 * testing::gaussian(K, K, rng()));
    if (companion_spectral_radius(phi) > 0.9) {
      for (auto& m : phi) m *= 0.5;
    }
    Eigen::MatrixXd B = testing::gaussian(K, K, rng());
    Eigen::MatrixXd S = B * B.transpose() + Eigen::MatrixXd::Identity(K, K);
    GfevdTable g = gfevd(phi, S, 10);
    CHECK((g.theta - oracle::gfevd(phi, S, 10)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((g.theta.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(g.theta.minCoeff() >= 0.0);
    CHECK(g.theta_raw.diagonal().maxCoeff() <= 1.0 + 1e-12);
  }
}

TEST_CASE("closed forms") {
  GfevdTable id = gfevd({Eigen::MatrixXd::Zero(3, 3)}, Eigen::MatrixXd::Identity(3, 3), 10);
  CHECK(id.theta == Eigen::MatrixXd::Identity(3, 3));
  for (double rho : {0.0, 0.3, 0.5, 0.9}) {
    Eigen::MatrixXd S(2, 2);
    S << 1, rho, rho, 1;
    GfevdTable g = gfevd({Eigen::MatrixXd::Zero(2, 2)}, S, 1);
    CHECK(g.theta(0, 1) == doctest::Approx(rho * rho / (1 + rho * rho)).epsilon(1e-14));
  }
  // Scaling a variable leaves the generalised shares unchanged.
  Eigen::MatrixXd S(2, 2);
  S << 1, 0.4, 0.4, 2;
  Eigen::MatrixXd phi(2, 2);
  phi << 0.3, 0.2, -0.1, 0.4;
  Eigen::Matrix2d D = Eigen::Vector2d(1.0, 10.0).asDiagonal();
  GfevdTable a = gfevd({phi}, S, 8);
  GfevdTable b = gfevd({D * phi * D.inverse()}, D * S * D, 8);
  CHECK((a.theta - b.theta).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dy connectedness wires VAR, gfevd and the table") {
  SimulationSpec spec = SimulationSpec::independent(3, 500, 4);
  spec.phi(1, 0) = 0.5;
  ReturnPanel r = simulate_returns(spec);
  FevdResult res = dy_connectedness(r, {1, 10, 100});
  CHECK(res.table.labels == r.labels);
  CHECK_FALSE(res.table.has_split());
  CHECK((res.table.total - 100 * oracle::gfevd(res.model.coeff, res.model.sigma, 10)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((res.table.total.rowwise().sum().array() - 100).abs().maxCoeff() < 1e-9);
  CHECK(res.indices.net(0) > 0);
  CHECK(res.indices.net(1) < 0);
  CHECK(res.nonconverged_equations == 0);
}

TEST_CASE("qvar at the median tracks dy on Gaussian data") {
  SimulationSpec spec = SimulationSpec::independent(3, 800, 5);
  spec.phi(2, 0) = 0.5;
  ReturnPanel r = simulate_returns(spec);
  FevdResult q = qvar_connectedness(r, 0.5);
  FevdResult d = dy_connectedness(r);
  CHECK((q.table.total.rowwise().sum().array() - 100).abs().maxCoeff() < 1e-9);
  CHECK(q.indices.net(0) > 0);
  CHECK(q.indices.net(2) < 0);
  CHECK(std::abs(q.indices.tci - d.indices.tci) < 5.0);
  CHECK(q.nonconverged_equations == 0);
  // each equation is an exact median regression
  Eigen::MatrixXd X = lag_matrix(r.returns, 1, 1);
  for (int k = 0; k < 3; ++k) {
    QuantileFit f = quantile_fit(X, r.returns.col(k).tail(799), 0.5);
    CHECK((q.model.coeff[0].row(k).transpose() - f.coefficients).cwiseAbs().maxCoeff() < 1e-10);
  }
  Eigen::MatrixXd E = q.model.residuals;
  CHECK((q.model.sigma - E.transpose() * E / 799.0).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(qvar_connectedness(r, 1.0), std::invalid_argument);
}

TEST_CASE("bad inputs") {
  CHECK_THROWS_AS(ma_coefficients({Eigen::MatrixXd::Zero(2, 2)}, 0), std::invalid_argument);
  CHECK_THROWS_AS(gfevd({Eigen::MatrixXd::Zero(3, 3)}, Eigen::MatrixXd::Identity(2, 2), 5), std::invalid_argument);
}

}
