#include "spillover/simulate.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "spillover/estimators.hpp"

namespace spill {

SimulationSpec SimulationSpec::independent(int k, int periods, std::uint64_t seed) {
  SimulationSpec s;
  for (int i = 0; i < k; ++i) s.labels.push_back("S" + std::to_string(i + 1));
  s.phi = Eigen::MatrixXd::Zero(k, k);
  s.sigma = Eigen::MatrixXd::Identity(k, k);
  s.periods = periods;
  s.seed = seed;
  return s;
}

std::vector<Date> business_days(Date start, std::size_t count) {
  using namespace std::chrono;
  std::vector<Date> out;
  out.reserve(count);
  sys_days day{start};
  while (out.size() < count) {
    const weekday wd{day};
    if (wd != Saturday && wd != Sunday) out.emplace_back(day);
    day += days{1};
  }
  return out;
}

void validate(const SimulationSpec& spec) {
  const Eigen::Index K = static_cast<Eigen::Index>(spec.labels.size());
  if (K < 1) throw std::invalid_argument("simulation needs at least one series");
  if (spec.phi.rows() != K || spec.phi.cols() != K) throw std::invalid_argument("simulation: phi must be K x K");
  if (spec.sigma.rows() != K || spec.sigma.cols() != K) throw std::invalid_argument("simulation: sigma must be K x K");
  if (spec.periods < 1 || spec.burn_in < 0) throw std::invalid_argument("simulation: bad sample length");
  if (!(spec.scale > 0.0) || !(spec.start_price > 0.0)) throw std::invalid_argument("simulation: scale and start price must be positive");
  const double radius = companion_spectral_radius({spec.phi});
  if (!(radius < 1.0)) {
    throw std::invalid_argument("unstable simulation spec: companion spectral radius " + std::to_string(radius) +
                                " >= 1");
  }
  if ((spec.sigma - spec.sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 || min_eigenvalue(spec.sigma) < -1e-12) {
    throw std::invalid_argument("simulation: sigma must be symmetric positive semidefinite");
  }
  for (const auto& r : spec.factor) {
    if (r.rows < 0) throw std::invalid_argument("simulation: factor regime rows must be non-negative");
  }
}

ReturnPanel simulate_returns(const SimulationSpec& spec) {
  validate(spec);
  const Eigen::Index K = static_cast<Eigen::Index>(spec.labels.size());
  Eigen::MatrixXd chol = symmetric_sqrt(spec.sigma);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  auto loading_at = [&](int t) {
    int remaining = t;
    for (std::size_t i = 0; i < spec.factor.size(); ++i) {
      if (remaining < spec.factor[i].rows || i + 1 == spec.factor.size()) return spec.factor[i].loading;
      remaining -= spec.factor[i].rows;
    }
    return 0.0;
  };

  Eigen::VectorXd y = Eigen::VectorXd::Zero(K);
  Eigen::VectorXd z(K);
  ReturnPanel out;
  out.labels = spec.labels;
  out.returns.resize(spec.periods, K);
  for (int t = -spec.burn_in; t < spec.periods; ++t) {
    for (Eigen::Index i = 0; i < K; ++i) z(i) = normal(rng);
    const double f = normal(rng);
    const double loading = t < 0 ? loading_at(0) : loading_at(t);
    y = spec.phi * y + chol * z + Eigen::VectorXd::Constant(K, loading * f);
    if (t >= 0) out.returns.row(t) = spec.scale * y.transpose();
  }
  auto days = business_days(spec.start, static_cast<std::size_t>(spec.periods) + 1);
  out.dates.assign(days.begin() + 1, days.end());
  return out;
}

PricePanel simulate_prices(const SimulationSpec& spec) {
  ReturnPanel r = simulate_returns(spec);
  const Eigen::Index K = static_cast<Eigen::Index>(r.cols());
  PricePanel p;
  p.labels = r.labels;
  p.dates = business_days(spec.start, r.rows() + 1);
  p.prices.resize(static_cast<Eigen::Index>(r.rows()) + 1, K);
  Eigen::RowVectorXd level = Eigen::RowVectorXd::Constant(K, std::log(spec.start_price));
  p.prices.row(0).setConstant(spec.start_price);
  for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(r.rows()); ++t) {
    level += r.returns.row(t);
    p.prices.row(t + 1) = level.array().exp().matrix();
  }
  return p;
}

}  // namespace spill
