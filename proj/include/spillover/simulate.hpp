#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spillover/panel.hpp"

namespace spill {

/// Common factor added to every series; loading is piecewise constant over
/// consecutive blocks of rows (the last block extends to the end).
struct FactorRegime {
  int rows = 0;
  double loading = 0.0;
};

/// Planted VAR(1): y_t = phi y_{t-1} + e_t + loading(t) f_t, e_t ~ N(0, sigma),
/// f_t ~ N(0, 1); returns are scale * y_t. phi(target, source) is the effect
/// of source's lagged value on target.
struct SimulationSpec {
  std::vector<std::string> labels;
  Eigen::MatrixXd phi;
  Eigen::MatrixXd sigma;
  std::vector<FactorRegime> factor;
  int periods = 600;  // number of returns
  int burn_in = 200;
  double scale = 0.01;
  double start_price = 100.0;
  Date start{std::chrono::year{2020}, std::chrono::month{12}, std::chrono::day{1}};
  std::uint64_t seed = 1;

  /// K independent series with unit variance and no dynamics.
  static SimulationSpec independent(int k, int periods, std::uint64_t seed);
};

/// Weekday calendar starting at `start` (moved forward to a weekday).
std::vector<Date> business_days(Date start, std::size_t count);

/// Throws std::invalid_argument for an unstable phi or a non-PSD sigma.
void validate(const SimulationSpec& spec);

ReturnPanel simulate_returns(const SimulationSpec& spec);

/// Prices start_price * exp(cumulative returns); one more row than returns.
PricePanel simulate_prices(const SimulationSpec& spec);

}  // namespace spill
