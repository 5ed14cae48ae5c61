#pragma once

#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "spillover/panel.hpp"
#include "spillover/simulate.hpp"

namespace testing {

inline Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

inline spill::ReturnPanel panel_from(const Eigen::MatrixXd& m) {
  spill::ReturnPanel p;
  p.returns = m;
  for (Eigen::Index j = 0; j < m.cols(); ++j) p.labels.push_back("S" + std::to_string(j + 1));
  p.dates = spill::business_days(std::chrono::year{2021} / 1 / 4, static_cast<std::size_t>(m.rows()));
  return p;
}

inline std::istringstream text(const std::string& s) { return std::istringstream(s); }

}  // namespace testing
