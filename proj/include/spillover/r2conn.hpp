#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spillover/panel.hpp"
#include "spillover/stats.hpp"

namespace spill {

/// Predictor layout of equation k: the K-1 other series at time t, then all K
/// series at lag 1, ..., all K series at lag p.
struct DesignSpec {
  int k = 0;
  int p = 1;
  std::vector<int> contemporaneous_idx;
  std::vector<int> lag_idx;  // source series of each lagged column, in column order

  int predictors() const { return static_cast<int>(contemporaneous_idx.size() + lag_idx.size()); }
};

struct Design {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  DesignSpec spec;
};

/// Standardised (zero mean, unit sample variance) design for equation k over
/// rows p..T-1 of the panel.
Design build_design(const ReturnPanel& returns, int k, int p);

struct R2Decomposition {
  Eigen::VectorXd contributions;  // one per predictor, sums to the implied R^2
  double r_squared = 0.0;         // r_xy' R_xx^{-1} r_xy
  bool psd_repaired = false;
  double repair_distance = 0.0;
};

/// Relative-weights split of R^2 from a predictor correlation matrix and the
/// predictor/response correlation vector.
R2Decomposition decompose_r2_from_correlation(const Eigen::MatrixXd& Rxx, const Eigen::VectorXd& rxy);

R2Decomposition decompose_r2(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, CorrMethod method);

/// Connectedness matrix in percent, row = receiver, column = source. Tables
/// produced by the R^2 engine carry the contemporaneous / lagged split; GFEVD
/// tables carry only the total.
struct ConnectednessTable {
  std::vector<std::string> labels;
  Eigen::MatrixXd total;
  std::optional<Eigen::MatrixXd> contemporaneous;
  std::optional<Eigen::MatrixXd> lagged;

  std::size_t size() const { return labels.size(); }
  bool has_split() const { return contemporaneous.has_value() && lagged.has_value(); }
};

struct SpilloverIndices {
  Eigen::VectorXd to, to_c, to_l;
  Eigen::VectorXd from, from_c, from_l;
  Eigen::VectorXd net, net_c, net_l;
  Eigen::VectorXd inc_own, inc_own_c, inc_own_l;
  double tci = 0.0, tci_c = 0.0, tci_l = 0.0;
  bool has_split = false;
};

struct R2Options {
  CorrMethod method = CorrMethod::pearson;
  double scale = 100.0;  // 100 for percent, 1 for raw shares
};

struct R2Diagnostics {
  std::vector<double> repair_distance;  // per equation; 0 when no repair was needed
};

/// Runs the K regressions and assembles C (contemporaneous) and L (lagged,
/// summed over lags; own lags on the diagonal).
ConnectednessTable connectedness_table(const ReturnPanel& returns, int p, const R2Options& options = {},
                                       R2Diagnostics* diagnostics = nullptr);

ConnectednessTable connectedness_table(const Eigen::MatrixXd& returns, const std::vector<std::string>& labels, int p,
                                       const R2Options& options = {}, R2Diagnostics* diagnostics = nullptr);

/// TO/FROM/NET/Inc.Own per series and the TCI triple. Own-series cells are
/// excluded from TO, FROM and TCI.
SpilloverIndices aggregate_indices(const ConnectednessTable& table);

struct NpdcMatrices {
  Eigen::MatrixXd overall;
  std::optional<Eigen::MatrixXd> contemporaneous;
  std::optional<Eigen::MatrixXd> lagged;
};

/// NPDC[i,j] = total[j,i] - total[i,j]; positive when i is a net transmitter
/// to j.
NpdcMatrices npdc(const ConnectednessTable& table);

}  // namespace spill
