#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spillover/estimators.hpp"
#include "spillover/panel.hpp"
#include "spillover/r2conn.hpp"

namespace spill {

/// Wold moving-average matrices A_0 = I, A_h = sum_{j=1}^{min(h,p)} Phi_j A_{h-j},
/// for h = 0..H-1.
std::vector<Eigen::MatrixXd> ma_coefficients(const std::vector<Eigen::MatrixXd>& phi, int horizon);
std::vector<Eigen::MatrixXd> ma_coefficients(const VarModel& model, int horizon);

struct GfevdTable {
  std::vector<std::string> labels;
  Eigen::MatrixXd theta;      // row-normalised generalised FEVD shares
  Eigen::MatrixXd theta_raw;  // before normalisation
  int horizon = 10;
};

/// Generalised (order invariant) forecast error variance decomposition over
/// h = 0..H-1.
GfevdTable gfevd(const std::vector<Eigen::MatrixXd>& phi, const Eigen::MatrixXd& sigma, int horizon,
                 std::vector<std::string> labels = {});
GfevdTable gfevd(const VarModel& model, int horizon);

/// theta scaled to a connectedness table (percent by default).
ConnectednessTable to_table(const GfevdTable& g, double scale = 100.0);

struct FevdResult {
  GfevdTable gfevd;
  ConnectednessTable table;
  SpilloverIndices indices;
  VarModel model;
  int nonconverged_equations = 0;  // quantile engine only
};

struct FevdOptions {
  int p = 1;
  int horizon = 10;
  double scale = 100.0;
};

FevdResult dy_connectedness(const Eigen::MatrixXd& returns, const std::vector<std::string>& labels,
                            const FevdOptions& options = {});
FevdResult dy_connectedness(const ReturnPanel& returns, const FevdOptions& options = {});

/// Quantile VAR: each equation fitted by quantile regression at tau, residual
/// covariance from the quantile residuals (denominator T - p).
FevdResult qvar_connectedness(const Eigen::MatrixXd& returns, const std::vector<std::string>& labels, double tau,
                              const FevdOptions& options = {});
FevdResult qvar_connectedness(const ReturnPanel& returns, double tau, const FevdOptions& options = {});

}  // namespace spill
