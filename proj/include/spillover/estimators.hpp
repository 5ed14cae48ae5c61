#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spillover/panel.hpp"

namespace spill {

struct LinearFit {
  Eigen::VectorXd coefficients;  // one per design column, intercept excluded
  double intercept = 0.0;
  Eigen::VectorXd residuals;
  double r_squared = 0.0;
  double bic = 0.0;  // T ln(SSR/T) + (#params) ln T
};

/// Least squares via column-pivoted Householder QR on an equilibrated design.
/// Throws DegenerateDataError when the design is rank deficient at a relative
/// pivot tolerance of 1e-10.
LinearFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool with_intercept = true);

struct VarModel {
  int p = 1;
  std::vector<std::string> labels;
  std::vector<Eigen::MatrixXd> coeff;  // A_1..A_p, row = equation
  Eigen::VectorXd intercept;
  Eigen::MatrixXd sigma;               // residual covariance, denominator T - p
  Eigen::MatrixXd residuals;           // (T - p) x K
  double spectral_radius = 0.0;        // of the companion matrix

  int dim() const { return static_cast<int>(intercept.size()); }
  bool stable() const { return spectral_radius < 1.0; }
};

/// Lagged regressors for rows p..T-1 of `data`: [y_{t-1}, ..., y_{t-p}].
Eigen::MatrixXd lag_matrix(const Eigen::MatrixXd& data, int p, int first_row);

VarModel var_fit(const Eigen::MatrixXd& data, int p, std::vector<std::string> labels = {});
VarModel var_fit(const ReturnPanel& returns, int p);

double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& coeff);

/// BIC lag choice over 1..p_max on the common sample of rows p_max..T-1.
/// Ties go to the smaller lag.
int select_lag_bic(const Eigen::MatrixXd& data, int p_max);
int select_lag_bic(const ReturnPanel& returns, int p_max);

struct QuantileFit {
  double tau = 0.5;
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  Eigen::VectorXd residuals;
  double objective = 0.0;  // sum of check losses
  int iterations = 0;
  bool converged = false;
};

double check_loss(const Eigen::VectorXd& residuals, double tau);

/// Linear quantile regression by smoothed iteratively reweighted least
/// squares. The smoothing floor is 1e-6 and at most 200 reweighting steps are
/// taken. Each time the smoothing level drops, the basic solution through the
/// observations with the smallest residuals is tested against the subgradient
/// optimality conditions; a verified vertex ends the iteration early.
QuantileFit quantile_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tau, bool with_intercept = true);

/// V diag(sqrt(max(lambda, 0))) V' for symmetric M.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& M);

struct PsdRepair {
  Eigen::MatrixXd matrix;
  bool repaired = false;
  double distance = 0.0;  // Frobenius norm of the change
};

/// Clips eigenvalues at 1e-10 and rescales to a unit diagonal. Inputs that are
/// already positive definite at that level come back unchanged.
PsdRepair nearest_psd(const Eigen::MatrixXd& M);

double min_eigenvalue(const Eigen::MatrixXd& symmetric);

}  // namespace spill
