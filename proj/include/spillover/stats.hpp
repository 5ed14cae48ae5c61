#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spillover/panel.hpp"

namespace spill {

/// Significance buckets used by the descriptive table: * 10%, ** 5%, *** 1%.
enum class SignificanceLevel { none, ten, five, one };

std::string stars(SignificanceLevel level);
std::string to_string(SignificanceLevel level);
SignificanceLevel level_from_pvalue(double p);

struct Moments {
  double mean = 0.0;
  double sd = 0.0;        // sample standard deviation (n - 1)
  double skewness = 0.0;  // m3 / m2^1.5
  double kurtosis = 0.0;  // raw: m4 / m2^2, Gaussian ~ 3
};

Moments sample_moments(std::span<const double> x);

struct JarqueBera {
  double stat = 0.0;
  double p = 1.0;
};

/// n/6 (S^2 + (K - 3)^2 / 4) with a chi-square(2) p-value.
JarqueBera jarque_bera(std::span<const double> x);
JarqueBera jarque_bera_from_moments(double n, double skewness, double kurtosis);

enum class AdfLagRule { fixed, schwert_pruned };

struct AdfSpec {
  AdfLagRule lag_rule = AdfLagRule::schwert_pruned;
  int lags = 0;  // used when lag_rule == fixed
};

struct AdfResult {
  double stat = 0.0;
  int lags = 0;
  int nobs = 0;
  SignificanceLevel level = SignificanceLevel::none;
  double crit_1 = 0.0, crit_5 = 0.0, crit_10 = 0.0;
};

/// Constant-only augmented Dickey-Fuller regression
///   dx_t = c + gamma x_{t-1} + sum_j phi_j dx_{t-j} + e_t.
/// Default lags start at floor(12 (n/100)^0.25) and the longest lag is dropped
/// while its |t| is below the two-sided 10% normal quantile.
AdfResult adf_test(std::span<const double> x, const AdfSpec& spec = {});

/// Constant-case critical value from the MacKinnon (2010) response surface.
double adf_critical_value(double level, int nobs);

struct DescriptiveRow {
  std::string label;
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  double jb_stat = 0.0;
  double jb_p = 1.0;
  double adf_stat = 0.0;
  SignificanceLevel adf_level = SignificanceLevel::none;
  int adf_lags = 0;
};

std::vector<DescriptiveRow> describe(const ReturnPanel& returns, const AdfSpec& adf = {});

enum class CorrMethod { pearson, spearman, kendall };

std::string to_string(CorrMethod m);
CorrMethod corr_method_from_string(const std::string& s);

struct CorrelationMatrix {
  CorrMethod method = CorrMethod::pearson;
  std::vector<std::string> labels;
  int n = 0;
  Eigen::MatrixXd values;
  Eigen::MatrixXd pvalues;
};

/// Average ranks (1-based), ties share the mean of their positions.
Eigen::VectorXd average_ranks(const Eigen::VectorXd& x);

/// Correlations between the columns of `data`. Spearman is Pearson on average
/// ranks; Kendall is tau-b. Throws DegenerateDataError on a constant column.
Eigen::MatrixXd correlation(const Eigen::MatrixXd& data, CorrMethod method);

double kendall_tau_b(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

CorrelationMatrix correlation_matrix(const ReturnPanel& returns, CorrMethod method);

/// Two-sided p-value of a correlation coefficient: Student t on n - 2 degrees
/// of freedom for Pearson/Spearman, normal approximation for Kendall.
double correlation_pvalue(double r, int n, CorrMethod method);

struct MaskedMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd values;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> present;
  double level = 0.1;
};

MaskedMatrix significance_mask(const CorrelationMatrix& corr, double level);

}  // namespace spill
