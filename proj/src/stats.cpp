#include "spillover/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "spillover/error.hpp"
#include "spillover/estimators.hpp"

namespace spill {

std::string stars(SignificanceLevel level) {
  switch (level) {
    case SignificanceLevel::one: return "***";
    case SignificanceLevel::five: return "**";
    case SignificanceLevel::ten: return "*";
    case SignificanceLevel::none: break;
  }
  return "";
}

std::string to_string(SignificanceLevel level) {
  switch (level) {
    case SignificanceLevel::one: return "1%";
    case SignificanceLevel::five: return "5%";
    case SignificanceLevel::ten: return "10%";
    case SignificanceLevel::none: break;
  }
  return "none";
}

SignificanceLevel level_from_pvalue(double p) {
  if (p <= 0.01) return SignificanceLevel::one;
  if (p <= 0.05) return SignificanceLevel::five;
  if (p <= 0.10) return SignificanceLevel::ten;
  return SignificanceLevel::none;
}

namespace {

bool is_constant(std::span<const double> x) {
  auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *lo == *hi;
}

}  // namespace

Moments sample_moments(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("sample_moments: need at least two observations");
  Moments m;
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const double nd = static_cast<double>(n);
  m.sd = std::sqrt(m2 / (nd - 1.0));
  m2 /= nd;
  m3 /= nd;
  m4 /= nd;
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.kurtosis = m4 / (m2 * m2);
  }
  return m;
}

JarqueBera jarque_bera_from_moments(double n, double skewness, double kurtosis) {
  const double excess = kurtosis - 3.0;
  JarqueBera jb;
  jb.stat = n / 6.0 * (skewness * skewness + excess * excess / 4.0);
  jb.p = std::exp(-0.5 * jb.stat);  // chi-square(2) survival function
  return jb;
}

JarqueBera jarque_bera(std::span<const double> x) {
  if (x.size() < 8) throw std::invalid_argument("jarque_bera: need at least 8 observations");
  if (is_constant(x)) throw DegenerateDataError("jarque_bera: constant series");
  Moments m = sample_moments(x);
  return jarque_bera_from_moments(static_cast<double>(x.size()), m.skewness, m.kurtosis);
}

double adf_critical_value(double level, int nobs) {
  // MacKinnon (2010), Table 2, constant, one variable.
  struct Row {
    double level, b_inf, b1, b2, b3;
  };
  static constexpr Row rows[] = {
      {0.01, -3.43035, -6.5393, -16.786, -79.433},
      {0.05, -2.86154, -2.8903, -4.234, -40.040},
      {0.10, -2.56677, -1.5384, -2.809, 0.0},
  };
  for (const auto& r : rows) {
    if (std::abs(r.level - level) < 1e-12) {
      const double inv = 1.0 / static_cast<double>(nobs);
      return r.b_inf + r.b1 * inv + r.b2 * inv * inv + r.b3 * inv * inv * inv;
    }
  }
  throw std::invalid_argument("adf_critical_value: level must be 0.01, 0.05 or 0.10");
}

namespace {

struct AdfRegression {
  double gamma_t = 0.0;
  double last_lag_t = 0.0;
  int nobs = 0;
};

// t statistics from y = D b + e; D's column 1 is x_{t-1}, the last column the
// longest lagged difference.
AdfRegression adf_regression(std::span<const double> x, int lags, int first) {
  const int n = static_cast<int>(x.size());
  const int rows = n - first;
  Eigen::MatrixXd X(rows, 1 + lags);
  Eigen::VectorXd y(rows);
  for (int r = 0; r < rows; ++r) {
    const int t = first + r;
    y(r) = x[static_cast<std::size_t>(t)] - x[static_cast<std::size_t>(t - 1)];
    X(r, 0) = x[static_cast<std::size_t>(t - 1)];
    for (int j = 1; j <= lags; ++j) {
      X(r, j) = x[static_cast<std::size_t>(t - j)] - x[static_cast<std::size_t>(t - j - 1)];
    }
  }
  LinearFit fit = ols_fit(X, y, true);
  const int params = lags + 2;
  const double s2 = fit.residuals.squaredNorm() / static_cast<double>(rows - params);

  Eigen::MatrixXd D(rows, params);
  D.col(0).setOnes();
  D.rightCols(params - 1) = X;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(D);
  Eigen::MatrixXd R = qr.matrixQR().topRows(params).triangularView<Eigen::Upper>();
  Eigen::MatrixXd Rinv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(params, params));
  auto se = [&](int j) { return std::sqrt(s2 * Rinv.row(j).squaredNorm()); };

  AdfRegression out;
  out.nobs = rows;
  out.gamma_t = fit.coefficients(0) / se(1);
  if (lags > 0) out.last_lag_t = fit.coefficients(lags) / se(params - 1);
  return out;
}

}  // namespace

AdfResult adf_test(std::span<const double> x, const AdfSpec& spec) {
  const int n = static_cast<int>(x.size());
  if (n < 50) throw std::invalid_argument("adf_test: need at least 50 observations");
  if (is_constant(x)) throw DegenerateDataError("adf_test: constant series");

  AdfResult result;
  std::vector<double> dx(x.size() - 1);
  for (std::size_t t = 1; t < x.size(); ++t) dx[t - 1] = x[t] - x[t - 1];
  if (is_constant(dx)) {
    // A pure deterministic trend: the constant absorbs every difference and
    // the level carries no information, so the unit root is not rejected.
    result.stat = 0.0;
    result.nobs = n - 1;
  } else {
    int lags = spec.lags;
    if (spec.lag_rule == AdfLagRule::schwert_pruned) {
      const int max_lag = static_cast<int>(std::floor(12.0 * std::pow(n / 100.0, 0.25)));
      lags = max_lag;
      constexpr double kPruneT = 1.6448536269514722;  // two-sided 10%
      while (lags > 0) {
        AdfRegression r = adf_regression(x, lags, max_lag + 1);
        if (std::abs(r.last_lag_t) >= kPruneT) break;
        --lags;
      }
    }
    if (lags < 0) throw std::invalid_argument("adf_test: negative lag count");
    if (n - (lags + 1) <= lags + 2 + 1) throw std::invalid_argument("adf_test: insufficient observations after lagging");
    AdfRegression r = adf_regression(x, lags, lags + 1);
    result.stat = r.gamma_t;
    result.lags = lags;
    result.nobs = r.nobs;
  }
  result.crit_1 = adf_critical_value(0.01, result.nobs);
  result.crit_5 = adf_critical_value(0.05, result.nobs);
  result.crit_10 = adf_critical_value(0.10, result.nobs);
  if (result.stat < result.crit_1) {
    result.level = SignificanceLevel::one;
  } else if (result.stat < result.crit_5) {
    result.level = SignificanceLevel::five;
  } else if (result.stat < result.crit_10) {
    result.level = SignificanceLevel::ten;
  }
  return result;
}

std::vector<DescriptiveRow> describe(const ReturnPanel& returns, const AdfSpec& adf) {
  std::vector<DescriptiveRow> rows;
  const Eigen::Index T = returns.returns.rows();
  if (T < 20) throw std::invalid_argument("describe: each series needs at least 20 observations");
  for (std::size_t k = 0; k < returns.cols(); ++k) {
    Eigen::VectorXd col = returns.returns.col(static_cast<Eigen::Index>(k));
    std::span<const double> x(col.data(), static_cast<std::size_t>(col.size()));
    if (is_constant(x)) throw DegenerateDataError("describe: series '" + returns.labels[k] + "' is constant");
    DescriptiveRow row;
    row.label = returns.labels[k];
    row.n = static_cast<int>(T);
    Moments m = sample_moments(x);
    row.mean = m.mean;
    row.sd = m.sd;
    row.skewness = m.skewness;
    row.kurtosis = m.kurtosis;
    JarqueBera jb = jarque_bera_from_moments(static_cast<double>(T), m.skewness, m.kurtosis);
    row.jb_stat = jb.stat;
    row.jb_p = jb.p;
    if (T >= 50) {
      AdfResult a = adf_test(x, adf);
      row.adf_stat = a.stat;
      row.adf_level = a.level;
      row.adf_lags = a.lags;
    } else {
      row.adf_stat = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string to_string(CorrMethod m) {
  switch (m) {
    case CorrMethod::pearson: return "pearson";
    case CorrMethod::spearman: return "spearman";
    case CorrMethod::kendall: return "kendall";
  }
  return "pearson";
}

CorrMethod corr_method_from_string(const std::string& s) {
  if (s == "pearson") return CorrMethod::pearson;
  if (s == "spearman") return CorrMethod::spearman;
  if (s == "kendall") return CorrMethod::kendall;
  throw std::invalid_argument("unknown correlation method '" + s + "'");
}

Eigen::VectorXd average_ranks(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return x(a) < x(b); });
  Eigen::VectorXd ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && x(order[static_cast<std::size_t>(j + 1)]) == x(order[static_cast<std::size_t>(i)])) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index k = i; k <= j; ++k) ranks(order[static_cast<std::size_t>(k)]) = avg;
    i = j + 1;
  }
  return ranks;
}

double kendall_tau_b(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw std::invalid_argument("kendall_tau_b: length mismatch");
  long long s = 0, nx = 0, ny = 0;
  const Eigen::Index n = x.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const int sx = (x(i) > x(j)) - (x(i) < x(j));
      const int sy = (y(i) > y(j)) - (y(i) < y(j));
      s += sx * sy;
      nx += sx != 0;
      ny += sy != 0;
    }
  }
  if (nx == 0 || ny == 0) throw DegenerateDataError("kendall_tau_b: constant series");
  return static_cast<double>(s) / std::sqrt(static_cast<double>(nx) * static_cast<double>(ny));
}

namespace {

Eigen::MatrixXd pearson_columns(const Eigen::MatrixXd& data) {
  Eigen::MatrixXd Z = data.rowwise() - data.colwise().mean();
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    const double norm = Z.col(j).norm();
    if (!(norm > 0.0)) throw DegenerateDataError("correlation: column " + std::to_string(j) + " is constant");
    Z.col(j) /= norm;
  }
  Eigen::MatrixXd R = Z.transpose() * Z;
  R = (0.5 * (R + R.transpose())).eval();
  R = R.cwiseMax(-1.0).cwiseMin(1.0);
  R.diagonal().setOnes();
  return R;
}

Eigen::MatrixXd kendall_columns(const Eigen::MatrixXd& data) {
  const Eigen::Index n = data.rows();
  const Eigen::Index m = data.cols();
  const std::size_t pairs = static_cast<std::size_t>(n * (n - 1) / 2);
  std::vector<std::vector<std::int8_t>> signs(static_cast<std::size_t>(m), std::vector<std::int8_t>(pairs));
  std::vector<long long> nonzero(static_cast<std::size_t>(m), 0);
  for (Eigen::Index c = 0; c < m; ++c) {
    auto& sg = signs[static_cast<std::size_t>(c)];
    std::size_t at = 0;
    long long nz = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xi = data(i, c);
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double xj = data(j, c);
        const std::int8_t s = static_cast<std::int8_t>((xi > xj) - (xi < xj));
        sg[at++] = s;
        nz += s != 0;
      }
    }
    if (nz == 0) throw DegenerateDataError("correlation: column " + std::to_string(c) + " is constant");
    nonzero[static_cast<std::size_t>(c)] = nz;
  }
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto& sa = signs[static_cast<std::size_t>(a)];
    for (Eigen::Index b = a + 1; b < m; ++b) {
      const auto& sb = signs[static_cast<std::size_t>(b)];
      long long s = 0;
      for (std::size_t k = 0; k < pairs; ++k) s += sa[k] * sb[k];
      const double tau = static_cast<double>(s) / std::sqrt(static_cast<double>(nonzero[static_cast<std::size_t>(a)]) *
                                                            static_cast<double>(nonzero[static_cast<std::size_t>(b)]));
      R(a, b) = R(b, a) = tau;
    }
  }
  return R;
}

}  // namespace

Eigen::MatrixXd correlation(const Eigen::MatrixXd& data, CorrMethod method) {
  if (data.rows() < 3) throw std::invalid_argument("correlation: need at least three observations");
  switch (method) {
    case CorrMethod::pearson: return pearson_columns(data);
    case CorrMethod::spearman: {
      Eigen::MatrixXd ranks(data.rows(), data.cols());
      for (Eigen::Index j = 0; j < data.cols(); ++j) ranks.col(j) = average_ranks(data.col(j));
      return pearson_columns(ranks);
    }
    case CorrMethod::kendall: return kendall_columns(data);
  }
  throw std::invalid_argument("correlation: unknown method");
}

double correlation_pvalue(double r, int n, CorrMethod method) {
  if (n < 3) throw std::invalid_argument("correlation_pvalue: need n >= 3");
  if (method == CorrMethod::kendall) {
    const double nd = static_cast<double>(n);
    const double z = 3.0 * r * std::sqrt(nd * (nd - 1.0)) / std::sqrt(2.0 * (2.0 * nd + 5.0));
    return std::erfc(std::abs(z) / std::sqrt(2.0));
  }
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
  boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

CorrelationMatrix correlation_matrix(const ReturnPanel& returns, CorrMethod method) {
  if (returns.cols() < 2) throw std::invalid_argument("correlation_matrix: need at least two series");
  CorrelationMatrix out;
  out.method = method;
  out.labels = returns.labels;
  out.n = static_cast<int>(returns.rows());
  try {
    out.values = correlation(returns.returns, method);
  } catch (const DegenerateDataError&) {
    for (std::size_t k = 0; k < returns.cols(); ++k) {
      const auto col = returns.returns.col(static_cast<Eigen::Index>(k));
      if (col.maxCoeff() == col.minCoeff()) {
        throw DegenerateDataError("correlation_matrix: series '" + returns.labels[k] + "' is constant");
      }
    }
    throw;
  }
  const Eigen::Index K = out.values.rows();
  out.pvalues = Eigen::MatrixXd::Zero(K, K);
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index j = i + 1; j < K; ++j) {
      out.pvalues(i, j) = out.pvalues(j, i) = correlation_pvalue(out.values(i, j), out.n, method);
    }
  }
  return out;
}

MaskedMatrix significance_mask(const CorrelationMatrix& corr, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("significance_mask: level must lie in (0, 1)");
  MaskedMatrix out;
  out.labels = corr.labels;
  out.values = corr.values;
  out.level = level;
  out.present = (corr.pvalues.array() <= level).matrix();
  return out;
}

}  // namespace spill
