#include "spillover/r2conn.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "spillover/error.hpp"
#include "spillover/estimators.hpp"

namespace spill {

namespace {

std::string column_name(const std::vector<std::string>& labels, int series, int lag) {
  std::string name = series < static_cast<int>(labels.size()) ? labels[static_cast<std::size_t>(series)]
                                                              : "#" + std::to_string(series);
  return lag == 0 ? name + "(t)" : name + "(t-" + std::to_string(lag) + ")";
}

void check_dimensions(Eigen::Index T, Eigen::Index K, int p) {
  if (p < 1) throw std::invalid_argument("lag order must be at least 1");
  const Eigen::Index predictors = (K - 1) + K * p;
  if (T - p <= predictors) {
    throw std::invalid_argument("infeasible design: " + std::to_string(T - p) + " observations for " +
                                std::to_string(predictors) + " predictors");
  }
}

// Columns [y_t (K), y_{t-1} (K), ..., y_{t-p} (K)] over rows p..T-1.
Eigen::MatrixXd stacked_lags(const Eigen::MatrixXd& data, int p) {
  const Eigen::Index K = data.cols();
  const Eigen::Index rows = data.rows() - p;
  Eigen::MatrixXd Z(rows, K * (p + 1));
  for (int lag = 0; lag <= p; ++lag) Z.middleCols(lag * K, K) = data.middleRows(p - lag, rows);
  return Z;
}

}  // namespace

Design build_design(const ReturnPanel& returns, int k, int p) {
  const Eigen::Index T = static_cast<Eigen::Index>(returns.rows());
  const Eigen::Index K = static_cast<Eigen::Index>(returns.cols());
  if (k < 0 || k >= K) throw std::invalid_argument("build_design: equation index out of range");
  check_dimensions(T, K, p);

  Design d;
  d.spec.k = k;
  d.spec.p = p;
  for (int i = 0; i < K; ++i) {
    if (i != k) d.spec.contemporaneous_idx.push_back(i);
  }
  for (int lag = 1; lag <= p; ++lag) {
    for (int i = 0; i < K; ++i) d.spec.lag_idx.push_back(i);
  }

  const Eigen::Index rows = T - p;
  Eigen::MatrixXd Z = stacked_lags(returns.returns, p);
  d.y = Z.col(k);
  d.X.resize(rows, d.spec.predictors());
  Eigen::Index c = 0;
  for (int i : d.spec.contemporaneous_idx) d.X.col(c++) = Z.col(i);
  d.X.rightCols(K * p) = Z.rightCols(K * p);

  auto standardize = [&](auto&& col, const std::string& name) {
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(rows - 1));
    if (!(sd > 0.0)) throw DegenerateDataError("build_design: column " + name + " is constant");
    col /= sd;
  };
  standardize(d.y, column_name(returns.labels, k, 0));
  for (Eigen::Index j = 0; j < d.X.cols(); ++j) {
    const bool contemporaneous = j < static_cast<Eigen::Index>(d.spec.contemporaneous_idx.size());
    const int series = contemporaneous ? d.spec.contemporaneous_idx[static_cast<std::size_t>(j)]
                                       : d.spec.lag_idx[static_cast<std::size_t>(j - (K - 1))];
    const int lag = contemporaneous ? 0 : 1 + static_cast<int>((j - (K - 1)) / K);
    standardize(d.X.col(j), column_name(returns.labels, series, lag));
  }
  return d;
}

namespace {

R2Decomposition decompose_impl(Eigen::MatrixXd Rxx, Eigen::VectorXd rxy, const std::vector<std::string>* names) {
  const Eigen::Index m = Rxx.rows();
  if (Rxx.cols() != m || rxy.size() != m) throw std::invalid_argument("decompose_r2: dimension mismatch");
  R2Decomposition out;
  if (m == 0) {
    out.contributions.resize(0);
    return out;
  }

  Eigen::MatrixXd joint(m + 1, m + 1);
  joint.topLeftCorner(m, m) = Rxx;
  joint.topRightCorner(m, 1) = rxy;
  joint.bottomLeftCorner(1, m) = rxy.transpose();
  joint(m, m) = 1.0;
  if (min_eigenvalue(joint) < -1e-10) {
    PsdRepair fix = nearest_psd(joint);
    out.psd_repaired = fix.repaired;
    out.repair_distance = fix.distance;
    Rxx = fix.matrix.topLeftCorner(m, m);
    rxy = fix.matrix.topRightCorner(m, 1);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Rxx);
  const Eigen::VectorXd& lambda = es.eigenvalues();
  if (!(lambda.minCoeff() > 1e-10 * std::max(1.0, lambda.maxCoeff()))) {
    Eigen::Index bi = 0, bj = 1;
    double best = -1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        if (std::abs(Rxx(i, j)) > best) {
          best = std::abs(Rxx(i, j));
          bi = i;
          bj = j;
        }
      }
    }
    auto name = [&](Eigen::Index i) {
      return names ? (*names)[static_cast<std::size_t>(i)] : "#" + std::to_string(i);
    };
    throw DegenerateDataError("collinear predictors " + name(bi) + " and " + name(bj) +
                              " (singular correlation matrix)");
  }
  const Eigen::MatrixXd& V = es.eigenvectors();
  Eigen::MatrixXd delta = V * lambda.cwiseSqrt().asDiagonal() * V.transpose();
  Eigen::VectorXd beta = V * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * (V.transpose() * rxy);
  out.contributions = delta.cwiseAbs2() * beta.cwiseAbs2();
  out.r_squared = (V.transpose() * rxy).cwiseAbs2().cwiseQuotient(lambda).sum();
  return out;
}

}  // namespace

R2Decomposition decompose_r2_from_correlation(const Eigen::MatrixXd& Rxx, const Eigen::VectorXd& rxy) {
  return decompose_impl(Rxx, rxy, nullptr);
}

R2Decomposition decompose_r2(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, CorrMethod method) {
  if (X.rows() != y.size()) throw std::invalid_argument("decompose_r2: dimension mismatch");
  Eigen::MatrixXd Z(X.rows(), X.cols() + 1);
  Z.leftCols(X.cols()) = X;
  Z.col(X.cols()) = y;
  Eigen::MatrixXd R = correlation(Z, method);
  const Eigen::Index m = X.cols();
  return decompose_impl(R.topLeftCorner(m, m), R.topRightCorner(m, 1), nullptr);
}

ConnectednessTable connectedness_table(const Eigen::MatrixXd& data, const std::vector<std::string>& labels, int p,
                                       const R2Options& options, R2Diagnostics* diagnostics) {
  const Eigen::Index T = data.rows();
  const int K = static_cast<int>(data.cols());
  if (static_cast<int>(labels.size()) != K) throw std::invalid_argument("connectedness_table: label count mismatch");
  check_dimensions(T, K, p);

  Eigen::MatrixXd Z = stacked_lags(data, p);
  Eigen::MatrixXd R;
  try {
    R = correlation(Z, options.method);
  } catch (const DegenerateDataError&) {
    for (Eigen::Index c = 0; c < Z.cols(); ++c) {
      if (Z.col(c).maxCoeff() == Z.col(c).minCoeff()) {
        throw DegenerateDataError("connectedness_table: column " +
                                  column_name(labels, static_cast<int>(c % K), static_cast<int>(c / K)) +
                                  " is constant in the estimation sample");
      }
    }
    throw;
  }

  ConnectednessTable table;
  table.labels = labels;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(K, K);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(K, K);
  if (diagnostics) diagnostics->repair_distance.assign(static_cast<std::size_t>(K), 0.0);

  const int m = (K - 1) + K * p;
  std::vector<int> cols;
  std::vector<std::string> names;
  cols.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < K; ++k) {
    cols.clear();
    names.clear();
    for (int i = 0; i < K; ++i) {
      if (i == k) continue;
      cols.push_back(i);
      names.push_back(column_name(labels, i, 0));
    }
    for (int lag = 1; lag <= p; ++lag) {
      for (int i = 0; i < K; ++i) {
        cols.push_back(lag * K + i);
        names.push_back(column_name(labels, i, lag));
      }
    }
    Eigen::MatrixXd Rxx(m, m);
    Eigen::VectorXd rxy(m);
    for (int a = 0; a < m; ++a) {
      rxy(a) = R(cols[static_cast<std::size_t>(a)], k);
      for (int b = 0; b < m; ++b) Rxx(a, b) = R(cols[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
    }
    R2Decomposition dec;
    try {
      dec = decompose_impl(std::move(Rxx), std::move(rxy), &names);
    } catch (const DegenerateDataError& e) {
      throw DegenerateDataError("equation " + labels[static_cast<std::size_t>(k)] + ": " + e.what());
    }
    if (diagnostics) diagnostics->repair_distance[static_cast<std::size_t>(k)] = dec.repair_distance;
    for (int a = 0; a < m; ++a) {
      const int col = cols[static_cast<std::size_t>(a)];
      const double share = dec.contributions(a);
      if (col < K) {
        C(k, col) += share;
      } else {
        L(k, col % K) += share;
      }
    }
  }
  C *= options.scale;
  L *= options.scale;
  C.diagonal().setZero();
  table.total = C + L;
  table.contemporaneous = std::move(C);
  table.lagged = std::move(L);
  return table;
}

ConnectednessTable connectedness_table(const ReturnPanel& returns, int p, const R2Options& options,
                                       R2Diagnostics* diagnostics) {
  return connectedness_table(returns.returns, returns.labels, p, options, diagnostics);
}

namespace {

struct Directional {
  Eigen::VectorXd to, from, net, inc_own;
  double tci = 0.0;
};

Directional directional(const Eigen::MatrixXd& M) {
  const Eigen::Index K = M.rows();
  Eigen::MatrixXd off = M;
  off.diagonal().setZero();
  Directional d;
  d.to = off.colwise().sum().transpose();
  d.from = off.rowwise().sum();
  d.net = d.to - d.from;
  d.inc_own = d.to + M.diagonal();
  d.tci = K > 0 ? d.to.sum() / static_cast<double>(K) : 0.0;
  return d;
}

}  // namespace

SpilloverIndices aggregate_indices(const ConnectednessTable& table) {
  const Eigen::Index K = static_cast<Eigen::Index>(table.size());
  if (table.total.rows() != K || table.total.cols() != K) throw std::invalid_argument("aggregate_indices: bad table");
  SpilloverIndices s;
  Directional all = directional(table.total);
  s.to = all.to;
  s.from = all.from;
  s.net = all.net;
  s.inc_own = all.inc_own;
  s.tci = all.tci;
  if (table.has_split()) {
    Directional c = directional(*table.contemporaneous);
    Directional l = directional(*table.lagged);
    s.has_split = true;
    s.to_c = c.to;
    s.to_l = l.to;
    s.from_c = c.from;
    s.from_l = l.from;
    s.net_c = c.net;
    s.net_l = l.net;
    s.inc_own_c = c.inc_own;
    s.inc_own_l = l.inc_own;
    s.tci_c = c.tci;
    s.tci_l = l.tci;
  }
  return s;
}

NpdcMatrices npdc(const ConnectednessTable& table) {
  NpdcMatrices out;
  out.overall = table.total.transpose() - table.total;
  if (table.has_split()) {
    out.contemporaneous = Eigen::MatrixXd(table.contemporaneous->transpose() - *table.contemporaneous);
    out.lagged = Eigen::MatrixXd(table.lagged->transpose() - *table.lagged);
  }
  return out;
}

}  // namespace spill
