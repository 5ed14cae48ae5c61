#include "spillover/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "spillover/error.hpp"

namespace spill {

namespace {

constexpr double kRankTolerance = 1e-10;

Eigen::MatrixXd with_constant(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd D(X.rows(), X.cols() + 1);
  D.col(0).setOnes();
  D.rightCols(X.cols()) = X;
  return D;
}

// Solves min ||D b - Y||_F column by column with one factorisation. Columns
// of D are scaled to unit norm first so the rank test is scale free.
Eigen::MatrixXd least_squares(const Eigen::MatrixXd& D, const Eigen::MatrixXd& Y) {
  Eigen::VectorXd norms = D.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < norms.size(); ++j) {
    if (!(norms(j) > 0.0)) throw DegenerateDataError("design column " + std::to_string(j) + " is identically zero");
  }
  Eigen::MatrixXd scaled = D * norms.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(kRankTolerance);
  if (qr.rank() < scaled.cols()) {
    throw DegenerateDataError("design matrix is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                              std::to_string(scaled.cols()) + ")");
  }
  Eigen::MatrixXd b = qr.solve(Y);
  return norms.cwiseInverse().asDiagonal() * b;
}

}  // namespace

LinearFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool with_intercept) {
  const Eigen::Index T = X.rows();
  const Eigen::Index m = X.cols();
  if (y.size() != T) throw std::invalid_argument("ols_fit: response length does not match design rows");
  const Eigen::Index params = m + (with_intercept ? 1 : 0);
  if (T <= params) throw std::invalid_argument("ols_fit: need more observations than parameters plus one");

  Eigen::MatrixXd D = with_intercept ? with_constant(X) : X;
  Eigen::VectorXd b = least_squares(D, y);

  LinearFit fit;
  if (with_intercept) {
    fit.intercept = b(0);
    fit.coefficients = b.tail(m);
  } else {
    fit.coefficients = b;
  }
  fit.residuals = y - D * b;
  const double ssr = fit.residuals.squaredNorm();
  const double sst = with_intercept ? (y.array() - y.mean()).matrix().squaredNorm() : y.squaredNorm();
  fit.r_squared = sst > 0.0 ? std::clamp(1.0 - ssr / sst, 0.0, 1.0) : 0.0;
  const double n = static_cast<double>(T);
  fit.bic = n * std::log(ssr / n) + static_cast<double>(params) * std::log(n);
  return fit;
}

Eigen::MatrixXd lag_matrix(const Eigen::MatrixXd& data, int p, int first_row) {
  const Eigen::Index K = data.cols();
  const Eigen::Index rows = data.rows() - first_row;
  Eigen::MatrixXd X(rows, K * p);
  for (int lag = 1; lag <= p; ++lag) {
    X.middleCols((lag - 1) * K, K) = data.middleRows(first_row - lag, rows);
  }
  return X;
}

double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& coeff) {
  if (coeff.empty()) return 0.0;
  const Eigen::Index K = coeff.front().rows();
  const Eigen::Index p = static_cast<Eigen::Index>(coeff.size());
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(K * p, K * p);
  for (Eigen::Index j = 0; j < p; ++j) F.block(0, j * K, K, K) = coeff[static_cast<std::size_t>(j)];
  if (p > 1) F.block(K, 0, K * (p - 1), K * (p - 1)).setIdentity();
  Eigen::EigenSolver<Eigen::MatrixXd> es(F, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

VarModel var_fit(const Eigen::MatrixXd& data, int p, std::vector<std::string> labels) {
  if (p < 1) throw std::invalid_argument("var_fit: lag order must be at least 1");
  const Eigen::Index T = data.rows();
  const Eigen::Index K = data.cols();
  if (T - p <= K * p + 1) {
    throw std::invalid_argument("var_fit: insufficient observations (T=" + std::to_string(T) + ", K=" +
                                std::to_string(K) + ", p=" + std::to_string(p) + ")");
  }
  Eigen::MatrixXd D = with_constant(lag_matrix(data, p, p));
  Eigen::MatrixXd Y = data.bottomRows(T - p);
  Eigen::MatrixXd B;
  try {
    B = least_squares(D, Y);
  } catch (const DegenerateDataError& e) {
    throw DegenerateDataError(std::string("var_fit: collinear lag block: ") + e.what());
  }

  VarModel model;
  model.p = p;
  model.labels = std::move(labels);
  model.intercept = B.row(0).transpose();
  for (int lag = 0; lag < p; ++lag) {
    model.coeff.push_back(B.middleRows(1 + lag * K, K).transpose());
  }
  model.residuals = Y - D * B;
  model.sigma = model.residuals.transpose() * model.residuals / static_cast<double>(T - p);
  model.spectral_radius = companion_spectral_radius(model.coeff);
  return model;
}

VarModel var_fit(const ReturnPanel& returns, int p) { return var_fit(returns.returns, p, returns.labels); }

int select_lag_bic(const Eigen::MatrixXd& data, int p_max) {
  if (p_max < 1) throw std::invalid_argument("select_lag_bic: p_max must be at least 1");
  const Eigen::Index T = data.rows();
  const Eigen::Index K = data.cols();
  const Eigen::Index n_eff = T - p_max;
  if (n_eff <= K * p_max + 1) throw std::invalid_argument("select_lag_bic: p_max infeasible for sample size");

  Eigen::MatrixXd Y = data.bottomRows(n_eff);
  Eigen::MatrixXd lags = lag_matrix(data, p_max, p_max);
  const double n = static_cast<double>(n_eff);
  int best = 1;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= p_max; ++p) {
    Eigen::MatrixXd D = with_constant(lags.leftCols(K * p));
    Eigen::MatrixXd E = Y - D * least_squares(D, Y);
    Eigen::MatrixXd sigma = E.transpose() * E / n;
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) throw DegenerateDataError("select_lag_bic: singular residual covariance");
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double bic = log_det + static_cast<double>(p * K * K) * std::log(n) / n;
    if (bic < best_bic) {
      best_bic = bic;
      best = p;
    }
  }
  return best;
}

int select_lag_bic(const ReturnPanel& returns, int p_max) { return select_lag_bic(returns.returns, p_max); }

double check_loss(const Eigen::VectorXd& residuals, double tau) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < residuals.size(); ++i) {
    const double u = residuals(i);
    total += u * (tau - (u < 0.0 ? 1.0 : 0.0));
  }
  return total;
}

namespace {

// Exact finish for the quantile fit. Start from the basic solution through
// the rows with the smallest |residual| and exchange basis rows along
// descent edges until the subgradient optimality conditions hold.
struct Vertex {
  Eigen::VectorXd beta;
  bool valid = false;
  bool optimal = false;
};

Vertex polish_vertex(const Eigen::MatrixXd& D, const Eigen::VectorXd& y, const Eigen::VectorXd& residuals,
                     double tau) {
  const Eigen::Index n = D.rows();
  const Eigen::Index m = D.cols();
  Vertex v;
  if (m == 0) return v;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(residuals(a)) < std::abs(residuals(b));
  });

  // Greedy basis: rows in residual order that keep the selection independent.
  std::vector<Eigen::Index> basis;
  Eigen::MatrixXd rows(0, m);
  for (Eigen::Index idx : order) {
    Eigen::MatrixXd trial(rows.rows() + 1, m);
    trial << rows, D.row(idx);
    Eigen::FullPivLU<Eigen::MatrixXd> rank_lu(trial);
    rank_lu.setThreshold(1e-10);
    if (rank_lu.rank() == trial.rows()) {
      rows = std::move(trial);
      basis.push_back(idx);
      if (static_cast<Eigen::Index>(basis.size()) == m) break;
    }
  }
  if (static_cast<Eigen::Index>(basis.size()) < m) return v;

  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  const double tol = 1e-9;
  std::vector<char> in_basis(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i : basis) in_basis[static_cast<std::size_t>(i)] = 1;

  Eigen::MatrixXd Dh(m, m);
  Eigen::VectorXd yh(m);
  const int max_pivots = 50 + 10 * static_cast<int>(m);
  for (int pivot = 0; pivot <= max_pivots; ++pivot) {
    for (Eigen::Index i = 0; i < m; ++i) {
      Dh.row(i) = D.row(basis[static_cast<std::size_t>(i)]);
      yh(i) = y(basis[static_cast<std::size_t>(i)]);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Dh);
    v.beta = lu.solve(yh);
    v.valid = v.beta.allFinite();
    if (!v.valid) return v;
    Eigen::VectorXd r = y - D * v.beta;
    for (Eigen::Index i : basis) r(i) = 0.0;

    // Zero residuals off the basis count as positive.
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (in_basis[static_cast<std::size_t>(i)]) continue;
      if (std::abs(r(i)) <= 1e-13 * scale) r(i) = 0.0;
      rhs -= (r(i) < 0.0 ? tau - 1.0 : tau) * D.row(i).transpose();
    }
    Eigen::VectorXd xi = lu.transpose().solve(rhs);

    // Directional derivative when basis row k's fit moves up: xi_k + 1 - tau;
    // down: tau - xi_k. Take the steepest violation.
    Eigen::Index leave = -1;
    double slope = -tol, dir = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      const double up = xi(k) + 1.0 - tau;
      const double down = tau - xi(k);
      if (up < slope) {
        slope = up;
        leave = k;
        dir = 1.0;
      }
      if (down < slope) {
        slope = down;
        leave = k;
        dir = -1.0;
      }
    }
    if (leave < 0) {
      v.optimal = true;
      return v;
    }
    if (pivot == max_pivots) return v;

    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e(leave) = dir;
    const Eigen::VectorXd delta = lu.solve(e);
    const Eigen::VectorXd move = D * delta;

    struct Breakpoint {
      double t;
      double gain;
      Eigen::Index row;
    };
    std::vector<Breakpoint> points;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (in_basis[static_cast<std::size_t>(i)]) continue;
      const double d = move(i);
      const bool crosses = r(i) >= 0.0 ? d > 0.0 : d < 0.0;
      if (!crosses) continue;
      points.push_back({r(i) / d, std::abs(d), i});
    }
    if (points.empty()) return v;  // unbounded direction: cannot happen for a proper LP
    std::sort(points.begin(), points.end(), [](const Breakpoint& a, const Breakpoint& b) {
      return a.t < b.t || (a.t == b.t && a.row < b.row);
    });
    Eigen::Index enter = -1;
    for (const auto& bp : points) {
      slope += bp.gain;
      if (slope >= 0.0) {
        enter = bp.row;
        break;
      }
    }
    if (enter < 0) enter = points.back().row;
    in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave)])] = 0;
    basis[static_cast<std::size_t>(leave)] = enter;
    in_basis[static_cast<std::size_t>(enter)] = 1;
  }
  return v;
}

}  // namespace

QuantileFit quantile_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tau, bool with_intercept) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("quantile_fit: tau must lie in (0, 1)");
  const Eigen::Index T = X.rows();
  if (y.size() != T) throw std::invalid_argument("quantile_fit: response length does not match design rows");
  const Eigen::Index params = X.cols() + (with_intercept ? 1 : 0);
  if (T <= params) throw std::invalid_argument("quantile_fit: need more observations than parameters plus one");

  Eigen::MatrixXd D = with_intercept ? with_constant(X) : X;
  Eigen::VectorXd beta = least_squares(D, y);

  constexpr int kMaxIterations = 200;
  constexpr double kEpsFloor = 1e-6;
  constexpr double kTolerance = 1e-8;

  Eigen::VectorXd r = y - D * beta;
  double eps = std::max(kEpsFloor, 0.1 * r.cwiseAbs().mean());
  Eigen::VectorXd best_beta = beta;
  double best_obj = check_loss(r, tau);
  bool converged = false;
  int it = 0;
  Eigen::VectorXd w(T);
  auto consider = [&](const Eigen::VectorXd& candidate) {
    const double obj = check_loss(y - D * candidate, tau);
    if (obj < best_obj) {
      best_obj = obj;
      best_beta = candidate;
    }
  };

  while (it < kMaxIterations) {
    ++it;
    for (Eigen::Index t = 0; t < T; ++t) {
      w(t) = (r(t) < 0.0 ? 1.0 - tau : tau) / std::max(std::abs(r(t)), eps);
    }
    Eigen::MatrixXd A = D.transpose() * w.asDiagonal() * D;
    Eigen::VectorXd rhs = D.transpose() * w.asDiagonal() * y;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    Eigen::VectorXd next = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !next.allFinite()) {
      Eigen::VectorXd sw = w.cwiseSqrt();
      next = least_squares(sw.asDiagonal() * D, sw.asDiagonal() * y);
    }
    const double change = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    r = y - D * beta;
    consider(beta);

    const double coarse = 1e-4 * (1.0 + beta.cwiseAbs().maxCoeff());
    if (change < kTolerance && eps <= kEpsFloor) break;
    if (change < coarse && eps > kEpsFloor) {
      eps = std::max(kEpsFloor, eps * 0.1);
      Vertex v = polish_vertex(D, y, r, tau);
      if (v.valid) {
        consider(v.beta);
        if (v.optimal) {
          best_beta = v.beta;
          best_obj = check_loss(y - D * v.beta, tau);
          converged = true;
          break;
        }
      }
    }
  }
  if (!converged) {
    Vertex v = polish_vertex(D, y, y - D * best_beta, tau);
    if (v.valid) {
      consider(v.beta);
      if (v.optimal) {
        best_beta = v.beta;
        best_obj = check_loss(y - D * v.beta, tau);
        converged = true;
      }
    }
  }

  QuantileFit fit;
  fit.tau = tau;
  if (with_intercept) {
    fit.intercept = best_beta(0);
    fit.coefficients = best_beta.tail(X.cols());
  } else {
    fit.coefficients = best_beta;
  }
  fit.residuals = y - D * best_beta;
  fit.objective = best_obj;
  fit.iterations = it;
  fit.converged = converged;
  return fit;
}

namespace {

void require_symmetric(const Eigen::MatrixXd& M, const char* who) {
  if (M.rows() != M.cols()) throw std::invalid_argument(std::string(who) + ": matrix must be square");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
  }
}

}  // namespace

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& M) {
  require_symmetric(M, "symmetric_sqrt");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
  Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

PsdRepair nearest_psd(const Eigen::MatrixXd& M) {
  constexpr double kFloor = 1e-10;
  if (M.rows() != M.cols()) throw std::invalid_argument("nearest_psd: matrix must be square");
  Eigen::MatrixXd S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  PsdRepair out;
  if (es.eigenvalues().minCoeff() >= kFloor) {
    out.matrix = M;
    return out;
  }
  Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(kFloor);
  Eigen::MatrixXd A = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
  Eigen::VectorXd d = A.diagonal().cwiseSqrt().cwiseInverse();
  A = d.asDiagonal() * A * d.asDiagonal();
  A = (0.5 * (A + A.transpose())).eval();
  A.diagonal().setOnes();
  out.repaired = true;
  out.distance = (A - M).norm();
  out.matrix = std::move(A);
  return out;
}

}  // namespace spill
