#pragma once

// Slow, direct reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Least squares with intercept from the normal equations, Gaussian
// elimination with partial pivoting in long double.
struct Ols {
  std::vector<long double> beta;  // intercept first
  Eigen::VectorXd residuals;
  double r_squared = 0.0;
};

inline std::vector<long double> solve(std::vector<std::vector<long double>> A, std::vector<long double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
    }
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const long double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<long double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    long double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
    x[i] = s / A[i][i];
  }
  return x;
}

inline Ols ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const std::size_t n = static_cast<std::size_t>(X.rows());
  const std::size_t m = static_cast<std::size_t>(X.cols()) + 1;
  auto col = [&](std::size_t r, std::size_t j) -> long double {
    return j == 0 ? 1.0L : static_cast<long double>(X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j - 1)));
  };
  std::vector<std::vector<long double>> A(m, std::vector<long double>(m, 0.0L));
  std::vector<long double> b(m, 0.0L);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < m; ++i) {
      b[i] += col(r, i) * y(static_cast<Eigen::Index>(r));
      for (std::size_t j = 0; j < m; ++j) A[i][j] += col(r, i) * col(r, j);
    }
  }
  Ols out;
  out.beta = solve(A, b);
  out.residuals.resize(static_cast<Eigen::Index>(n));
  long double ybar = 0, ssr = 0, sst = 0;
  for (std::size_t r = 0; r < n; ++r) ybar += y(static_cast<Eigen::Index>(r));
  ybar /= n;
  for (std::size_t r = 0; r < n; ++r) {
    long double fit = 0;
    for (std::size_t i = 0; i < m; ++i) fit += out.beta[i] * col(r, i);
    const long double e = y(static_cast<Eigen::Index>(r)) - fit;
    out.residuals(static_cast<Eigen::Index>(r)) = static_cast<double>(e);
    ssr += e * e;
    const long double d = y(static_cast<Eigen::Index>(r)) - ybar;
    sst += d * d;
  }
  out.r_squared = static_cast<double>(1.0L - ssr / sst);
  return out;
}

inline double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    mx += x(i);
    my += y(i);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sxy += (x(i) - mx) * (y(i) - my);
    sxx += (x(i) - mx) * (x(i) - mx);
    syy += (y(i) - my) * (y(i) - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Kendall tau-b by counting every pair.
inline double kendall(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  long long concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (Eigen::Index j = i + 1; j < x.size(); ++j) {
      const double dx = x(i) - x(j), dy = y(i) - y(j);
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        ++tie_x;
      } else if (dy == 0) {
        ++tie_y;
      } else if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n1 = static_cast<double>(concordant + discordant + tie_x);
  const double n2 = static_cast<double>(concordant + discordant + tie_y);
  return static_cast<double>(concordant - discordant) / std::sqrt(n1 * n2);
}

// Ranks by repeated scanning; ties get the average of their positions.
inline Eigen::VectorXd ranks(const Eigen::VectorXd& x) {
  Eigen::VectorXd r(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double below = 0, equal = 0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      if (x(j) < x(i)) below += 1;
      if (x(j) == x(i)) equal += 1;
    }
    r(i) = below + (equal + 1.0) / 2.0;
  }
  return r;
}

// Denman-Beavers iteration: Y -> M^{1/2}, Z -> M^{-1/2} for SPD M.
inline void sqrt_and_inverse(const Eigen::MatrixXd& M, Eigen::MatrixXd& root, Eigen::MatrixXd& inv_root) {
  Eigen::MatrixXd Y = M;
  Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(M.rows(), M.cols());
  for (int it = 0; it < 100; ++it) {
    Eigen::MatrixXd Yi = Y.inverse();
    Eigen::MatrixXd Zi = Z.inverse();
    Eigen::MatrixXd Yn = 0.5 * (Y + Zi);
    Eigen::MatrixXd Zn = 0.5 * (Z + Yi);
    const double change = (Yn - Y).norm();
    Y = Yn;
    Z = Zn;
    if (change < 1e-15 * Y.norm()) break;
  }
  root = Y;
  inv_root = Z;
}

// Relative weights from the predictor correlations and response correlations.
inline Eigen::VectorXd relative_weights(const Eigen::MatrixXd& Rxx, const Eigen::VectorXd& rxy) {
  Eigen::MatrixXd root, inv_root;
  sqrt_and_inverse(Rxx, root, inv_root);
  Eigen::VectorXd beta = inv_root * rxy;
  Eigen::VectorXd eps = Eigen::VectorXd::Zero(rxy.size());
  for (Eigen::Index j = 0; j < rxy.size(); ++j) {
    for (Eigen::Index m = 0; m < rxy.size(); ++m) eps(j) += root(j, m) * root(j, m) * beta(m) * beta(m);
  }
  return eps;
}

// Generalised FEVD by summing the moving-average representation obtained
// from powers of the companion matrix (VAR(p) stacked into VAR(1)).
inline Eigen::MatrixXd gfevd(const std::vector<Eigen::MatrixXd>& phi, const Eigen::MatrixXd& sigma, int H) {
  const Eigen::Index K = sigma.rows();
  const Eigen::Index p = static_cast<Eigen::Index>(phi.size());
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(K * p, K * p);
  for (Eigen::Index j = 0; j < p; ++j) F.block(0, j * K, K, K) = phi[static_cast<std::size_t>(j)];
  if (p > 1) F.block(K, 0, K * (p - 1), K * (p - 1)).setIdentity();
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(K * p, K * p);
  Eigen::MatrixXd num = Eigen::MatrixXd::Zero(K, K);
  Eigen::VectorXd den = Eigen::VectorXd::Zero(K);
  for (int h = 0; h < H; ++h) {
    Eigen::MatrixXd A = power.topLeftCorner(K, K);
    for (Eigen::Index i = 0; i < K; ++i) {
      for (Eigen::Index j = 0; j < K; ++j) {
        double e = 0;
        for (Eigen::Index m = 0; m < K; ++m) e += A(i, m) * sigma(m, j);
        num(i, j) += e * e / sigma(j, j);
      }
      double v = 0;
      for (Eigen::Index m = 0; m < K; ++m) {
        for (Eigen::Index n = 0; n < K; ++n) v += A(i, m) * sigma(m, n) * A(i, n);
      }
      den(i) += v;
    }
    power = F * power;
  }
  Eigen::MatrixXd theta(K, K);
  for (Eigen::Index i = 0; i < K; ++i) {
    double row = 0;
    for (Eigen::Index j = 0; j < K; ++j) row += num(i, j) / den(i);
    for (Eigen::Index j = 0; j < K; ++j) theta(i, j) = num(i, j) / den(i) / row;
  }
  return theta;
}

inline double jarque_bera(double n, double skew, double kurt) {
  return n / 6.0 * (skew * skew + (kurt - 3.0) * (kurt - 3.0) / 4.0);
}

// Exact linear quantile regression with one regressor and an intercept by
// checking every line through two observations.
inline double quantile_objective_2d(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double tau, double& a,
                                    double& b) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (Eigen::Index j = i + 1; j < x.size(); ++j) {
      if (x(i) == x(j)) continue;
      const double slope = (y(j) - y(i)) / (x(j) - x(i));
      const double icept = y(i) - slope * x(i);
      double loss = 0;
      for (Eigen::Index r = 0; r < x.size(); ++r) {
        const double u = y(r) - icept - slope * x(r);
        loss += u * (u < 0 ? tau - 1.0 : tau);
      }
      if (loss < best) {
        best = loss;
        a = icept;
        b = slope;
      }
    }
  }
  return best;
}

}  // namespace oracle
