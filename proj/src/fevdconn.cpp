#include "spillover/fevdconn.hpp"

#include <stdexcept>

#include "spillover/error.hpp"

namespace spill {

std::vector<Eigen::MatrixXd> ma_coefficients(const std::vector<Eigen::MatrixXd>& phi, int horizon) {
  if (horizon < 1) throw std::invalid_argument("ma_coefficients: horizon must be at least 1");
  if (phi.empty()) throw std::invalid_argument("ma_coefficients: no VAR coefficient matrices");
  const Eigen::Index K = phi.front().rows();
  std::vector<Eigen::MatrixXd> A;
  A.reserve(static_cast<std::size_t>(horizon));
  A.push_back(Eigen::MatrixXd::Identity(K, K));
  const int p = static_cast<int>(phi.size());
  for (int h = 1; h < horizon; ++h) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(K, K);
    for (int j = 1; j <= std::min(h, p); ++j) next += phi[static_cast<std::size_t>(j - 1)] * A[static_cast<std::size_t>(h - j)];
    A.push_back(std::move(next));
  }
  return A;
}

std::vector<Eigen::MatrixXd> ma_coefficients(const VarModel& model, int horizon) {
  return ma_coefficients(model.coeff, horizon);
}

GfevdTable gfevd(const std::vector<Eigen::MatrixXd>& phi, const Eigen::MatrixXd& sigma, int horizon,
                 std::vector<std::string> labels) {
  const Eigen::Index K = sigma.rows();
  if (sigma.cols() != K) throw std::invalid_argument("gfevd: covariance must be square");
  for (const auto& m : phi) {
    if (m.rows() != K || m.cols() != K) throw std::invalid_argument("gfevd: coefficient dimension mismatch");
  }
  for (Eigen::Index j = 0; j < K; ++j) {
    if (!(sigma(j, j) > 0.0)) throw DegenerateDataError("gfevd: zero residual variance in equation " + std::to_string(j));
  }
  auto A = ma_coefficients(phi, horizon);

  Eigen::MatrixXd numer = Eigen::MatrixXd::Zero(K, K);
  Eigen::VectorXd denom = Eigen::VectorXd::Zero(K);
  for (const auto& Ah : A) {
    Eigen::MatrixXd AS = Ah * sigma;
    numer += AS.cwiseAbs2();
    denom += (AS * Ah.transpose()).diagonal();
  }
  GfevdTable g;
  g.labels = std::move(labels);
  g.horizon = horizon;
  g.theta_raw.resize(K, K);
  for (Eigen::Index i = 0; i < K; ++i) {
    if (!(denom(i) > 0.0)) throw DegenerateDataError("gfevd: zero forecast error variance for series " + std::to_string(i));
    for (Eigen::Index j = 0; j < K; ++j) g.theta_raw(i, j) = numer(i, j) / sigma(j, j) / denom(i);
  }
  g.theta = g.theta_raw.array().colwise() / g.theta_raw.rowwise().sum().array();
  return g;
}

GfevdTable gfevd(const VarModel& model, int horizon) { return gfevd(model.coeff, model.sigma, horizon, model.labels); }

ConnectednessTable to_table(const GfevdTable& g, double scale) {
  ConnectednessTable t;
  t.labels = g.labels;
  t.total = scale * g.theta;
  return t;
}

namespace {

FevdResult finish(VarModel model, const FevdOptions& options) {
  FevdResult r;
  r.gfevd = gfevd(model, options.horizon);
  r.table = to_table(r.gfevd, options.scale);
  r.indices = aggregate_indices(r.table);
  r.model = std::move(model);
  return r;
}

}  // namespace

FevdResult dy_connectedness(const Eigen::MatrixXd& returns, const std::vector<std::string>& labels,
                            const FevdOptions& options) {
  return finish(var_fit(returns, options.p, labels), options);
}

FevdResult dy_connectedness(const ReturnPanel& returns, const FevdOptions& options) {
  return dy_connectedness(returns.returns, returns.labels, options);
}

FevdResult qvar_connectedness(const Eigen::MatrixXd& data, const std::vector<std::string>& labels, double tau,
                              const FevdOptions& options) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("qvar_connectedness: tau must lie in (0, 1)");
  const int p = options.p;
  if (p < 1) throw std::invalid_argument("qvar_connectedness: lag order must be at least 1");
  const Eigen::Index T = data.rows();
  const Eigen::Index K = data.cols();
  if (T - p <= K * p + 1) throw std::invalid_argument("qvar_connectedness: insufficient observations");

  Eigen::MatrixXd X = lag_matrix(data, p, p);
  Eigen::MatrixXd Y = data.bottomRows(T - p);
  VarModel model;
  model.p = p;
  model.labels = labels;
  model.intercept.resize(K);
  model.coeff.assign(static_cast<std::size_t>(p), Eigen::MatrixXd::Zero(K, K));
  model.residuals.resize(T - p, K);
  int nonconverged = 0;
  for (Eigen::Index k = 0; k < K; ++k) {
    QuantileFit fit;
    try {
      fit = quantile_fit(X, Y.col(k), tau, true);
    } catch (const DegenerateDataError& e) {
      throw DegenerateDataError("qvar equation " + (labels.empty() ? std::to_string(k) : labels[static_cast<std::size_t>(k)]) +
                                ": " + e.what());
    }
    if (!fit.converged) ++nonconverged;
    model.intercept(k) = fit.intercept;
    for (int lag = 0; lag < p; ++lag) {
      model.coeff[static_cast<std::size_t>(lag)].row(k) = fit.coefficients.segment(lag * K, K).transpose();
    }
    model.residuals.col(k) = fit.residuals;
  }
  model.sigma = model.residuals.transpose() * model.residuals / static_cast<double>(T - p);
  model.spectral_radius = companion_spectral_radius(model.coeff);
  FevdResult r = finish(std::move(model), options);
  r.nonconverged_equations = nonconverged;
  return r;
}

FevdResult qvar_connectedness(const ReturnPanel& returns, double tau, const FevdOptions& options) {
  return qvar_connectedness(returns.returns, returns.labels, tau, options);
}

}  // namespace spill
