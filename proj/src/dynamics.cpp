#include "spillover/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <stdexcept>
#include <thread>

#include "spillover/error.hpp"
#include "spillover/estimators.hpp"
#include "spillover/fevdconn.hpp"

namespace spill {

std::string to_string(Engine e) {
  switch (e) {
    case Engine::r2: return "r2";
    case Engine::dy: return "dy";
    case Engine::qvar: return "qvar";
  }
  return "r2";
}

Engine engine_from_string(const std::string& s) {
  if (s == "r2") return Engine::r2;
  if (s == "dy") return Engine::dy;
  if (s == "qvar") return Engine::qvar;
  throw std::invalid_argument("unknown engine '" + s + "'");
}

Estimate estimate_connectedness(const Eigen::MatrixXd& returns, const std::vector<std::string>& labels,
                                const EngineConfig& config) {
  Estimate est;
  est.p = config.reselect_lag ? select_lag_bic(returns, config.p_max) : config.p;
  switch (config.engine) {
    case Engine::r2: {
      R2Options opt;
      opt.method = config.corr;
      opt.scale = config.scale;
      est.table = connectedness_table(returns, labels, est.p, opt);
      break;
    }
    case Engine::dy: {
      FevdOptions opt{est.p, config.horizon, config.scale};
      est.table = dy_connectedness(returns, labels, opt).table;
      break;
    }
    case Engine::qvar: {
      FevdOptions opt{est.p, config.horizon, config.scale};
      FevdResult r = qvar_connectedness(returns, labels, config.tau, opt);
      est.nonconverged_equations = r.nonconverged_equations;
      est.table = std::move(r.table);
      break;
    }
  }
  return est;
}

std::vector<EventMarker> default_event_markers() {
  using namespace std::chrono;
  return {
      {year{2022} / February / 24, "conflict outbreak"},
      {year{2023} / March / 18, "corridor extension shortened to 60 days"},
  };
}

Eigen::VectorXd RollingSeries::tci() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) out(static_cast<Eigen::Index>(i)) = indices[i].tci;
  return out;
}

namespace {

int minimum_window(const EngineConfig& config, int K) {
  const int p = config.reselect_lag ? config.p_max : config.p;
  switch (config.engine) {
    case Engine::r2: return p + (K - 1) + K * p + 1;
    case Engine::dy:
    case Engine::qvar: return p + K * p + 2;
  }
  return 0;
}

}  // namespace

RollingSeries rolling_connectedness(const ReturnPanel& returns, int window, const EngineConfig& config, int threads) {
  const int T = static_cast<int>(returns.rows());
  const int K = static_cast<int>(returns.cols());
  if (window < 1) throw std::invalid_argument("rolling window must be positive");
  if (window > T) {
    throw std::invalid_argument("rolling window " + std::to_string(window) + " exceeds the " + std::to_string(T) +
                                " available returns");
  }
  if (window < minimum_window(config, K)) {
    throw std::invalid_argument("rolling window " + std::to_string(window) + " too short for the " +
                                to_string(config.engine) + " design (need at least " +
                                std::to_string(minimum_window(config, K)) + ")");
  }
  if (threads < 1) threads = 1;

  const std::size_t count = static_cast<std::size_t>(T - window + 1);
  struct Slot {
    std::optional<Estimate> estimate;
    std::string skip_reason;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t w = next.fetch_add(1); w < count; w = next.fetch_add(1)) {
      try {
        slots[w].estimate = estimate_connectedness(
            returns.returns.middleRows(static_cast<Eigen::Index>(w), window), returns.labels, config);
      } catch (const DegenerateDataError& e) {
        slots[w].skip_reason = e.what();
      } catch (...) {
        slots[w].error = std::current_exception();
      }
    }
  };
  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), count));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RollingSeries out;
  out.labels = returns.labels;
  out.config = config;
  out.window = window;
  for (std::size_t w = 0; w < count; ++w) {
    Slot& s = slots[w];
    if (s.error) std::rethrow_exception(s.error);
    const Date start = returns.dates[w];
    const Date end = returns.dates[w + static_cast<std::size_t>(window) - 1];
    if (!s.estimate) {
      out.skipped.push_back({w, start, end, s.skip_reason});
      continue;
    }
    out.dates.push_back(end);
    out.indices.push_back(aggregate_indices(s.estimate->table));
    out.lags.push_back(s.estimate->p);
    out.nonconverged_equations += s.estimate->nonconverged_equations;
    out.tables.push_back(std::move(s.estimate->table));
  }
  if (out.tables.empty()) {
    throw DegenerateDataError("every rolling window was degenerate (first reason: " +
                              (out.skipped.empty() ? std::string("none") : out.skipped.front().reason) + ")");
  }
  return out;
}

ConnectednessTable average_dynamic_table(const RollingSeries& rolling) {
  if (rolling.tables.empty()) throw std::invalid_argument("average_dynamic_table: no windows");
  const auto& first = rolling.tables.front();
  ConnectednessTable avg;
  avg.labels = first.labels;
  avg.total = Eigen::MatrixXd::Zero(first.total.rows(), first.total.cols());
  const bool split = first.has_split();
  Eigen::MatrixXd C, L;
  if (split) {
    C = Eigen::MatrixXd::Zero(first.total.rows(), first.total.cols());
    L = C;
  }
  for (const auto& t : rolling.tables) {
    avg.total += t.total;
    if (split) {
      C += *t.contemporaneous;
      L += *t.lagged;
    }
  }
  const double n = static_cast<double>(rolling.tables.size());
  avg.total /= n;
  if (split) {
    avg.contemporaneous = Eigen::MatrixXd(C / n);
    avg.lagged = Eigen::MatrixXd(L / n);
  }
  return avg;
}

SubsampleSpec SubsampleSpec::conflict_default() {
  using namespace std::chrono;
  SubsampleSpec s;
  s.breakpoints = {year{2022} / February / 24, year{2022} / July / 22};
  s.labels = {"pre_conflict", "conflict_to_agreement", "post_agreement"};
  return s;
}

std::vector<ReturnPanel> subsample_split(const ReturnPanel& returns, const SubsampleSpec& spec) {
  if (returns.rows() == 0) throw std::invalid_argument("subsample_split: empty panel");
  if (!spec.labels.empty() && spec.labels.size() != spec.breakpoints.size() + 1) {
    throw std::invalid_argument("subsample_split: need one label per segment");
  }
  for (std::size_t i = 0; i < spec.breakpoints.size(); ++i) {
    const Date b = spec.breakpoints[i];
    if (i > 0 && !(spec.breakpoints[i - 1] < b)) {
      throw std::invalid_argument("subsample_split: breakpoints must be strictly increasing");
    }
    if (!(returns.dates.front() < b) || b > returns.dates.back()) {
      throw std::invalid_argument("subsample_split: breakpoint " + format_date(b) + " outside the sample range " +
                                  format_date(returns.dates.front()) + " .. " + format_date(returns.dates.back()));
    }
  }
  std::vector<ReturnPanel> out;
  std::size_t begin = 0;
  for (std::size_t s = 0; s <= spec.breakpoints.size(); ++s) {
    std::size_t end = returns.rows();
    if (s < spec.breakpoints.size()) {
      end = static_cast<std::size_t>(std::lower_bound(returns.dates.begin(), returns.dates.end(), spec.breakpoints[s]) -
                                     returns.dates.begin());
    }
    if (end <= begin) {
      throw std::invalid_argument("subsample_split: segment " + std::to_string(s + 1) + " is empty");
    }
    out.push_back(returns.slice(begin, end - begin));
    begin = end;
  }
  return out;
}

}  // namespace spill
