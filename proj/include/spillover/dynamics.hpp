#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spillover/panel.hpp"
#include "spillover/r2conn.hpp"
#include "spillover/stats.hpp"

namespace spill {

enum class Engine { r2, dy, qvar };

std::string to_string(Engine e);
Engine engine_from_string(const std::string& s);

struct EngineConfig {
  Engine engine = Engine::r2;
  CorrMethod corr = CorrMethod::pearson;  // r2 engine
  int p = 1;
  bool reselect_lag = false;  // re-run BIC lag choice in every window
  int p_max = 4;
  int horizon = 10;  // dy / qvar
  double tau = 0.5;  // qvar
  double scale = 100.0;
};

struct Estimate {
  ConnectednessTable table;
  int p = 1;
  int nonconverged_equations = 0;
};

/// One engine run on a block of returns.
Estimate estimate_connectedness(const Eigen::MatrixXd& returns, const std::vector<std::string>& labels,
                                const EngineConfig& config);

struct SkippedWindow {
  std::size_t index = 0;  // window position, 0-based
  Date start;
  Date end;
  std::string reason;
};

struct EventMarker {
  Date date;
  std::string label;
};

/// Conflict outbreak and the shortening of the grain-corridor extension period.
std::vector<EventMarker> default_event_markers();

struct RollingSeries {
  std::vector<std::string> labels;
  EngineConfig config;
  int window = 0;
  std::vector<Date> dates;  // window end dates of completed windows
  std::vector<ConnectednessTable> tables;
  std::vector<SpilloverIndices> indices;
  std::vector<int> lags;
  std::vector<SkippedWindow> skipped;
  int nonconverged_equations = 0;

  std::size_t size() const { return dates.size(); }
  Eigen::VectorXd tci() const;
};

/// Runs the engine on every block of `window` consecutive returns. Windows
/// are spread over `threads` workers; results are collected in window order,
/// so the output does not depend on the worker count.
RollingSeries rolling_connectedness(const ReturnPanel& returns, int window, const EngineConfig& config,
                                    int threads = 1);

/// Element-wise mean of the per-window tables.
ConnectednessTable average_dynamic_table(const RollingSeries& rolling);

struct SubsampleSpec {
  std::vector<Date> breakpoints;   // each starts a new segment
  std::vector<std::string> labels; // breakpoints.size() + 1 names, optional

  /// 2022-02-24 (conflict outbreak) and 2022-07-22 (corridor agreement).
  static SubsampleSpec conflict_default();
};

/// Segment s holds dates in [breakpoints[s-1], breakpoints[s]).
std::vector<ReturnPanel> subsample_split(const ReturnPanel& returns, const SubsampleSpec& spec);

}  // namespace spill
