#include "spillover/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "spillover/dynamics.hpp"
#include "spillover/error.hpp"
#include "spillover/estimators.hpp"
#include "spillover/fevdconn.hpp"
#include "spillover/netgraph.hpp"
#include "spillover/panel.hpp"
#include "spillover/r2conn.hpp"
#include "spillover/report.hpp"
#include "spillover/simulate.hpp"
#include "spillover/stats.hpp"

namespace spill::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::string input_kind = "prices";
  std::string date_col;
  std::string date_format = "%Y-%m-%d";
  std::vector<std::string> series;
  std::string missing = "drop";
  int max_gap = 5;
  std::string delimiter = ",";
  std::string out_dir;
  std::string config_file;

  std::string engine = "r2";
  std::string corr = "pearson";
  int p = 1;
  bool select_lag = false;
  int p_max = 4;
  int window = 200;
  bool window_set = false;
  int horizon = 10;
  double tau = 0.5;
  double threshold = 0.2;
  std::string split = "all";
  std::string format = "json";
  std::vector<std::string> breakpoints;
  std::vector<std::string> segment_labels;
  double level = 0.10;
  int adf_lags = -1;
  int threads = 1;
  bool raw = false;
  int precision = -1;

  // simulate
  int sim_k = 4;
  int sim_t = 600;
  std::vector<std::string> couplings;
  double own_lag = 0.0;
  double rho = 0.0;
  double sim_scale = 0.01;
  int burn_in = 200;
  std::string sim_spec;
  std::uint64_t seed = 1;

  double scale() const { return raw ? 1.0 : 100.0; }
};

Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  if (c.command == "simulate") {
    j["k"] = c.sim_k;
    j["t"] = c.sim_t;
    j["coupling"] = c.couplings;
    j["own-lag"] = c.own_lag;
    j["rho"] = c.rho;
    j["scale"] = c.sim_scale;
    j["burn-in"] = c.burn_in;
    j["spec"] = c.sim_spec;
    j["seed"] = c.seed;
    j["out"] = c.out_dir;
    return j;
  }
  j["input"] = c.inputs;
  j["input-kind"] = c.input_kind;
  j["date-col"] = c.date_col;
  j["date-format"] = c.date_format;
  j["series"] = c.series;
  j["missing"] = c.missing;
  j["max-gap"] = c.max_gap;
  j["delimiter"] = c.delimiter;
  j["out"] = c.out_dir;
  j["threads"] = c.threads;
  j["raw"] = c.raw;
  j["precision"] = c.precision;
  if (c.command == "stats") {
    j["adf-lags"] = c.adf_lags;
  } else if (c.command == "corr") {
    j["method"] = c.corr;
    j["level"] = c.level;
  } else if (c.command == "split") {
    j["breakpoints"] = c.breakpoints;
    j["labels"] = c.segment_labels;
  } else {
    j["engine"] = c.engine;
    j["corr"] = c.corr;
    j["p"] = c.p;
    j["select-lag"] = c.select_lag;
    j["p-max"] = c.p_max;
    j["horizon"] = c.horizon;
    j["tau"] = c.tau;
    if (c.command == "rolling" || c.window_set) {
      j["window"] = c.window;
    } else {
      j["window"] = nullptr;
    }
    if (c.command == "network") {
      j["threshold"] = c.threshold;
      j["split"] = c.split;
      j["format"] = c.format;
      j["breakpoints"] = c.breakpoints;
    }
  }
  return j;
}

// Values from --config are appended as flags unless the flag was given
// explicitly, so flags win over the file and the file wins over defaults.
std::vector<std::string> merge_config_file(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config file " + path + " must hold a JSON object");
  auto given = [&](const std::string& flag) {
    for (const auto& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  auto scalar = [](const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string flag = "--" + it.key();
    if (it.key() == "command" || it.key() == "config" || given(flag)) continue;
    const auto& v = it.value();
    if (v.is_null()) continue;
    if (v.is_boolean()) {
      if (v.get<bool>()) args.push_back(flag);
    } else if (v.is_array()) {
      for (const auto& e : v) {
        args.push_back(flag);
        args.push_back(scalar(e));
      }
    } else {
      args.push_back(flag);
      args.push_back(scalar(v));
    }
  }
  return args;
}

IngestSpec ingest_spec(const RunConfig& c) {
  IngestSpec s;
  s.date_column = c.date_col;
  s.date_format = c.date_format;
  s.series = c.series;
  s.missing = c.missing == "ffill" ? MissingPolicy::forward_fill : MissingPolicy::drop_row;
  s.max_gap = c.max_gap;
  if (c.delimiter == "tab" || c.delimiter == "\\t") {
    s.delimiter = '\t';
  } else if (c.delimiter.size() == 1) {
    s.delimiter = c.delimiter.front();
  } else {
    throw std::invalid_argument("delimiter must be a single character or 'tab'");
  }
  return s;
}

ReturnPanel load_returns(const RunConfig& c) {
  const IngestSpec spec = ingest_spec(c);
  if (c.input_kind == "returns") {
    if (c.inputs.size() != 1) throw std::invalid_argument("--input-kind returns takes exactly one input");
    return load_return_panel(fs::path(c.inputs.front()), spec);
  }
  std::vector<PricePanel> panels;
  for (const auto& path : c.inputs) panels.push_back(load_price_panel(fs::path(path), spec));
  return compute_log_returns(merge_price_panels(panels));
}

EngineConfig engine_config(const RunConfig& c) {
  EngineConfig e;
  e.engine = engine_from_string(c.engine);
  e.corr = corr_method_from_string(c.corr);
  e.p = c.p;
  e.reselect_lag = c.select_lag;
  e.p_max = c.p_max;
  e.horizon = c.horizon;
  e.tau = c.tau;
  e.scale = c.scale();
  return e;
}

std::vector<Date> parse_dates(const std::vector<std::string>& texts) {
  std::vector<Date> out;
  for (const auto& t : texts) out.push_back(parse_date(t));
  return out;
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (char ch : s) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_' ||
                    ch == '-' || ch == '.';
    out.push_back(ok ? ch : '_');
  }
  if (out.empty() || out.front() == '.') out.insert(out.begin(), '_');
  return out;
}

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : root_(dir) {
    if (dir.empty()) throw std::invalid_argument("--out is required");
    fs::create_directories(root_);
  }

  std::ofstream open(const std::string& name) {
    const fs::path path = root_ / safe_name(name);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    written_.push_back(path.filename().string());
    return f;
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  fs::path root_;
  std::vector<std::string> written_;
};

Json skipped_json(const std::vector<SkippedWindow>& skipped) {
  Json arr = Json::array();
  for (const auto& s : skipped) {
    arr.push_back({{"window", s.index}, {"start", format_date(s.start)}, {"end", format_date(s.end)}, {"reason", s.reason}});
  }
  return arr;
}

struct Outcome {
  Json extra = Json::object();
};

int table_precision(const RunConfig& c) { return c.precision >= 0 ? c.precision : (c.raw ? 6 : 2); }

// Static table, or the average of the rolling tables when --window is given.
ConnectednessTable headline_table(const RunConfig& c, const ReturnPanel& returns, Outcome& outcome) {
  const EngineConfig engine = engine_config(c);
  if (c.window_set) {
    RollingSeries rolling = rolling_connectedness(returns, c.window, engine, c.threads);
    outcome.extra["windows"] = rolling.size();
    outcome.extra["skipped_windows"] = skipped_json(rolling.skipped);
    if (engine.engine == Engine::qvar) outcome.extra["nonconverged_equations"] = rolling.nonconverged_equations;
    return average_dynamic_table(rolling);
  }
  Estimate est = estimate_connectedness(returns.returns, returns.labels, engine);
  outcome.extra["p"] = est.p;
  if (engine.engine == Engine::qvar) outcome.extra["nonconverged_equations"] = est.nonconverged_equations;
  return est.table;
}

void run_stats(const RunConfig& c, OutputDir& dir, Outcome&) {
  ReturnPanel returns = load_returns(c);
  AdfSpec adf;
  if (c.adf_lags >= 0) {
    adf.lag_rule = AdfLagRule::fixed;
    adf.lags = c.adf_lags;
  }
  auto rows = describe(returns, adf);
  auto f = dir.open("stats.csv");
  write_stats_csv(f, rows);
}

void run_corr(const RunConfig& c, OutputDir& dir, Outcome& outcome) {
  ReturnPanel returns = load_returns(c);
  std::vector<CorrMethod> methods;
  if (c.corr == "all") {
    methods = {CorrMethod::pearson, CorrMethod::spearman, CorrMethod::kendall};
  } else {
    methods = {corr_method_from_string(c.corr)};
  }
  Json repairs = Json::object();
  for (CorrMethod m : methods) {
    CorrelationMatrix corr = correlation_matrix(returns, m);
    auto f = dir.open("corr_" + to_string(m) + ".csv");
    write_correlation_csv(f, significance_mask(corr, c.level), c.precision >= 0 ? c.precision : 4);
    auto fp = dir.open("corr_" + to_string(m) + "_pvalues.csv");
    write_matrix_csv(fp, corr.labels, corr.pvalues);
    repairs[to_string(m)] = {{"min_eigenvalue", min_eigenvalue(corr.values)}};
  }
  outcome.extra["spectra"] = repairs;
}

void run_connect(const RunConfig& c, OutputDir& dir, Outcome& outcome) {
  ReturnPanel returns = load_returns(c);
  ConnectednessTable table = headline_table(c, returns, outcome);
  auto f = dir.open("table_" + c.engine + ".csv");
  write_appendix_table(f, table, aggregate_indices(table), table_precision(c));
}

void run_rolling(const RunConfig& c, OutputDir& dir, Outcome& outcome) {
  ReturnPanel returns = load_returns(c);
  RollingSeries rolling = rolling_connectedness(returns, c.window, engine_config(c), c.threads);
  auto f = dir.open("rolling_" + c.engine + ".csv");
  write_rolling_long(f, rolling);
  outcome.extra["windows"] = rolling.size();
  outcome.extra["skipped_windows"] = skipped_json(rolling.skipped);
  if (rolling.config.engine == Engine::qvar) outcome.extra["nonconverged_equations"] = rolling.nonconverged_equations;
  Json markers = Json::array();
  for (const auto& m : default_event_markers()) markers.push_back({{"date", format_date(m.date)}, {"label", m.label}});
  outcome.extra["event_markers"] = markers;
}

SubsampleSpec subsample_spec(const RunConfig& c) {
  if (c.breakpoints.empty()) return SubsampleSpec::conflict_default();
  SubsampleSpec s;
  s.breakpoints = parse_dates(c.breakpoints);
  s.labels = c.segment_labels;
  return s;
}

std::vector<std::string> segment_names(const SubsampleSpec& s) {
  if (!s.labels.empty()) return s.labels;
  std::vector<std::string> names;
  for (std::size_t i = 0; i <= s.breakpoints.size(); ++i) names.push_back("segment" + std::to_string(i + 1));
  return names;
}

void run_split(const RunConfig& c, OutputDir& dir, Outcome& outcome) {
  ReturnPanel returns = load_returns(c);
  SubsampleSpec spec = subsample_spec(c);
  auto parts = subsample_split(returns, spec);
  auto names = segment_names(spec);
  Json segs = Json::array();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto f = dir.open("segment_" + names[i] + ".csv");
    write_return_csv(f, parts[i]);
    segs.push_back({{"label", names[i]},
                    {"first", format_date(parts[i].dates.front())},
                    {"last", format_date(parts[i].dates.back())},
                    {"rows", parts[i].rows()}});
  }
  outcome.extra["segments"] = segs;
}

void write_networks(const RunConfig& c, const ConnectednessTable& table, const std::string& prefix, OutputDir& dir) {
  const GraphFormat format = graph_format_from_string(c.format);
  for (const auto& g : build_networks(table, c.threshold)) {
    if (c.split != "all" && to_string(g.split) != c.split) continue;
    auto f = dir.open(prefix + to_string(g.split) + "." + to_string(format));
    f << export_graph(g, format);
  }
}

void run_network(const RunConfig& c, OutputDir& dir, Outcome& outcome) {
  if (c.split != "all") split_from_string(c.split);
  ReturnPanel returns = load_returns(c);
  ConnectednessTable table = headline_table(c, returns, outcome);
  if (c.split != "all" && c.split != "overall" && !table.has_split()) {
    throw std::invalid_argument("engine " + c.engine + " has no contemporaneous/lagged split");
  }
  write_networks(c, table, "network_", dir);
  if (!c.breakpoints.empty()) {
    SubsampleSpec spec = subsample_spec(c);
    auto parts = subsample_split(returns, spec);
    auto names = segment_names(spec);
    Json segs = Json::array();
    for (std::size_t i = 0; i < parts.size(); ++i) {
      Outcome seg;
      ConnectednessTable t = headline_table(c, parts[i], seg);
      write_networks(c, t, "network_" + names[i] + "_", dir);
      seg.extra["label"] = names[i];
      segs.push_back(seg.extra);
    }
    outcome.extra["segments"] = segs;
  }
}

void run_simulate(const RunConfig& c, OutputDir& dir, Outcome& outcome) {
  SimulationSpec spec = SimulationSpec::independent(c.sim_k, c.sim_t, c.seed);
  spec.phi.diagonal().setConstant(c.own_lag);
  for (int i = 0; i < c.sim_k; ++i) {
    for (int j = 0; j < c.sim_k; ++j) {
      if (i != j) spec.sigma(i, j) = c.rho;
    }
  }
  spec.scale = c.sim_scale;
  spec.burn_in = c.burn_in;
  for (const auto& text : c.couplings) {
    int source = 0, target = 0;
    double coef = 0.0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%d:%d:%lf%c", &source, &target, &coef, &extra) != 3 || source < 1 ||
        target < 1 || source > c.sim_k || target > c.sim_k) {
      throw std::invalid_argument("bad --coupling '" + text + "' (expected source:target:coefficient, 1-based)");
    }
    spec.phi(target - 1, source - 1) = coef;
  }
  if (!c.sim_spec.empty()) {
    std::ifstream in(c.sim_spec);
    if (!in) throw std::runtime_error("cannot open simulation spec " + c.sim_spec);
    nlohmann::json j;
    in >> j;
    if (j.contains("labels")) spec.labels = j["labels"].get<std::vector<std::string>>();
    const Eigen::Index K = static_cast<Eigen::Index>(spec.labels.size());
    auto matrix = [&](const nlohmann::json& m) {
      Eigen::MatrixXd out(K, K);
      if (m.size() != static_cast<std::size_t>(K)) throw std::invalid_argument("simulation spec: matrix must be K x K");
      for (Eigen::Index i = 0; i < K; ++i) {
        if (m[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(K)) {
          throw std::invalid_argument("simulation spec: matrix must be K x K");
        }
        for (Eigen::Index k = 0; k < K; ++k) out(i, k) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
      }
      return out;
    };
    spec.phi = j.contains("phi") ? matrix(j["phi"]) : Eigen::MatrixXd::Zero(K, K);
    spec.sigma = j.contains("sigma") ? matrix(j["sigma"]) : Eigen::MatrixXd::Identity(K, K);
    if (j.contains("factor")) {
      for (const auto& r : j["factor"]) spec.factor.push_back({r.at("rows").get<int>(), r.at("loading").get<double>()});
    }
    if (j.contains("periods")) spec.periods = j["periods"].get<int>();
    if (j.contains("scale")) spec.scale = j["scale"].get<double>();
    if (j.contains("burn_in")) spec.burn_in = j["burn_in"].get<int>();
  }
  PricePanel prices = simulate_prices(spec);
  auto f = dir.open("simulated_prices.csv");
  write_price_csv(f, prices);

  Json structure = Json::array();
  for (Eigen::Index i = 0; i < spec.phi.rows(); ++i) {
    for (Eigen::Index j = 0; j < spec.phi.cols(); ++j) {
      if (i != j && spec.phi(i, j) != 0.0) {
        structure.push_back({{"source", spec.labels[static_cast<std::size_t>(j)]},
                             {"target", spec.labels[static_cast<std::size_t>(i)]},
                             {"coefficient", spec.phi(i, j)}});
      }
    }
  }
  outcome.extra["planted_lagged_links"] = structure;
  outcome.extra["spectral_radius"] = companion_spectral_radius({spec.phi});
}

void add_ingest_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--input,-i", c.inputs, "Input CSV (repeat to join several tables on common dates)")->required();
  sub->add_option("--input-kind", c.input_kind, "Whether the input holds prices or returns")
      ->check(CLI::IsMember({"prices", "returns"}));
  sub->add_option("--date-col", c.date_col, "Date column name (default: first column)");
  sub->add_option("--date-format", c.date_format, "Date format using %Y, %m, %d");
  sub->add_option("--series", c.series, "Series to keep (comma separated)")->delimiter(',');
  sub->add_option("--missing", c.missing, "Missing-value policy")->check(CLI::IsMember({"drop", "ffill"}));
  sub->add_option("--max-gap", c.max_gap, "Longest forward-filled run")->check(CLI::NonNegativeNumber);
  sub->add_option("--delimiter", c.delimiter, "Field delimiter (single character or 'tab')");
  sub->add_option("--out,-o", c.out_dir, "Output directory")->required();
  sub->add_option("--config", c.config_file, "JSON file of option values (flags take precedence)");
  sub->add_option("--threads", c.threads, "Worker threads for rolling windows")->check(CLI::PositiveNumber);
  sub->add_flag("--raw", c.raw, "Report raw shares instead of percent");
  sub->add_option("--precision", c.precision, "Decimals in tables")->check(CLI::NonNegativeNumber);
}

void add_engine_options(CLI::App* sub, RunConfig& c, const char* engine_flag) {
  sub->add_option(engine_flag, c.engine, "Connectedness engine")->check(CLI::IsMember({"r2", "dy", "qvar"}));
  sub->add_option("--corr", c.corr, "Correlation for the R^2 engine")
      ->check(CLI::IsMember({"pearson", "spearman", "kendall"}));
  sub->add_option("--p", c.p, "VAR lag order")->check(CLI::PositiveNumber);
  sub->add_flag("--select-lag", c.select_lag, "Choose the lag order by BIC (per window when rolling)");
  sub->add_option("--p-max", c.p_max, "Largest lag considered by --select-lag")->check(CLI::PositiveNumber);
  sub->add_option("--horizon", c.horizon, "Forecast horizon for dy/qvar")->check(CLI::PositiveNumber);
  sub->add_option("--tau", c.tau, "Quantile for qvar")->check(CLI::Range(0.0, 1.0));
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Connectedness analytics for return panels", "spillover"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto* stats = app.add_subcommand("stats", "Descriptive statistics, Jarque-Bera and ADF tests");
  add_ingest_options(stats, c);
  stats->add_option("--adf-lags", c.adf_lags, "Fixed ADF lag count (default: pruned Schwert rule)");

  auto* corr = app.add_subcommand("corr", "Correlation matrices with significance masking");
  add_ingest_options(corr, c);
  corr->add_option("--method", c.corr, "Correlation method")
      ->check(CLI::IsMember({"pearson", "spearman", "kendall", "all"}));
  corr->add_option("--level", c.level, "Masking significance level")->check(CLI::Range(0.0, 1.0));

  auto* connect = app.add_subcommand("connect", "Connectedness table (static, or averaged over rolling windows)");
  add_ingest_options(connect, c);
  add_engine_options(connect, c, "--method");
  auto* connect_window = connect->add_option("--window", c.window, "Average tables over rolling windows of this length")
                             ->check(CLI::PositiveNumber);

  auto* rolling = app.add_subcommand("rolling", "Rolling-window dynamic connectedness (long CSV)");
  add_ingest_options(rolling, c);
  add_engine_options(rolling, c, "--engine");
  rolling->add_option("--window", c.window, "Window length in return observations")->check(CLI::PositiveNumber);

  auto* split = app.add_subcommand("split", "Split the return panel into date-delimited subsamples");
  add_ingest_options(split, c);
  split->add_option("--breakpoints", c.breakpoints, "Segment start dates (YYYY-MM-DD, comma separated)")->delimiter(',');
  split->add_option("--labels", c.segment_labels, "Segment names")->delimiter(',');

  auto* network = app.add_subcommand("network", "Threshold-filtered net pairwise spillover networks");
  add_ingest_options(network, c);
  add_engine_options(network, c, "--method");
  auto* network_window = network->add_option("--window", c.window, "Average tables over rolling windows of this length")
                             ->check(CLI::PositiveNumber);
  network->add_option("--threshold", c.threshold, "Minimum NPDC for an edge")->check(CLI::NonNegativeNumber);
  network->add_option("--split", c.split, "Which split to export")
      ->check(CLI::IsMember({"overall", "contemporaneous", "lagged", "all"}));
  network->add_option("--format", c.format, "Graph format")->check(CLI::IsMember({"json", "dot", "graphml"}));
  network->add_option("--breakpoints", c.breakpoints, "Also build one network per subsample")->delimiter(',');

  auto* simulate = app.add_subcommand("simulate", "Write a synthetic price panel from a planted VAR(1)");
  simulate->add_option("--k", c.sim_k, "Number of series")->check(CLI::PositiveNumber);
  simulate->add_option("--t", c.sim_t, "Number of returns")->check(CLI::PositiveNumber);
  simulate->add_option("--coupling", c.couplings, "source:target:coefficient (1-based), repeatable");
  simulate->add_option("--own-lag", c.own_lag, "Own-lag coefficient for every series");
  simulate->add_option("--rho", c.rho, "Equicorrelation of the shocks");
  simulate->add_option("--scale", c.sim_scale, "Return scale")->check(CLI::PositiveNumber);
  simulate->add_option("--burn-in", c.burn_in, "Discarded warm-up periods")->check(CLI::NonNegativeNumber);
  simulate->add_option("--spec", c.sim_spec, "JSON spec (labels, phi, sigma, factor, periods, scale)");
  simulate->add_option("--seed", c.seed, "Random seed");
  simulate->add_option("--out,-o", c.out_dir, "Output directory")->required();
  simulate->add_option("--config", c.config_file, "JSON file of option values (flags take precedence)");

  std::vector<std::string> args;
  try {
    args = merge_config_file(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  c.command = sub->get_name();
  c.window_set = (sub == connect && connect_window->count() > 0) || (sub == network && network_window->count() > 0);

  const auto started = std::chrono::steady_clock::now();
  try {
    OutputDir dir(c.out_dir);
    Outcome outcome;
    if (sub == stats) run_stats(c, dir, outcome);
    else if (sub == corr) run_corr(c, dir, outcome);
    else if (sub == connect) run_connect(c, dir, outcome);
    else if (sub == rolling) run_rolling(c, dir, outcome);
    else if (sub == split) run_split(c, dir, outcome);
    else if (sub == network) run_network(c, dir, outcome);
    else if (sub == simulate) run_simulate(c, dir, outcome);

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    Json manifest;
    manifest["tool"] = "spillover";
    manifest["version"] = kVersion;
    manifest["argv"] = raw_args;
    manifest["config"] = to_json(c);
    manifest["outputs"] = dir.written();
    for (auto it = outcome.extra.begin(); it != outcome.extra.end(); ++it) manifest[it.key()] = it.value();
    manifest["timing_seconds"] = seconds;
    auto f = dir.open("manifest.json");
    f << manifest.dump(2) << '\n';
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (auto& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    err << "error: " << c.command << ": " << msg << '\n';
    return 1;
  }
  return 0;
}

int run(const std::vector<std::string>& args) { return run(args, std::cout, std::cerr); }

}  // namespace spill::cli
