#include "spillover/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include "spillover/error.hpp"

namespace spill {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool is_missing_token(std::string_view s) {
  static const std::set<std::string_view> tokens{"", "NA", "N/A", "#N/A", "NaN", "nan", "null", "NULL", "."};
  return tokens.count(s) > 0;
}

// Parses a run of up to `max_digits` decimal digits starting at `pos`.
bool take_number(std::string_view text, std::size_t& pos, int min_digits, int max_digits, int& value) {
  int digits = 0;
  value = 0;
  while (pos < text.size() && digits < max_digits && text[pos] >= '0' && text[pos] <= '9') {
    value = value * 10 + (text[pos] - '0');
    ++pos;
    ++digits;
  }
  return digits >= min_digits;
}

struct RawTable {
  std::vector<Date> dates;
  std::vector<std::string> labels;
  Eigen::MatrixXd values;  // NaN marks a missing cell
};

RawTable read_table(std::istream& source, const IngestSpec& spec, bool prices) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(source, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!trim(line).empty()) {
      header = split_csv_record(line, spec.delimiter);
      break;
    }
  }
  if (header.empty()) throw ParseError("input has no header row");
  for (auto& h : header) h = std::string(trim(h));

  std::size_t date_col = 0;
  if (!spec.date_column.empty()) {
    auto it = std::find(header.begin(), header.end(), spec.date_column);
    if (it == header.end()) throw ParseError("date column '" + spec.date_column + "' not found in header");
    date_col = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<std::size_t> cols;
  RawTable table;
  if (spec.series.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == date_col) continue;
      cols.push_back(c);
      table.labels.push_back(header[c]);
    }
  } else {
    for (const auto& name : spec.series) {
      auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw ParseError("series '" + name + "' not found in header");
      cols.push_back(static_cast<std::size_t>(it - header.begin()));
      table.labels.push_back(name);
    }
  }
  if (cols.empty()) throw ParseError("input has no series columns");
  {
    std::set<std::string> seen;
    for (const auto& l : table.labels) {
      if (l.empty()) throw ParseError("empty series label in header");
      if (!seen.insert(l).second) throw ParseError("duplicate series label '" + l + "'");
    }
  }

  struct Row {
    Date date;
    std::vector<double> values;
    std::size_t line;
  };
  std::vector<Row> rows;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_record(line, spec.delimiter);
    auto field = [&](std::size_t c) -> std::string_view {
      return c < fields.size() ? trim(fields[c]) : std::string_view{};
    };
    Row row;
    row.line = line_no;
    try {
      row.date = parse_date(field(date_col), spec.date_format);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    row.values.reserve(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      auto cell = field(cols[j]);
      if (is_missing_token(cell)) {
        row.values.push_back(kMissing);
        continue;
      }
      double v = 0.0;
      auto first = cell.data();
      if (!cell.empty() && cell.front() == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line_no) + ": non-numeric value '" + std::string(cell) +
                         "' in column '" + table.labels[j] + "'");
      }
      if (prices && v <= 0.0) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": non-positive price " +
                                    std::string(cell) + " in column '" + table.labels[j] + "'");
      }
      row.values.push_back(v);
    }
    rows.push_back(std::move(row));
  }

  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].date == rows[i - 1].date) {
      throw ParseError("duplicate date " + format_date(rows[i].date) + " (lines " +
                       std::to_string(rows[i - 1].line) + " and " + std::to_string(rows[i].line) + ")");
    }
  }

  table.dates.reserve(rows.size());
  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table.dates.push_back(rows[i].date);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].values[j];
    }
  }
  return table;
}

void forward_fill(RawTable& table, int max_gap) {
  const Eigen::Index T = table.values.rows();
  for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
    Eigen::Index last = -1;
    for (Eigen::Index t = 0; t < T; ++t) {
      double& v = table.values(t, j);
      if (!std::isnan(v)) {
        last = t;
        continue;
      }
      if (last < 0) continue;  // leading gap: nothing to carry forward
      if (t - last > max_gap) {
        throw std::invalid_argument("forward-fill gap exceeded in column '" + table.labels[static_cast<std::size_t>(j)] +
                                    "' at " + format_date(table.dates[static_cast<std::size_t>(t)]) +
                                    " (max gap " + std::to_string(max_gap) + ")");
      }
      v = table.values(last, j);
    }
  }
}

RawTable complete_rows(RawTable table, const IngestSpec& spec) {
  if (spec.missing == MissingPolicy::forward_fill) {
    if (spec.max_gap < 0) throw std::invalid_argument("max_gap must be non-negative");
    forward_fill(table, spec.max_gap);
  }
  std::vector<Eigen::Index> keep;
  for (Eigen::Index t = 0; t < table.values.rows(); ++t) {
    if (!table.values.row(t).array().isNaN().any()) keep.push_back(t);
  }
  if (keep.empty()) throw std::invalid_argument("no date has a value for every selected series");
  RawTable out;
  out.labels = std::move(table.labels);
  out.values.resize(static_cast<Eigen::Index>(keep.size()), table.values.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.dates.push_back(table.dates[static_cast<std::size_t>(keep[i])]);
    out.values.row(static_cast<Eigen::Index>(i)) = table.values.row(keep[i]);
  }
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file " + path.string());
  return in;
}

void write_matrix_csv(std::ostream& out, const std::vector<Date>& dates, const std::vector<std::string>& labels,
                      const Eigen::MatrixXd& values, char delimiter) {
  out << "date";
  for (const auto& l : labels) out << delimiter << l;
  out << '\n';
  char buf[64];
  for (std::size_t t = 0; t < dates.size(); ++t) {
    out << format_date(dates[t]);
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", values(static_cast<Eigen::Index>(t), j));
      out << delimiter << buf;
    }
    out << '\n';
  }
}

}  // namespace

Date parse_date(std::string_view text, std::string_view format) {
  text = trim(text);
  int y = -1, m = -1, d = -1;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < format.size(); ++f) {
    if (format[f] == '%' && f + 1 < format.size()) {
      char spec = format[++f];
      bool ok = true;
      switch (spec) {
        case 'Y': ok = take_number(text, pos, 4, 4, y); break;
        case 'm': ok = take_number(text, pos, 1, 2, m); break;
        case 'd': ok = take_number(text, pos, 1, 2, d); break;
        case '%': ok = pos < text.size() && text[pos++] == '%'; break;
        default: throw std::invalid_argument("unsupported date format directive %" + std::string(1, spec));
      }
      if (!ok) throw ParseError("unparseable date '" + std::string(text) + "'");
    } else if (pos >= text.size() || text[pos++] != format[f]) {
      throw ParseError("unparseable date '" + std::string(text) + "'");
    }
  }
  if (pos != text.size()) throw ParseError("unparseable date '" + std::string(text) + "' (trailing characters)");
  if (y < 0 || m < 0 || d < 0) throw std::invalid_argument("date format must contain %Y, %m and %d");
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) throw ParseError("invalid calendar date '" + std::string(text) + "'");
  return date;
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

std::vector<std::string> split_csv_record(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r' && c != '\n') {
      cur.push_back(c);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

ReturnPanel ReturnPanel::slice(std::size_t first, std::size_t count) const {
  if (first + count > rows()) throw std::out_of_range("return panel slice out of range");
  ReturnPanel out;
  out.labels = labels;
  out.dates.assign(dates.begin() + static_cast<std::ptrdiff_t>(first),
                   dates.begin() + static_cast<std::ptrdiff_t>(first + count));
  out.returns = returns.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
  return out;
}

PricePanel load_price_panel(std::istream& source, const IngestSpec& spec) {
  RawTable table = complete_rows(read_table(source, spec, true), spec);
  return PricePanel{std::move(table.dates), std::move(table.labels), std::move(table.values)};
}

PricePanel load_price_panel(const std::filesystem::path& path, const IngestSpec& spec) {
  auto in = open_input(path);
  return load_price_panel(in, spec);
}

PricePanel merge_price_panels(const std::vector<PricePanel>& panels) {
  if (panels.empty()) throw std::invalid_argument("no panels to merge");
  if (panels.size() == 1) return panels.front();
  std::vector<Date> common = panels.front().dates;
  for (std::size_t i = 1; i < panels.size(); ++i) {
    std::vector<Date> next;
    std::set_intersection(common.begin(), common.end(), panels[i].dates.begin(), panels[i].dates.end(),
                          std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty()) throw std::invalid_argument("input tables share no common dates");

  PricePanel out;
  out.dates = common;
  std::set<std::string> seen;
  Eigen::Index total_cols = 0;
  for (const auto& p : panels) {
    for (const auto& l : p.labels) {
      if (!seen.insert(l).second) throw std::invalid_argument("duplicate series label '" + l + "' across inputs");
      out.labels.push_back(l);
    }
    total_cols += static_cast<Eigen::Index>(p.cols());
  }
  out.prices.resize(static_cast<Eigen::Index>(common.size()), total_cols);
  Eigen::Index col = 0;
  for (const auto& p : panels) {
    std::size_t src = 0;
    for (std::size_t t = 0; t < common.size(); ++t) {
      while (p.dates[src] != common[t]) ++src;
      out.prices.block(static_cast<Eigen::Index>(t), col, 1, static_cast<Eigen::Index>(p.cols())) =
          p.prices.row(static_cast<Eigen::Index>(src));
    }
    col += static_cast<Eigen::Index>(p.cols());
  }
  return out;
}

ReturnPanel compute_log_returns(const PricePanel& panel) {
  if (panel.rows() < 2) throw std::invalid_argument("log returns need at least two price rows");
  if ((panel.prices.array() <= 0.0).any()) throw std::invalid_argument("prices must be strictly positive");
  const Eigen::Index T = panel.prices.rows();
  Eigen::MatrixXd logs = panel.prices.array().log().matrix();
  ReturnPanel out;
  out.labels = panel.labels;
  out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
  out.returns = logs.bottomRows(T - 1) - logs.topRows(T - 1);
  if (!out.returns.allFinite()) throw std::invalid_argument("non-finite log return");
  return out;
}

ReturnPanel load_return_panel(std::istream& source, const IngestSpec& spec) {
  RawTable table = complete_rows(read_table(source, spec, false), spec);
  return ReturnPanel{std::move(table.dates), std::move(table.labels), std::move(table.values)};
}

ReturnPanel load_return_panel(const std::filesystem::path& path, const IngestSpec& spec) {
  auto in = open_input(path);
  return load_return_panel(in, spec);
}

ReturnPanel concatenate(const std::vector<ReturnPanel>& parts) {
  if (parts.empty()) throw std::invalid_argument("nothing to concatenate");
  ReturnPanel out;
  out.labels = parts.front().labels;
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    if (p.labels != out.labels) throw std::invalid_argument("cannot concatenate panels with different labels");
    rows += static_cast<Eigen::Index>(p.rows());
  }
  out.returns.resize(rows, static_cast<Eigen::Index>(out.labels.size()));
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    if (!out.dates.empty() && !p.dates.empty() && !(out.dates.back() < p.dates.front())) {
      throw std::invalid_argument("concatenated dates must be strictly increasing");
    }
    out.dates.insert(out.dates.end(), p.dates.begin(), p.dates.end());
    out.returns.middleRows(at, static_cast<Eigen::Index>(p.rows())) = p.returns;
    at += static_cast<Eigen::Index>(p.rows());
  }
  return out;
}

void write_price_csv(std::ostream& out, const PricePanel& panel, char delimiter) {
  write_matrix_csv(out, panel.dates, panel.labels, panel.prices, delimiter);
}

void write_return_csv(std::ostream& out, const ReturnPanel& panel, char delimiter) {
  write_matrix_csv(out, panel.dates, panel.labels, panel.returns, delimiter);
}

}  // namespace spill
