#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace spill {

using Date = std::chrono::year_month_day;

/// Parses a calendar date. `format` understands %Y, %m, %d and literal
/// characters; anything left over (e.g. a time of day) is an error.
Date parse_date(std::string_view text, std::string_view format = "%Y-%m-%d");
std::string format_date(Date d);

enum class MissingPolicy { drop_row, forward_fill };

struct IngestSpec {
  std::string date_column;             // empty: first header column
  std::string date_format = "%Y-%m-%d";
  std::vector<std::string> series;     // empty: every non-date column
  MissingPolicy missing = MissingPolicy::drop_row;
  int max_gap = 5;                     // forward-fill only
  char delimiter = ',';
};

/// Aligned T x K price matrix. Dates strictly increasing, prices > 0.
struct PricePanel {
  std::vector<Date> dates;
  std::vector<std::string> labels;
  Eigen::MatrixXd prices;

  std::size_t rows() const { return dates.size(); }
  std::size_t cols() const { return labels.size(); }
};

/// (T-1) x K log returns; row t is the return realised on dates[t].
struct ReturnPanel {
  std::vector<Date> dates;
  std::vector<std::string> labels;
  Eigen::MatrixXd returns;

  std::size_t rows() const { return dates.size(); }
  std::size_t cols() const { return labels.size(); }

  ReturnPanel slice(std::size_t first, std::size_t count) const;
};

PricePanel load_price_panel(std::istream& source, const IngestSpec& spec);
PricePanel load_price_panel(const std::filesystem::path& path, const IngestSpec& spec);

/// Inner-joins several panels on their common dates. Labels must be unique
/// across the inputs.
PricePanel merge_price_panels(const std::vector<PricePanel>& panels);

ReturnPanel compute_log_returns(const PricePanel& panel);

/// Reads a panel whose columns already hold returns (any finite value).
ReturnPanel load_return_panel(std::istream& source, const IngestSpec& spec);
ReturnPanel load_return_panel(const std::filesystem::path& path, const IngestSpec& spec);

/// Row-wise concatenation; dates must stay strictly increasing.
ReturnPanel concatenate(const std::vector<ReturnPanel>& parts);

void write_price_csv(std::ostream& out, const PricePanel& panel, char delimiter = ',');
void write_return_csv(std::ostream& out, const ReturnPanel& panel, char delimiter = ',');

/// Minimal RFC 4180 record splitter (quoted fields, doubled quotes).
std::vector<std::string> split_csv_record(std::string_view line, char delimiter = ',');

}  // namespace spill
