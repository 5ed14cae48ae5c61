#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spillover/dynamics.hpp"
#include "spillover/r2conn.hpp"
#include "spillover/stats.hpp"

namespace spill {

/// Appendix-style table: one row of cell totals per receiver followed by a
/// row of "(contemporaneous, lagged)" pairs, then TO, Inc.Own and NET rows.
/// The last column carries FROM, sum(TO), the TCI label and the TCI values.
/// Tables without a split leave the pair fields empty.
void write_appendix_table(std::ostream& out, const ConnectednessTable& table, const SpilloverIndices& indices,
                          int precision = 2);

struct AppendixTable {
  ConnectednessTable table;    // cells as printed
  SpilloverIndices published;  // margins as printed
};

AppendixTable parse_appendix_table(std::istream& in);

/// Long format: date,measure,series,value,split. NPDC rows are written once
/// per unordered pair as "a->b" with a before b in label order of the panel.
void write_rolling_long(std::ostream& out, const RollingSeries& rolling, int significant_digits = 12);

void write_stats_csv(std::ostream& out, const std::vector<DescriptiveRow>& rows);

/// Masked correlation matrix; entries that are not significant are blank.
void write_correlation_csv(std::ostream& out, const MaskedMatrix& masked, int precision = 4);
void write_matrix_csv(std::ostream& out, const std::vector<std::string>& labels, const Eigen::MatrixXd& values,
                      int significant_digits = 12);

}  // namespace spill
