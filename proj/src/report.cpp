#include "spillover/report.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <regex>
#include <stdexcept>

#include "spillover/error.hpp"
#include "spillover/netgraph.hpp"

namespace spill {

namespace {

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string general(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string pair(double a, double b, int precision) {
  return "\"(" + fixed(a, precision) + ", " + fixed(b, precision) + ")\"";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

void write_appendix_table(std::ostream& out, const ConnectednessTable& table, const SpilloverIndices& s,
                          int precision) {
  const Eigen::Index K = static_cast<Eigen::Index>(table.size());
  const bool split = table.has_split() && s.has_split;
  out << "";
  for (const auto& l : table.labels) out << ',' << csv_field(l);
  out << ",FROM\n";
  for (Eigen::Index i = 0; i < K; ++i) {
    out << csv_field(table.labels[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < K; ++j) out << ',' << fixed(table.total(i, j), precision);
    out << ',' << fixed(s.from(i), precision) << '\n';
    for (Eigen::Index j = 0; j < K; ++j) {
      out << ',';
      if (split) out << pair((*table.contemporaneous)(i, j), (*table.lagged)(i, j), precision);
    }
    out << ',';
    if (split) out << pair(s.from_c(i), s.from_l(i), precision);
    out << '\n';
  }
  auto margin = [&](const char* name, const Eigen::VectorXd& v, const Eigen::VectorXd& vc, const Eigen::VectorXd& vl,
                    const std::string& last, const std::string& last_pair) {
    out << name;
    for (Eigen::Index j = 0; j < K; ++j) out << ',' << fixed(v(j), precision);
    out << ',' << last << '\n';
    for (Eigen::Index j = 0; j < K; ++j) {
      out << ',';
      if (split) out << pair(vc(j), vl(j), precision);
    }
    out << ',' << last_pair << '\n';
  };
  margin("TO", s.to, s.to_c, s.to_l, fixed(s.to.sum(), precision),
         split ? pair(s.to_c.sum(), s.to_l.sum(), precision) : "");
  margin("Inc.Own", s.inc_own, s.inc_own_c, s.inc_own_l, "TCI", split ? "\"(TCI_C, TCI_L)\"" : "");
  margin("NET", s.net, s.net_c, s.net_l, fixed(s.tci, precision), split ? pair(s.tci_c, s.tci_l, precision) : "");
}

namespace {

double parse_number(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("bad number '" + s + "'");
  }
}

bool parse_pair(const std::string& s, double& a, double& b) {
  static const std::regex re(R"(\s*\(\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*\)\s*)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) return false;
  a = parse_number(m[1].str());
  b = parse_number(m[2].str());
  return true;
}

std::string trimmed(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.pop_back();
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  return s;
}

}  // namespace

AppendixTable parse_appendix_table(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trimmed(line).empty()) continue;
    auto fields = split_csv_record(line, ',');
    for (auto& f : fields) f = trimmed(f);
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw ParseError("appendix table: empty input");
  const auto& header = rows.front();
  if (header.size() < 3 || header.back() != "FROM") throw ParseError("appendix table: header must end with FROM");
  const std::size_t K = header.size() - 2;
  if (rows.size() != 1 + 2 * K + 6) {
    throw ParseError("appendix table: expected " + std::to_string(1 + 2 * K + 6) + " rows, found " +
                     std::to_string(rows.size()));
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != K + 2) throw ParseError("appendix table: row " + std::to_string(r) + " has wrong width");
  }

  AppendixTable out;
  auto& t = out.table;
  auto& s = out.published;
  const Eigen::Index k = static_cast<Eigen::Index>(K);
  t.labels.assign(header.begin() + 1, header.end() - 1);
  t.total.resize(k, k);
  Eigen::MatrixXd C(k, k), L(k, k);
  s.from.resize(k);
  s.from_c.resize(k);
  s.from_l.resize(k);
  bool split = !rows[2][1].empty();

  auto read_pair = [&](const std::string& field, double& a, double& b) {
    if (!parse_pair(field, a, b)) throw ParseError("appendix table: bad pair '" + field + "'");
  };
  for (std::size_t i = 0; i < K; ++i) {
    const auto& cells = rows[1 + 2 * i];
    const auto& pairs = rows[2 + 2 * i];
    if (cells[0] != t.labels[i]) throw ParseError("appendix table: row label '" + cells[0] + "' out of order");
    const Eigen::Index ii = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < K; ++j) {
      const Eigen::Index jj = static_cast<Eigen::Index>(j);
      t.total(ii, jj) = parse_number(cells[1 + j]);
      if (split) read_pair(pairs[1 + j], C(ii, jj), L(ii, jj));
    }
    s.from(ii) = parse_number(cells[K + 1]);
    if (split) read_pair(pairs[K + 1], s.from_c(ii), s.from_l(ii));
  }

  auto read_margin = [&](std::size_t row, const char* name, Eigen::VectorXd& v, Eigen::VectorXd& vc,
                         Eigen::VectorXd& vl) {
    const auto& cells = rows[row];
    if (cells[0] != name) throw ParseError(std::string("appendix table: expected ") + name + " row");
    v.resize(k);
    vc.resize(k);
    vl.resize(k);
    for (std::size_t j = 0; j < K; ++j) {
      v(static_cast<Eigen::Index>(j)) = parse_number(cells[1 + j]);
      if (split) read_pair(rows[row + 1][1 + j], vc(static_cast<Eigen::Index>(j)), vl(static_cast<Eigen::Index>(j)));
    }
  };
  const std::size_t base = 1 + 2 * K;
  read_margin(base, "TO", s.to, s.to_c, s.to_l);
  read_margin(base + 2, "Inc.Own", s.inc_own, s.inc_own_c, s.inc_own_l);
  read_margin(base + 4, "NET", s.net, s.net_c, s.net_l);
  s.tci = parse_number(rows[base + 4][K + 1]);
  if (split) read_pair(rows[base + 5][K + 1], s.tci_c, s.tci_l);
  s.has_split = split;
  if (split) {
    t.contemporaneous = std::move(C);
    t.lagged = std::move(L);
  }
  return out;
}

void write_rolling_long(std::ostream& out, const RollingSeries& rolling, int digits) {
  out << "date,measure,series,value,split\n";
  const std::size_t K = rolling.labels.size();
  for (std::size_t w = 0; w < rolling.size(); ++w) {
    const std::string date = format_date(rolling.dates[w]);
    const auto& s = rolling.indices[w];
    const auto& table = rolling.tables[w];
    auto row = [&](const char* measure, const std::string& series, double value, Split split) {
      out << date << ',' << measure << ',' << csv_field(series) << ',' << general(value, digits) << ','
          << to_string(split) << '\n';
    };
    row("TCI", "", s.tci, Split::overall);
    if (s.has_split) {
      row("TCI", "", s.tci_c, Split::contemporaneous);
      row("TCI", "", s.tci_l, Split::lagged);
    }
    struct Measure {
      const char* name;
      const Eigen::VectorXd *all, *c, *l;
    };
    const Measure measures[] = {{"TO", &s.to, &s.to_c, &s.to_l},
                                {"FROM", &s.from, &s.from_c, &s.from_l},
                                {"NET", &s.net, &s.net_c, &s.net_l}};
    for (const auto& m : measures) {
      for (std::size_t i = 0; i < K; ++i) {
        const Eigen::Index ii = static_cast<Eigen::Index>(i);
        row(m.name, rolling.labels[i], (*m.all)(ii), Split::overall);
        if (s.has_split) {
          row(m.name, rolling.labels[i], (*m.c)(ii), Split::contemporaneous);
          row(m.name, rolling.labels[i], (*m.l)(ii), Split::lagged);
        }
      }
    }
    NpdcMatrices np = npdc(table);
    for (std::size_t i = 0; i < K; ++i) {
      for (std::size_t j = i + 1; j < K; ++j) {
        const Eigen::Index ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        const std::string name = rolling.labels[i] + "->" + rolling.labels[j];
        row("NPDC", name, np.overall(ii, jj), Split::overall);
        if (np.contemporaneous) {
          row("NPDC", name, (*np.contemporaneous)(ii, jj), Split::contemporaneous);
          row("NPDC", name, (*np.lagged)(ii, jj), Split::lagged);
        }
      }
    }
  }
}

void write_stats_csv(std::ostream& out, const std::vector<DescriptiveRow>& rows) {
  out << "label,n,mean_x1000,sd,skewness,kurtosis,jarque_bera,jb_pvalue,jb_sig,adf,adf_lags,adf_sig\n";
  for (const auto& r : rows) {
    out << csv_field(r.label) << ',' << r.n << ',' << fixed(r.mean * 1000.0, 3) << ',' << fixed(r.sd, 3) << ','
        << fixed(r.skewness, 3) << ',' << fixed(r.kurtosis, 3) << ',' << fixed(r.jb_stat, 3) << ','
        << general(r.jb_p, 6) << ',' << stars(level_from_pvalue(r.jb_p)) << ',';
    if (std::isnan(r.adf_stat)) {
      out << ",,";
    } else {
      out << fixed(r.adf_stat, 3) << ',' << r.adf_lags << ',' << stars(r.adf_level);
    }
    out << '\n';
  }
}

void write_correlation_csv(std::ostream& out, const MaskedMatrix& masked, int precision) {
  for (const auto& l : masked.labels) out << ',' << csv_field(l);
  out << '\n';
  const Eigen::Index K = masked.values.rows();
  for (Eigen::Index i = 0; i < K; ++i) {
    out << csv_field(masked.labels[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < K; ++j) {
      out << ',';
      if (masked.present(i, j)) out << fixed(masked.values(i, j), precision);
    }
    out << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const std::vector<std::string>& labels, const Eigen::MatrixXd& values,
                      int digits) {
  for (const auto& l : labels) out << ',' << csv_field(l);
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out << csv_field(labels[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < values.cols(); ++j) out << ',' << general(values(i, j), digits);
    out << '\n';
  }
}

}  // namespace spill
