#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spillover/cli.hpp"
#include "spillover/netgraph.hpp"
#include "spillover/panel.hpp"
#include "spillover/report.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = spill::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Workdir {
 public:
  Workdir() {
    path_ = fs::temp_directory_path() / ("spillover_cli_test_" + std::to_string(counter_++) + "_" +
                                         std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~Workdir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

// Simulated prices with a planted 1 -> 2 link.
std::string simulate(const Workdir& w, int t = 300) {
  Result r = run({"simulate", "--k", "3", "--t", std::to_string(t), "--coupling", "1:2:0.5", "--seed", "3", "--out",
                  w / "sim"});
  REQUIRE(r.code == 0);
  return w / "sim/simulated_prices.csv";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2 and a single error line") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"frobnicate"},
           {"connect", "--input", "x.csv"},
           {"connect", "--input", "x.csv", "--out", "o", "--window", "0"},
           {"connect", "--input", "x.csv", "--out", "o", "--method", "garch"},
           {"corr", "--input", "x.csv", "--out", "o", "--level", "2"},
       }) {
    Result r = run(args);
    CHECK(r.code == 2);
    CHECK(r.err.rfind("error: ", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  }
}

TEST_CASE("runtime failures exit with 1") {
  Workdir w;
  Result r = run({"stats", "--input", w / "missing.csv", "--out", w / "out"});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("error: stats: ", 0) == 0);
  CHECK(r.err.find("missing.csv") != std::string::npos);
}

TEST_CASE("help and version") {
  CHECK(run({"--help"}).code == 0);
  Result v = run({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out == std::string(spill::cli::kVersion) + "\n");
}

TEST_CASE("simulate writes prices and a manifest") {
  Workdir w;
  const std::string prices = simulate(w);
  std::ifstream in(prices);
  spill::PricePanel p = spill::load_price_panel(in, {});
  CHECK(p.rows() == 301);
  CHECK(p.labels == std::vector<std::string>{"S1", "S2", "S3"});
  auto manifest = nlohmann::json::parse(slurp(w / "sim/manifest.json"));
  CHECK(manifest["version"] == spill::cli::kVersion);
  CHECK(manifest["planted_lagged_links"][0]["source"] == "S1");
  CHECK(manifest["planted_lagged_links"][0]["target"] == "S2");
  CHECK(run({"simulate", "--k", "2", "--coupling", "1:1:1.5", "--own-lag", "1.5", "--out", w / "bad"}).code == 1);
  CHECK(run({"simulate", "--k", "2", "--coupling", "1:9:0.5", "--out", w / "bad"}).code == 1);
}

TEST_CASE("stats and correlations") {
  Workdir w;
  const std::string prices = simulate(w);
  REQUIRE(run({"stats", "--input", prices, "--out", w / "o"}).code == 0);
  const std::string stats = slurp(w / "o/stats.csv");
  CHECK(stats.rfind("label,n,", 0) == 0);
  CHECK(std::count(stats.begin(), stats.end(), '\n') == 4);
  REQUIRE(run({"corr", "--input", prices, "--method", "all", "--out", w / "o"}).code == 0);
  for (const char* m : {"pearson", "spearman", "kendall"}) {
    CHECK(fs::exists(w / (std::string("o/corr_") + m + ".csv")));
    CHECK(fs::exists(w / (std::string("o/corr_") + m + "_pvalues.csv")));
  }
}

TEST_CASE("connect finds the planted transmitter with every engine") {
  Workdir w;
  const std::string prices = simulate(w, 500);
  for (const char* engine : {"r2", "dy", "qvar"}) {
    REQUIRE(run({"connect", "--input", prices, "--method", engine, "--out", w / "o"}).code == 0);
    std::ifstream in(w / (std::string("o/table_") + engine + ".csv"));
    spill::AppendixTable t = spill::parse_appendix_table(in);
    CHECK(t.published.net(0) > 0);
    CHECK(t.published.net(1) < 0);
    CHECK(t.table.has_split() == (std::string(engine) == "r2"));
  }
  REQUIRE(run({"connect", "--input", prices, "--window", "200", "--raw", "--out", w / "avg"}).code == 0);
  auto manifest = nlohmann::json::parse(slurp(w / "avg/manifest.json"));
  CHECK(manifest["windows"] == 301);
  CHECK(manifest["config"]["window"] == 200);
  CHECK(manifest["config"]["raw"] == true);
}

TEST_CASE("config file values yield to explicit flags") {
  Workdir w;
  const std::string prices = simulate(w);
  {
    std::ofstream cfg(w / "cfg.json");
    cfg << R"({"engine": "dy", "window": 250, "horizon": 5, "threads": 2})";
  }
  REQUIRE(run({"rolling", "--input", prices, "--config", w / "cfg.json", "--window", "280", "--out", w / "o"}).code ==
          0);
  auto manifest = nlohmann::json::parse(slurp(w / "o/manifest.json"));
  CHECK(manifest["config"]["engine"] == "dy");
  CHECK(manifest["config"]["window"] == 280);
  CHECK(manifest["config"]["horizon"] == 5);
  CHECK(manifest["windows"] == 21);
  CHECK(fs::exists(w / "o/rolling_dy.csv"));
  CHECK(manifest["event_markers"].size() == 2);

  std::ofstream(w / "broken.json") << "{not json";
  CHECK(run({"rolling", "--input", prices, "--config", w / "broken.json", "--out", w / "o"}).code == 2);
}

TEST_CASE("rolling output is identical across thread counts") {
  Workdir w;
  const std::string prices = simulate(w);
  REQUIRE(run({"rolling", "--input", prices, "--window", "120", "--threads", "1", "--out", w / "a"}).code == 0);
  REQUIRE(run({"rolling", "--input", prices, "--window", "120", "--threads", "4", "--out", w / "b"}).code == 0);
  CHECK(slurp(w / "a/rolling_r2.csv") == slurp(w / "b/rolling_r2.csv"));
}

TEST_CASE("split and network") {
  Workdir w;
  const std::string prices = simulate(w, 500);
  REQUIRE(run({"split", "--input", prices, "--breakpoints", "2021-06-01,2021-09-01", "--labels", "one,two,three",
               "--out", w / "s"})
              .code == 0);
  for (const char* seg : {"one", "two", "three"}) CHECK(fs::exists(w / (std::string("s/segment_") + seg + ".csv")));
  CHECK(run({"split", "--input", prices, "--breakpoints", "2030-01-01", "--out", w / "s"}).code == 1);

  REQUIRE(run({"network", "--input", prices, "--format", "dot", "--out", w / "n"}).code == 0);
  for (const char* split : {"overall", "contemporaneous", "lagged"}) {
    CHECK(fs::exists(w / (std::string("n/network_") + split + ".dot")));
  }
  REQUIRE(run({"network", "--input", prices, "--split", "overall", "--threshold", "0", "--out", w / "j"}).code == 0);
  spill::SpilloverNetwork g = spill::network_from_json(slurp(w / "j/network_overall.json"));
  CHECK(g.nodes.size() == 3);
  CHECK(g.nodes[0].role == spill::NodeRole::transmitter);
  CHECK(run({"network", "--input", prices, "--method", "dy", "--split", "lagged", "--out", w / "x"}).code == 1);
  REQUIRE(run({"network", "--input", prices, "--breakpoints", "2021-06-01", "--format", "graphml", "--out",
               w / "seg"})
              .code == 0);
  CHECK(fs::exists(w / "seg/network_segment1_overall.graphml"));
  CHECK(fs::exists(w / "seg/network_segment2_lagged.graphml"));
}

TEST_CASE("several price files are joined on common dates") {
  Workdir w;
  {
    std::ofstream a(w / "a.csv");
    a << "Date,A\n";
    std::ofstream b(w / "b.csv");
    b << "Date,B,C\n";
    const std::string prices = simulate(w);
    std::ifstream in(prices);
    spill::PricePanel p = spill::load_price_panel(in, {});
    for (std::size_t t = 0; t < p.rows(); ++t) {
      const std::string d = spill::format_date(p.dates[t]);
      a << d << ',' << p.prices(static_cast<Eigen::Index>(t), 0) << '\n';
      if (t % 10 != 3) b << d << ',' << p.prices(static_cast<Eigen::Index>(t), 1) << ','
                         << p.prices(static_cast<Eigen::Index>(t), 2) << '\n';
    }
  }
  REQUIRE(run({"stats", "--input", w / "a.csv", "--input", w / "b.csv", "--out", w / "o"}).code == 0);
  const std::string stats = slurp(w / "o/stats.csv");
  CHECK(stats.find("\nA,") != std::string::npos);
  CHECK(stats.find("\nC,") != std::string::npos);
}

TEST_CASE("the installed binary runs") {
  const std::string cmd = std::string("\"") + SPILLOVER_CLI + "\" --version > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  const std::string bad = std::string("\"") + SPILLOVER_CLI + "\" nothing > /dev/null 2>&1";
  const int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}

}
