#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "d2d/cli.hpp"
#include "d2d/harness.hpp"
#include "d2d/report_io.hpp"

using namespace d2d;
namespace fs = std::filesystem;

namespace {

RunReport small_run() {
  ScenarioConfig c;
  c.realizations = 8;
  c.workers = 1;
  c.methods = {Method::kBac, Method::kDac};
  return run(c);
}

bool same_or_both_nan(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

void expect_stats_eq(const MetricStats& a, const MetricStats& b) {
  EXPECT_EQ(a.n, b.n);
  EXPECT_TRUE(same_or_both_nan(a.p5, b.p5));
  EXPECT_TRUE(same_or_both_nan(a.p50, b.p50));
  EXPECT_TRUE(same_or_both_nan(a.p95, b.p95));
  EXPECT_TRUE(same_or_both_nan(a.mean, b.mean));
}

struct TempDir {
  static inline int counter = 0;
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("d2d_test_" + std::to_string(::testing::UnitTest::GetInstance()
                                             ->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name() +
            "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(std::vector<std::string> args, std::string* out = nullptr,
        std::string* err = nullptr) {
  args.insert(args.begin(), "d2dsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int rc = cli::main_entry(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return rc;
}

int count_lines(const fs::path& p) {
  std::ifstream is(p);
  int n = 0;
  for (std::string l; std::getline(is, l);) ++n;
  return n;
}

}  // namespace

TEST(ReportIo, RecordsCsvRoundTrip) {
  const auto rep = small_run();
  std::stringstream ss;
  write_records_csv(ss, rep.records);
  EXPECT_EQ(ss.str().rfind(kRecordsSchema, 0), 0u);
  const auto back = read_records_csv(ss);
  ASSERT_EQ(back.size(), rep.records.size());
  for (std::size_t i = 0; i < back.size(); ++i)
    EXPECT_TRUE(back[i] == rep.records[i]) << i;
}

TEST(ReportIo, RecordsJsonRoundTrip) {
  const auto rep = small_run();
  const auto j = records_json(rep.records);
  const auto back = read_records_json(nlohmann::json::parse(j.dump()));
  ASSERT_EQ(back.size(), rep.records.size());
  for (std::size_t i = 0; i < back.size(); ++i)
    EXPECT_TRUE(back[i] == rep.records[i]) << i;
}

TEST(ReportIo, SummaryRoundTrip) {
  const auto rep = small_run();
  std::stringstream ss;
  ss << summary_json(rep).dump(2);
  const auto f = read_summary_json(ss);
  EXPECT_EQ(config_entries(f.config), config_entries(rep.config));
  ASSERT_EQ(f.methods.size(), rep.summaries.size());
  for (std::size_t m = 0; m < f.methods.size(); ++m) {
    const auto& a = f.methods[m];
    const auto& b = rep.summaries[m].stats;
    EXPECT_EQ(a.method, b.method);
    EXPECT_EQ(a.realizations, b.realizations);
    expect_stats_eq(a.cue_sinr_loss_db, b.cue_sinr_loss_db);
    expect_stats_eq(a.d2d_sinr_db, b.d2d_sinr_db);
    expect_stats_eq(a.se_total, b.se_total);
    EXPECT_TRUE(same_or_both_nan(a.d2d_outage, b.d2d_outage));
    EXPECT_TRUE(same_or_both_nan(a.dac_converged_fraction, b.dac_converged_fraction));
    EXPECT_EQ(a.cue_outage, b.cue_outage);
  }
}

TEST(ReportIo, CdfAndTableRoundTrip) {
  const std::vector<double> v{-3.5, 0.1 + 0.2, 1.0 / 3.0, 7.0};
  std::stringstream ss;
  write_cdf_csv(ss, v);
  EXPECT_EQ(read_cdf_csv(ss), v);

  Table t{{"a", "b"}, {{1.0, std::nan("")}, {0.1, -2e-300}}};
  std::stringstream ts;
  write_table_csv(ts, kSweepSchema, t);
  const auto back = read_table_csv(ts);
  EXPECT_EQ(back.columns, t.columns);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[0][0], 1.0);
  EXPECT_TRUE(std::isnan(back.rows[0][1]));
  EXPECT_EQ(back.rows[1], t.rows[1]);
}

TEST(ReportIo, RejectsMissingSchema) {
  std::stringstream ss("value,cdf\n1,1\n");
  EXPECT_THROW(read_cdf_csv(ss), std::runtime_error);
  std::stringstream rs("method,realization\n");
  EXPECT_THROW(read_records_csv(rs), std::runtime_error);
}

TEST(Cli, ParseValues) {
  EXPECT_EQ(cli::parse_values("v", "1,2.5,4"), (std::vector<double>{1, 2.5, 4}));
  const auto r = cli::parse_values("v", "0.5:0.5:2");
  EXPECT_EQ(r, (std::vector<double>{0.5, 1.0, 1.5, 2.0}));
  EXPECT_EQ(cli::parse_values("v", "20:5:100").size(), 17u);
  EXPECT_THROW(cli::parse_values("v", "1:0:2"), ConfigError);
  EXPECT_THROW(cli::parse_values("v", "a,b"), ConfigError);
}

TEST(Cli, SimulateWritesFiles) {
  TempDir t;
  std::string out;
  const int rc = run_cli({"simulate", "-o", t.path.string(), "--set",
                      "realizations=6", "--workers", "1", "--dump-gains",
                      "--dump-dac-iterations"},
                     &out);
  ASSERT_EQ(rc, 0) << out;
  EXPECT_EQ(count_lines(t.path / "records.csv"), 2 + 12);
  EXPECT_TRUE(fs::exists(t.path / "summary.json"));
  EXPECT_TRUE(fs::exists(t.path / "gains_r0.csv"));
  EXPECT_GT(count_lines(t.path / "dac_iterations.csv"), 6);

  // The config echo alone reproduces the run.
  TempDir t2;
  ASSERT_EQ(run_cli({"simulate", "-c", (t.path / "config.txt").string(), "-o",
                 t2.path.string()}),
            0);
  std::ifstream a(t.path / "records.csv"), b(t2.path / "records.csv");
  EXPECT_EQ(read_records_csv(a), read_records_csv(b));
}

TEST(Cli, JsonFormat) {
  TempDir t;
  ASSERT_EQ(run_cli({"simulate", "-o", t.path.string(), "-s", "realizations=3",
                 "--format", "json", "--workers", "1"}),
            0);
  std::ifstream is(t.path / "records.json");
  EXPECT_EQ(nlohmann::json::parse(is).size(), 6u);
  EXPECT_EQ(run_cli({"simulate", "-o", t.path.string(), "--format", "xml"}), 2);
}

TEST(Cli, BadKeyExitsWithConfigError) {
  TempDir t;
  std::string err;
  EXPECT_EQ(run_cli({"simulate", "-o", t.path.string(), "--set", "bogus_key=1"},
                nullptr, &err),
            2);
  EXPECT_NE(err.find("bogus_key"), std::string::npos);
  EXPECT_EQ(run_cli({"simulate", "-o", t.path.string(), "--set", "delta_db=-1"}), 2);
  EXPECT_EQ(run_cli({"simulate", "-c", (t.path / "missing.conf").string()}), 2);
  EXPECT_EQ(run_cli({"frobnicate"}), 2);
  EXPECT_EQ(run_cli({"simulate", "--help"}), 0);
}

TEST(Cli, CompareWritesCdfs) {
  TempDir t;
  ASSERT_EQ(run_cli({"compare", "-o", t.path.string(), "-s", "realizations=5",
                 "-s", "methods=bac,dac", "--workers", "2"}),
            0);
  for (const char* m : {"bac", "dac"})
    for (const auto& metric : cdf_metrics()) {
      const auto p = t.path / ("cdf_" + std::string(m) + "_" + metric + ".csv");
      ASSERT_TRUE(fs::exists(p)) << p;
      std::ifstream is(p);
      const auto v = read_cdf_csv(is);
      EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
      if (metric != "d2d_sinr") {
        EXPECT_EQ(v.size(), 5u);
      }
    }
}

TEST(Cli, SweepTable) {
  TempDir t;
  ASSERT_EQ(run_cli({"sweep", "-o", t.path.string(), "-s", "realizations=2",
                 "--workers", "1", "--axis", "delta_db", "--values", "1:1:4"}),
            0);
  std::ifstream is(t.path / "sweep_dac.csv");
  const auto tab = read_table_csv(is);
  ASSERT_EQ(tab.rows.size(), 4u);
  EXPECT_EQ(tab.columns[0], "delta_db");
  EXPECT_EQ(tab.rows[3][0], 4.0);
  EXPECT_EQ(run_cli({"sweep", "-o", t.path.string(), "--axis", "nope", "--values",
                 "1"}),
            2);
}

TEST(Cli, BoundFiles) {
  TempDir t;
  ASSERT_EQ(run_cli({"bound", "-o", t.path.string(), "--prd-points", "11"}), 0);
  std::ifstream is(t.path / "bound_prd.csv");
  const auto tab = read_table_csv(is);
  ASSERT_EQ(tab.rows.size(), 11u);
  EXPECT_NEAR(tab.rows.front()[0], -130.0, 1e-9);
  EXPECT_NEAR(tab.rows.back()[0], -40.0, 1e-9);
  for (const char* f : {"bound_design.csv", "bound_delta.csv", "bound_d2d_max.csv"})
    EXPECT_TRUE(fs::exists(t.path / f)) << f;
  EXPECT_EQ(count_lines(t.path / "bound_delta.csv"), 2 + 80);
}

TEST(Cli, OacGuardAndOutput) {
  TempDir t;
  std::string err;
  EXPECT_EQ(run_cli({"oac", "-o", t.path.string()}, nullptr, &err), 2);
  EXPECT_NE(err.find("max-pairs"), std::string::npos);
  ASSERT_EQ(run_cli({"oac", "-o", t.path.string(), "-s", "pairs_per_cell=2",
                 "--realization", "3"}),
            0);
  std::ifstream is(t.path / "oac.json");
  const auto j = nlohmann::json::parse(is);
  EXPECT_EQ(j.at("n_pairs"), 14);
  EXPECT_EQ(j.at("proven_optimal"), true);
  EXPECT_LE(j.at("milp_violation").get<double>(), 1e-8);
  EXPECT_EQ(j.at("active").size(), j.at("n_active").get<std::size_t>());
}
