#include <gtest/gtest.h>

#include <cmath>

#include "d2d/harness.hpp"

using namespace d2d;

namespace {

ScenarioConfig quick(int realizations = 40) {
  ScenarioConfig c;
  c.realizations = realizations;
  c.methods = {Method::kBac, Method::kDac};
  c.workers = 1;
  return c;
}

void expect_same_records(const RunReport& a, const RunReport& b) {
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i)
    EXPECT_TRUE(a.records[i] == b.records[i]) << i;
}

}  // namespace

TEST(Harness, RerunIsBitExact) {
  const auto a = run(quick());
  const auto b = run(quick());
  expect_same_records(a, b);
  ASSERT_EQ(a.summaries.size(), 2u);
  for (std::size_t m = 0; m < 2; ++m) {
    EXPECT_EQ(a.summaries[m].cue_sinr_loss_db, b.summaries[m].cue_sinr_loss_db);
    EXPECT_EQ(a.summaries[m].se_total, b.summaries[m].se_total);
  }
}

TEST(Harness, WorkerCountDoesNotChangeResults) {
  auto one = quick(60);
  auto three = one;
  three.workers = 3;
  const auto a = run(one);
  const auto b = run(three);
  EXPECT_EQ(b.workers, 3);
  expect_same_records(a, b);
  for (std::size_t m = 0; m < a.summaries.size(); ++m) {
    EXPECT_EQ(a.summaries[m].stats.se_total.mean, b.summaries[m].stats.se_total.mean);
    EXPECT_EQ(a.summaries[m].stats.cue_outage, b.summaries[m].stats.cue_outage);
  }
}

TEST(Harness, MethodsShareTheDrop) {
  const auto rep = run(quick(10));
  ASSERT_EQ(rep.records.size(), 20u);
  for (std::size_t i = 0; i < rep.records.size(); i += 2) {
    const auto& b = rep.records[i];
    const auto& d = rep.records[i + 1];
    EXPECT_EQ(b.method, Method::kBac);
    EXPECT_EQ(d.method, Method::kDac);
    EXPECT_EQ(b.realization, d.realization);
    EXPECT_EQ(b.drop_hash, d.drop_hash);
    EXPECT_EQ(b.seed, realization_seed(rep.config.master_seed, b.realization));
    EXPECT_EQ(b.cue_baseline_sinr_db, d.cue_baseline_sinr_db);
  }
}

TEST(Harness, SeedChangesDrops) {
  auto c = quick(5);
  const auto a = run(c);
  c.master_seed += 1;
  const auto b = run(c);
  EXPECT_NE(a.records[0].drop_hash, b.records[0].drop_hash);
}

TEST(Harness, NoMethods) {
  auto c = quick(5);
  c.methods.clear();
  const auto rep = run(c);
  EXPECT_TRUE(rep.records.empty());
  EXPECT_TRUE(rep.summaries.empty());
}

TEST(Harness, OacGuard) {
  auto c = quick(2);
  c.methods = {Method::kOac};
  try {
    run(c);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "oac_max_pairs");
  }
  c.pairs_per_cell = 2;
  const auto rep = run(c);
  EXPECT_EQ(rep.records.size(), 2u);
  EXPECT_EQ(rep.summary(Method::kOac)->stats.oac_proven_fraction, 1.0);
}

TEST(Harness, OacSubsample) {
  auto c = quick(6);
  c.pairs_per_cell = 2;
  c.methods = {Method::kDac, Method::kOac};
  c.oac_realizations = 2;
  const auto rep = run(c);
  EXPECT_EQ(rep.summary(Method::kDac)->stats.realizations, 6u);
  EXPECT_EQ(rep.summary(Method::kOac)->stats.realizations, 2u);
}

TEST(Harness, DacHistoryKept) {
  RunOptions opt;
  opt.keep_dac_history = true;
  const auto rep = run(quick(3), opt);
  ASSERT_EQ(rep.dac_history.size(), 3u);
  for (std::size_t r = 0; r < 3; ++r) {
    const auto& rec = rep.records[2 * r + 1];
    EXPECT_EQ(rep.dac_history[r].size(), static_cast<std::size_t>(rec.iterations));
  }
}

TEST(Harness, InvalidConfigRejected) {
  auto c = quick();
  c.delta_db = 0.0;
  EXPECT_THROW(run(c), ConfigError);
}

TEST(Sweep, OneReportPerValue) {
  auto c = quick(3);
  std::vector<double> deltas;
  for (int i = 0; i <= 12; ++i) deltas.push_back(i * 0.5 + 0.5);
  const auto reps = sweep(c, "delta_db", deltas);
  ASSERT_EQ(reps.size(), 13u);
  for (std::size_t i = 0; i < reps.size(); ++i) {
    EXPECT_EQ(reps[i].config.delta_db, deltas[i]);
    // Shared seeds: identical drops at every sweep point.
    EXPECT_EQ(reps[i].records[0].drop_hash, reps[0].records[0].drop_hash);
  }
}

TEST(Sweep, AxesMapToKeys) {
  auto c = quick(2);
  auto reps = sweep(c, "p_r_d", {-70.0});
  EXPECT_EQ(reps[0].config.bac_p_r_d_dbm, -70.0);
  EXPECT_NEAR(mw_to_dbm(reps[0].bac.p_r_d), -70.0, 1e-9);
  reps = sweep(c, "d2d_max", {30.0});
  EXPECT_EQ(reps[0].config.d2d_max_m, 30.0);
  reps = sweep2(c, "delta_db", {1.0, 2.0}, "gamma_d_db", {3.0, 4.0, 5.0});
  ASSERT_EQ(reps.size(), 6u);
  EXPECT_EQ(reps[4].config.delta_db, 2.0);
  EXPECT_EQ(reps[4].config.gamma_d_db, 4.0);
}

TEST(Sweep, UnknownAxisNamed) {
  try {
    sweep(quick(1), "alpha_zero", {1.0});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "alpha_zero");
  }
}

TEST(Sweep, BacCountTrends) {
  ScenarioConfig c;
  c.gamma_d_db = 8.0;
  std::vector<double> deltas;
  for (double d = 0.5; d <= 40.0; d += 0.5) deltas.push_back(d);
  const auto n = bac_count_sweep(c, "delta_db", deltas);
  for (std::size_t i = 1; i < n.size(); ++i) EXPECT_GE(n[i], n[i - 1]);
  // Saturation: shrinking steps over the upper quarter, and the end of the
  // sweep close to the delta -> infinity limit of the D2D-side bound.
  for (std::size_t i = 3 * n.size() / 4 + 1; i < n.size(); ++i)
    EXPECT_LT(n[i] - n[i - 1], n[i - 1] - n[i - 2]);
  const auto ctx = ExpectationContext::from_config(c);
  const double limit = (ctx.e_g_d2d() / c.gamma_d() + ctx.e_g_d2d_i()) /
                       (ctx.area_d2d_i() * ctx.e_g_d2d_i()) * c.cell_area();
  EXPECT_LT(n.back(), limit);
  EXPECT_GT(n.back(), 0.9 * limit);

  ScenarioConfig d;
  d.delta_db = 3.0;
  std::vector<double> dmax;
  for (double v = 20.0; v <= 100.0; v += 5.0) dmax.push_back(v);
  const auto m = bac_count_sweep(d, "d2d_max", dmax);
  for (std::size_t i = 1; i < m.size(); ++i) EXPECT_LT(m[i], m[i - 1]);
}

TEST(Harness, WorkersFromEnvironment) {
  ScenarioConfig c;
  c.workers = 0;
  setenv(kWorkersEnv, "5", 1);
  EXPECT_EQ(resolve_workers(c), 5);
  unsetenv(kWorkersEnv);
  c.workers = 2;
  EXPECT_EQ(resolve_workers(c), 2);
}
