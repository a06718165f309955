#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "d2d/random.hpp"
#include "d2d/scenario.hpp"
#include "d2d/units.hpp"

using namespace d2d;

TEST(Units, DbRoundTrip) {
  for (double db : {-121.4, -30.55, 0.0, 2.0, 23.0}) {
    EXPECT_NEAR(linear_to_db(db_to_linear(db)), db, 1e-12);
  }
  EXPECT_DOUBLE_EQ(db_to_linear(10.0), 10.0);
  EXPECT_NEAR(dbm_to_mw(23.0), 199.526231496888, 1e-9);
}

TEST(Units, ThermalNoiseOverOneResourceBlock) {
  // -174 dBm/Hz over 180 kHz
  EXPECT_NEAR(noise_dbm(-174.0, 180e3), -174.0 + 10.0 * std::log10(180e3),
              1e-12);
  EXPECT_NEAR(noise_dbm(-174.0, 180e3), -121.447, 1e-3);
}

TEST(Random, SplitMixKnownValues) {
  // Reference outputs of the SplitMix64 finalizer for states 1 and 2
  // (x += golden gamma, then the two xor-multiply rounds).
  auto ref = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  EXPECT_EQ(splitmix64(1), ref(1));
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Random, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 1000; ++r) seen.insert(derive_seed(1, r));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(derive_seed(7, Stream::kGeometry), derive_seed(7, Stream::kChannel));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

TEST(Config, DefaultsReproduceTheSimulationTable) {
  const ScenarioConfig c;
  EXPECT_EQ(c.cell_radius_m, 400.0);
  EXPECT_EQ(c.noise_density_dbm_hz, -174.0);
  EXPECT_EQ(c.bandwidth_hz, 180e3);
  EXPECT_EQ(c.carrier_hz, 2e9);
  EXPECT_EQ(c.p_d_max_dbm, 23.0);
  EXPECT_EQ(c.p_c_max_dbm, 23.0);
  EXPECT_EQ(c.d_min_m, 10.0);
  EXPECT_EQ(c.d2d_min_m, 10.0);
  EXPECT_EQ(c.d2d_max_m, 40.0);
  EXPECT_EQ(c.n_cells, 7);
  EXPECT_EQ(c.pairs_per_cell, 10);
  EXPECT_EQ(c.c0_db, -30.55);
  EXPECT_EQ(c.cd_db, -28.03);
  EXPECT_EQ(c.alpha0, 3.67);
  EXPECT_EQ(c.alpha_d, 4.0);
  EXPECT_EQ(c.realizations, 5000);
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, OverridesAndTextDocument) {
  ScenarioConfig c;
  parse_config_text(c,
                    "# comment line\n"
                    "delta_db = 3   # trailing comment\n"
                    "\n"
                    "methods = bac, dac, oac\n"
                    "shadow_sigma_db = 6\n");
  EXPECT_EQ(c.delta_db, 3.0);
  EXPECT_EQ(c.methods.size(), 3u);
  EXPECT_TRUE(c.has_method(Method::kOac));
  EXPECT_EQ(c.shadow_sigma_bs_db, 6.0);
  EXPECT_EQ(c.shadow_sigma_d2d_db, 6.0);
  apply_override(c, "realizations=10");
  EXPECT_EQ(c.realizations, 10);
}

TEST(Config, UnknownKeyIsNamed) {
  ScenarioConfig c;
  try {
    apply_override(c, "no_such_key=1");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "no_such_key");
  }
  EXPECT_THROW(apply_override(c, "delta_db"), ConfigError);
  EXPECT_THROW(apply_override(c, "delta_db=abc"), ConfigError);
  EXPECT_THROW(apply_override(c, "n_cells=2.5"), ConfigError);
  EXPECT_THROW(apply_override(c, "methods=bac,xyz"), ConfigError);
}

TEST(Config, EchoReproducesConfigExactly) {
  ScenarioConfig c;
  c.delta_db = 0.1 + 0.2;  // not representable in short decimal
  c.gamma_d_db = 1.0 / 3.0;
  c.master_seed = 0xfedcba9876543210ULL;
  c.methods = {Method::kDac, Method::kOac};
  ScenarioConfig back;
  parse_config_text(back, config_to_text(c));
  EXPECT_EQ(config_entries(back), config_entries(c));
  EXPECT_EQ(back.delta_db, c.delta_db);
  EXPECT_TRUE(std::isnan(back.bac_p_r_d_dbm));
}

TEST(Config, ValidationRejectsBadValues) {
  auto bad = [](const char* kv) {
    ScenarioConfig c;
    apply_override(c, kv);
    try {
      validate(c);
    } catch (const ConfigError&) {
      return true;
    }
    return false;
  };
  EXPECT_TRUE(bad("delta_db=0"));
  EXPECT_TRUE(bad("delta_db=-1"));
  EXPECT_TRUE(bad("n_cells=3"));
  EXPECT_TRUE(bad("alpha_p=1.5"));
  EXPECT_TRUE(bad("d2d_max_m=5"));
  EXPECT_TRUE(bad("gamma_d_db=inf"));
  EXPECT_FALSE(bad("gamma_d_db=-3"));
}
