#include "app/commands.hpp"
#include "app/config.hpp"

#include "qkdrate/guessing.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace qkdrate::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_path(const std::string& name) {
  return fs::path(::testing::TempDir()) / ("qkdrate_cli_" + name);
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = temp_path(name);
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_string(const CsvTable& t) {
  std::ostringstream ss;
  t.write(ss);
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(Cli, RateWithPreset) {
  const Result r = invoke({"rate", "--preset", "fig1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0],
            "method,block_size,qber,f,raw_rate,clamped_rate,delta,q_eff,leak_per_signal,"
            "epsilon_total,n_key,feasible");
  EXPECT_EQ(rows[1].rfind("FME,100000000,0.03,0.01,", 0), 0u);
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
}

TEST(Cli, FlagsOverrideConfigWhichOverridesPreset) {
  const fs::path cfg = write_temp("layer.json", R"({"qber": 0.05, "gamma": 1.1})");
  const Result r = invoke({"rate", "--preset", "fig1", "--config", cfg.string(), "--gamma", "1.2",
                           "--fixed-f", "0.1", "--delta-variant", "main"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = lines(r.out);
  EXPECT_EQ(rows[1].rfind("FME,100000000,0.05,0.1,", 0), 0u);

  RunConfig expect = preset("fig1");
  expect.qber = 0.05;
  expect.env.gamma = 1.2;
  expect.env.delta_variant = DeltaVariant::MainText;
  expect.estimation_fraction = 0.1;
  expect.optimize_f = false;
  EXPECT_EQ(lines(csv_string(rate_table(expect)))[1], rows[1]);
}

TEST(Cli, ConfigErrorsExitTwoAndNameTheField) {
  const fs::path out = temp_path("never.csv");
  fs::remove(out);
  const fs::path typo = write_temp("typo.json", R"({"budget": {"eps_pe": 1e-10, "eps_hh": 1e-10}})");
  Result r = invoke({"rate", "--config", typo.string(), "--out", out.string()});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("budget.eps_hh"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(out));

  const fs::path range = write_temp("range.json", R"({"estimation_fraction": 1.5})");
  r = invoke({"rate", "--config", range.string()});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("estimation_fraction"), std::string::npos);

  const fs::path broken = write_temp("broken.json", R"({"qber": )");
  EXPECT_EQ(invoke({"rate", "--config", broken.string()}).code, kExitConfigError);
  EXPECT_EQ(invoke({"rate", "--config", temp_path("missing.json").string()}).code,
            kExitConfigError);
  EXPECT_EQ(invoke({"rate", "--preset", "fig9"}).code, kExitConfigError);
  EXPECT_EQ(invoke({"rate", "--gamma", "0.9"}).code, kExitConfigError);
  EXPECT_EQ(invoke({"rate", "--delta-variant", "both"}).code, kExitConfigError);
  EXPECT_EQ(invoke({"rate", "--bogus"}).code, kExitConfigError);
  EXPECT_EQ(invoke({}).code, kExitConfigError);
}

TEST(Cli, OutputIsByteStableWithSidecarMetadata) {
  const fs::path a = temp_path("a.csv");
  const fs::path b = temp_path("b.csv");
  ASSERT_EQ(invoke({"sweep-n", "--preset", "fig2", "--out", a.string()}).code, kExitOk);
  ASSERT_EQ(invoke({"sweep-n", "--preset", "fig2", "--out", b.string()}).code, kExitOk);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(lines(slurp(a)).size(), 1u + 60u * 3u);
  const std::string meta = slurp(a.string() + ".meta.json");
  EXPECT_NE(meta.find("generated_at"), std::string::npos);
  EXPECT_EQ(slurp(a).find("generated_at"), std::string::npos);
}

TEST(Cli, EveryPresetRuns) {
  EXPECT_EQ(invoke({"sweep-n", "--preset", "fig1"}).code, kExitOk);
  EXPECT_EQ(invoke({"sweep-n", "--preset", "fig2"}).code, kExitOk);
  const Result fig3 = invoke({"sweep-qber", "--preset", "fig3"});
  EXPECT_EQ(fig3.code, kExitOk);
  EXPECT_EQ(lines(fig3.out).size(), 1u + 100u * 3u);
  const Result fig4 = invoke({"sweep-qber", "--preset", "fig4"});
  EXPECT_EQ(fig4.code, kExitOk);
  EXPECT_EQ(lines(fig4.out)[1], "0,FME,0.630957344,0.630957344,0,0,0,3e-10,1");
}

TEST(Cli, ThresholdNoKeyIsFlaggedRow) {
  const fs::path cfg = write_temp("tiny.json", R"({"block_size": 1000, "methods": ["AEP", "EUR"]})");
  const Result r = invoke({"threshold", "--preset", "fig3", "--config", cfg.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1], "AEP,1000,nan,nan,no_key");
}

TEST(Cli, CertificatePasses) {
  const Result r = invoke({"certificate"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find(",PASS"), std::string::npos);
  EXPECT_NE(r.err.find("verdict: PASS"), std::string::npos);
}

TEST(Cli, VerifyPgPassesAndCoarseOracleFails) {
  const fs::path ok = write_temp("vpg.json", R"({"grid": [0.0, 0.05, 0.2], "grid_resolution": 200})");
  Result r = invoke({"verify-pg", "--config", ok.string()});
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_EQ(lines(r.out).size(), 4u);

  const fs::path coarse = write_temp(
      "vpg_coarse.json",
      R"({"grid": [0.05], "grid_resolution": 100, "general_diagonal_sigma": true, "simplex_resolution": 3})");
  r = invoke({"verify-pg", "--config", coarse.string()});
  EXPECT_EQ(r.code, kExitVerificationFailed);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, CorruptedClosedFormIsCaught) {
  RunConfig cfg;
  GridSpec g;
  g.values = {0.03, 0.1};
  cfg.grid = g;
  cfg.grid_resolution = 200;
  EXPECT_TRUE(verify_pg_table(cfg).pass);
  const VerifyReport bad =
      verify_pg_table(cfg, [](double p) { return 0.5 + std::sqrt(p * (1.0 - p)) + 1e-3; });
  EXPECT_FALSE(bad.pass);
}

TEST(Config, StrictSchema) {
  RunConfig cfg;
  EXPECT_THROW(apply_json_text(cfg, R"({"block_size": "big"})"), ConfigError);
  EXPECT_THROW(apply_json_text(cfg, R"({"channel": {"distance": 3}})"), ConfigError);
  EXPECT_THROW(apply_json_text(cfg, R"({"methods": ["FME", "XYZ"]})"), ConfigError);
  EXPECT_THROW(apply_json_text(cfg, R"({"grid": {"start": 1}})"), ConfigError);
  EXPECT_THROW(apply_json_text(cfg, R"([1, 2])"), ConfigError);
  apply_json_text(cfg, R"({"grid": {"start": 10, "stop": 1000, "count": 3, "spacing": "log"},
                           "channel": {"distance_km": 25}, "workers": 2})");
  ASSERT_TRUE(cfg.grid);
  EXPECT_EQ(cfg.grid->points(), (std::vector<double>{10, 100, 1000}));
  EXPECT_EQ(cfg.env.channel.distance_km, 25.0);
  EXPECT_EQ(cfg.workers, 2u);
  try {
    apply_json_text(cfg, R"({"budget": {"eps_s": 0}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "budget.eps_s");
  }
}

TEST(Config, PresetsEncodeFigureParameters) {
  for (std::string_view name : kPresetNames) {
    const RunConfig cfg = preset(name);
    EXPECT_EQ(cfg.env.channel.distance_km, 10.0);
    EXPECT_EQ(cfg.env.channel.attenuation_db_per_km, 0.2);
    EXPECT_EQ(cfg.env.budget.eps_pe, 1e-10);
    EXPECT_EQ(cfg.env.budget.eps_s, 1e-10);
    EXPECT_EQ(cfg.env.gamma, 1.0);
    EXPECT_TRUE(cfg.grid.has_value());
    EXPECT_NO_THROW(validate(cfg));
  }
  EXPECT_EQ(preset("fig2").qber, 0.06);
  EXPECT_EQ(preset("fig3").block_size, 1e5);
  EXPECT_TRUE(preset("fig4").asymptotic);
}

}  // namespace
}  // namespace qkdrate::cli
