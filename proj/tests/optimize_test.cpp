#include "qkdrate/optimize.hpp"

#include "qkdrate/search.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace qkdrate {
namespace {

Environment figure_env(DeltaVariant v = DeltaVariant::Appendix) {
  Environment env;
  env.channel = {0.2, 10.0};
  env.delta_variant = v;
  return env;
}

TEST(OptimizeF, BeatsEveryCoarseGridPoint) {
  const FSearchOptions opts;
  const std::vector<double> grid = log_space(opts.f_min, opts.f_max, opts.coarse_points);
  for (double n : {1e5, 1e6, 1e9}) {
    for (Method m : kAllMethods) {
      const ProtocolConfig tmpl = make_config(figure_env(), n, 0.03, 0.5);
      const OptimizedRate best = optimize_f(m, tmpl, opts);
      for (double f : grid) {
        ProtocolConfig cfg = tmpl;
        cfg.estimation_fraction_f = f;
        if (estimation_sample_size(cfg) < 1.0) continue;
        const RatePoint r = evaluate_rate(m, cfg);
        if (r.feasible) ASSERT_GE(best.rate.raw_rate, r.raw_rate) << "N = " << n << ", f = " << f;
      }
      EXPECT_EQ(best.rate.estimation_fraction, best.f_opt);
    }
  }
}

TEST(OptimizeF, AllInfeasibleReportsFmax) {
  const ProtocolConfig tmpl = make_config(figure_env(), 50.0, 0.45, 0.5);
  const OptimizedRate r = optimize_f(Method::EUR, tmpl);
  EXPECT_EQ(r.f_opt, 0.5);
  EXPECT_FALSE(r.rate.feasible);
  EXPECT_EQ(r.rate.clamped_rate, 0.0);
}

TEST(OptimizeF, FixedFModeBypassesSearch) {
  Environment env = figure_env();
  env.fixed_f = 0.2;
  const OptimizedRate r = best_rate(Method::AEP, env, 1e6, 0.03);
  EXPECT_EQ(r.f_opt, 0.2);
  EXPECT_EQ(r.rate.raw_rate,
            evaluate_rate(Method::AEP, make_config(env, 1e6, 0.03, 0.2)).raw_rate);
}

TEST(OptimizeF, RejectsBadInterval) {
  FSearchOptions bad;
  bad.f_min = 0.6;
  EXPECT_THROW(optimize_f(Method::EUR, make_config(figure_env(), 1e6, 0.03, 0.1), bad),
               std::invalid_argument);
}

TEST(Threshold, BracketInvariant) {
  const Environment env = figure_env();
  for (Method m : kAllMethods) {
    const ThresholdResult t = qber_threshold(m, 1e5, env);
    ASSERT_GT(t.bracket_width, 0.0);
    EXPECT_GT(best_rate(m, env, 1e5, t.threshold_qber).rate.clamped_rate, 0.0);
    EXPECT_EQ(best_rate(m, env, 1e5, t.threshold_qber + t.bracket_width).rate.clamped_rate, 0.0);
  }
}

TEST(Threshold, OrderingAtHundredThousand) {
  for (DeltaVariant v : {DeltaVariant::MainText, DeltaVariant::Appendix}) {
    const Environment env = figure_env(v);
    const double eur = qber_threshold(Method::EUR, 1e5, env).threshold_qber;
    const double fme = qber_threshold(Method::FME, 1e5, env).threshold_qber;
    const double aep = qber_threshold(Method::AEP, 1e5, env).threshold_qber;
    EXPECT_GT(eur, fme);
    EXPECT_GT(fme, aep);
  }
}

TEST(Threshold, NoKeyAtTinyBlocks) {
  EXPECT_THROW(qber_threshold(Method::AEP, 1e3, figure_env()), NoKeyError);
}

TEST(Threshold, AsymptoticMatchesRoots) {
  const Environment env = figure_env();
  EXPECT_NEAR(qber_threshold(Method::EUR, std::nullopt, env, 1e-9).threshold_qber,
              0.11002786443835955, 2e-9);
  EXPECT_NEAR(qber_threshold(Method::FME, std::nullopt, env, 1e-9).threshold_qber,
              0.075780628094432015, 2e-9);
}

SweepSpec small_sweep() {
  SweepSpec spec;
  spec.methods = {Method::FME, Method::AEP, Method::EUR};
  spec.axis = SweepAxis::BlockSize;
  spec.grid = log_space(1e4, 1e9, 12);
  spec.env = figure_env();
  spec.qber = 0.03;
  return spec;
}

TEST(Sweep, GridMajorOrderAndInfeasibleCellsKept) {
  SweepSpec spec = small_sweep();
  spec.qber = 0.3;
  spec.env.fixed_f = 1e-3;
  const auto rows = sweep(spec);
  ASSERT_EQ(rows.size(), spec.grid.size() * 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].axis_value, spec.grid[i / 3]);
    EXPECT_EQ(rows[i].rate.method, spec.methods[i % 3]);
  }
  EXPECT_FALSE(rows.front().rate.feasible);
}

TEST(Sweep, DeterministicAcrossWorkerCounts) {
  SweepSpec spec = small_sweep();
  const auto serial = sweep(spec);
  spec.workers = 3;
  const auto parallel = sweep(spec);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].axis_value, parallel[i].axis_value);
    EXPECT_EQ(serial[i].f_opt, parallel[i].f_opt);
    EXPECT_EQ(serial[i].rate.clamped_rate, parallel[i].rate.clamped_rate);
  }
}

TEST(Sweep, Validation) {
  SweepSpec spec = small_sweep();
  spec.asymptotic = true;
  EXPECT_THROW(sweep(spec), std::invalid_argument);
  spec = small_sweep();
  spec.grid = {1e5, 1e4};
  EXPECT_THROW(sweep(spec), std::invalid_argument);
  spec.grid.clear();
  EXPECT_THROW(sweep(spec), std::invalid_argument);
}

TEST(Crossover, WindowAtSixPercent) {
  const auto window = crossover_window(0.06, 1e4, 1e7, figure_env());
  ASSERT_TRUE(window.has_value());
  EXPECT_LT(window->lo, window->hi);
  EXPECT_LE(window->lo, 2e5);
  EXPECT_GE(window->hi, 1e5);
}

TEST(Crossover, EmptyWhenAepAlwaysWins) {
  EXPECT_FALSE(crossover_window(0.01, 1e7, 1e9, figure_env()).has_value());
}

}  // namespace
}  // namespace qkdrate
