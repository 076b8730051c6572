#include "qkdrate/rates.hpp"
#include "qkdrate/search.hpp"

#include "expected_values.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace qkdrate {
namespace {

ProtocolConfig fig1_point() {
  ProtocolConfig cfg;
  cfg.block_size_n = 1e8;
  cfg.estimation_fraction_f = 0.01;
  cfg.observed_qber = 0.03;
  cfg.channel = {0.2, 10.0};
  return cfg;
}

TEST(Rates, Fig1PointAgainstOracle) {
  const ProtocolConfig cfg = fig1_point();
  const RatePoint eur = rate_eur(cfg);
  const RatePoint aep = rate_aep(cfg);
  const RatePoint fme = rate_fme(cfg);
  EXPECT_NEAR(eur.delta, expected::fig1_point::kDelta, 1e-15);
  EXPECT_NEAR(eur.effective_qber, expected::fig1_point::kQEff, 1e-15);
  EXPECT_NEAR(eur.raw_rate, expected::fig1_point::kEur, 1e-12);
  EXPECT_NEAR(aep.raw_rate, expected::fig1_point::kAep, 1e-12);
  EXPECT_NEAR(fme.raw_rate, expected::fig1_point::kFme, 1e-12);
  EXPECT_EQ(eur.method, Method::EUR);
  EXPECT_EQ(evaluate_rate(Method::FME, cfg).raw_rate, fme.raw_rate);
}

TEST(Rates, DeltaAep) {
  EXPECT_NEAR(delta_aep(1e-10), expected::kDeltaAep_1e10, 1e-12);
  EXPECT_NEAR(delta_aep(1e-5), expected::kDeltaAep_1e5, 1e-12);
  EXPECT_NEAR(delta_aep(std::sqrt(2.0)), 0.0, 1e-7);
  EXPECT_THROW(delta_aep(0.0), std::invalid_argument);
  EXPECT_THROW(delta_aep(2.0), std::invalid_argument);
}

TEST(Rates, Leakage) {
  ProtocolConfig cfg;
  cfg.channel = {0.2, 0.0};
  cfg.estimation_fraction_f = 0.5;
  cfg.block_size_n = 2e6;
  cfg.reconciliation_gamma = 1.2;
  EXPECT_NEAR(ec_leakage(cfg, 0.03), expected::kLeak_12_003_1e6, 1e-8);
}

TEST(Rates, PrivacyAmplificationIsNegativeForSmallEps) {
  EXPECT_NEAR(privacy_amplification_term(1e8, 1e-10), 2e-8 * std::log2(std::sqrt(2.0) * 1e-10),
              1e-22);
  EXPECT_LT(privacy_amplification_term(1e4, 0.5), 0.0);
}

TEST(Rates, EpsilonBudgets) {
  SecurityBudget b{1e-10, 2e-10, 3e-10, 4e-10};
  EXPECT_NEAR(epsilon_total(Method::FME, b), 6e-10, 1e-24);
  EXPECT_NEAR(epsilon_total(Method::AEP, b), 1e-9, 1e-24);
  EXPECT_NEAR(epsilon_total(Method::EUR, b), 1e-9, 1e-24);
  EXPECT_THROW(epsilon_total(Method::EUR, SecurityBudget{0.3, 0.3, 0.3, 0.3}), std::invalid_argument);
  EXPECT_NO_THROW(epsilon_total(Method::FME, SecurityBudget{0.3, 0.3, 0.3, 0.3}));
  b.eps_s = 0.0;
  EXPECT_THROW(epsilon_total(Method::AEP, b), std::invalid_argument);
}

TEST(Rates, InfeasibleIsTagged) {
  ProtocolConfig cfg = fig1_point();
  cfg.block_size_n = 200.0;
  cfg.estimation_fraction_f = 0.1;
  cfg.observed_qber = 0.3;
  for (Method m : kAllMethods) {
    const RatePoint r = evaluate_rate(m, cfg);
    EXPECT_FALSE(r.feasible);
    EXPECT_TRUE(std::isnan(r.raw_rate));
    EXPECT_EQ(r.clamped_rate, 0.0);
    EXPECT_GT(r.effective_qber, 0.5);
  }
}

TEST(Rates, NegativeRawIsPreserved) {
  ProtocolConfig cfg = fig1_point();
  cfg.observed_qber = 0.2;
  const RatePoint r = rate_eur(cfg);
  EXPECT_TRUE(r.feasible);
  EXPECT_LT(r.raw_rate, 0.0);
  EXPECT_EQ(r.clamped_rate, 0.0);
}

TEST(Rates, MethodNames) {
  for (Method m : kAllMethods) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_EQ(parse_method("eur"), Method::EUR);
  EXPECT_THROW(parse_method("renyi"), std::invalid_argument);
}

TEST(Asymptotic, Thresholds) {
  const double eta = transmittance({0.2, 10.0});
  const double t_eur = expected::kAsymptoticThresholdEur;
  const double t_fme = expected::kAsymptoticThresholdFme;
  for (Method m : {Method::EUR, Method::AEP}) {
    EXPECT_GT(rate_asymptotic(m, t_eur - 1e-6, eta, 1.0), 0.0);
    EXPECT_LT(rate_asymptotic(m, t_eur + 1e-6, eta, 1.0), 0.0);
  }
  EXPECT_GT(rate_asymptotic(Method::FME, t_fme - 1e-6, eta, 1.0), 0.0);
  EXPECT_LT(rate_asymptotic(Method::FME, t_fme + 1e-6, eta, 1.0), 0.0);
  const RatePoint pt = asymptotic_point(Method::EUR, 0.05, eta, 1.0, SecurityBudget{});
  EXPECT_TRUE(std::isinf(pt.n_key));
  EXPECT_EQ(pt.delta, 0.0);
}

// Properties.

TEST(RatesProperty, EurMinusAepIsTheAepCorrection) {
  testing::Gen gen(31);
  for (int i = 0; i < 1000; ++i) {
    const ProtocolConfig cfg = gen.feasible_config();
    const double eta = transmittance(cfg.channel);
    const double expected_gap = std::sqrt(eta * (1.0 - cfg.estimation_fraction_f) / cfg.block_size_n) *
                                delta_aep(cfg.budget.eps_s);
    const double gap = rate_eur(cfg).raw_rate - rate_aep(cfg).raw_rate;
    ASSERT_NEAR(gap, expected_gap, 1e-12) << "sample " << i;
    ASSERT_GE(gap, 0.0);
  }
}

TEST(RatesProperty, NonincreasingInQber) {
  testing::Gen gen(32);
  for (int i = 0; i < 300; ++i) {
    ProtocolConfig cfg = gen.feasible_config();
    const double q0 = cfg.observed_qber;
    for (Method m : kAllMethods) {
      cfg.observed_qber = q0;
      const RatePoint lo = evaluate_rate(m, cfg);
      cfg.observed_qber = q0 + gen.uniform(0.0, 0.5 - lo.effective_qber);
      const RatePoint hi = evaluate_rate(m, cfg);
      ASSERT_TRUE(hi.feasible);
      ASSERT_LE(hi.raw_rate, lo.raw_rate + 1e-15);
    }
  }
}

TEST(RatesProperty, NondecreasingInBlockSize) {
  testing::Gen gen(33);
  for (int i = 0; i < 300; ++i) {
    ProtocolConfig cfg = gen.feasible_config();
    const double n0 = cfg.block_size_n;
    for (Method m : kAllMethods) {
      cfg.block_size_n = n0;
      const RatePoint small = evaluate_rate(m, cfg);
      cfg.block_size_n = n0 * gen.uniform(1.0, 100.0);
      const RatePoint large = evaluate_rate(m, cfg);
      ASSERT_GE(large.raw_rate, small.raw_rate - 1e-15);
    }
  }
}

TEST(RatesProperty, AsymptoticRateProportionalToEta) {
  testing::Gen gen(34);
  for (int i = 0; i < 1000; ++i) {
    const double p = gen.uniform(0.0, 0.5);
    const double eta = gen.uniform(1e-3, 1.0);
    const double c = gen.uniform(0.0, 1.0 / eta);
    const double gamma = gen.uniform(1.0, 1.5);
    for (Method m : kAllMethods) {
      const double base = rate_asymptotic(m, p, eta, gamma);
      ASSERT_NEAR(rate_asymptotic(m, p, c * eta, gamma), c * base, 1e-14);
    }
  }
}

TEST(RatesProperty, EurDominatesOnQuarterGrid) {
  for (double q : lin_space(0.0, 0.2, 41)) {
    for (double n : {1e6, 1e8, 1e10}) {
      ProtocolConfig cfg = fig1_point();
      cfg.observed_qber = q;
      cfg.block_size_n = n;
      if (estimate(cfg).effective_qber > 0.25) continue;
      const double eur = rate_eur(cfg).raw_rate;
      EXPECT_GE(eur, rate_aep(cfg).raw_rate);
      EXPECT_GE(eur, rate_fme(cfg).raw_rate);
    }
  }
}

}  // namespace
}  // namespace qkdrate
