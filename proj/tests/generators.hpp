#pragma once

// Seeded generators for the property tests.

#include "qkdrate/model.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace qkdrate::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  // Configurations whose effective QBER stays below 1/2.
  ProtocolConfig feasible_config() {
    for (;;) {
      ProtocolConfig cfg;
      cfg.block_size_n = log_uniform(1e4, 1e12);
      cfg.estimation_fraction_f = uniform(0.01, 0.5);
      cfg.reconciliation_gamma = uniform(1.0, 1.5);
      cfg.observed_qber = uniform(0.0, 0.2);
      cfg.channel.distance_km = uniform(0.0, 60.0);
      cfg.budget.eps_pe = log_uniform(1e-15, 1e-3);
      cfg.budget.eps_ec = log_uniform(1e-15, 1e-3);
      cfg.budget.eps_h = log_uniform(1e-15, 1e-3);
      cfg.budget.eps_s = log_uniform(1e-15, 1e-3);
      cfg.delta_variant = integer(0, 1) ? DeltaVariant::Appendix : DeltaVariant::MainText;
      const EstimationOutcome est = estimate(cfg);
      if (est.sample_size_m >= 1.0 && est.effective_qber <= 0.5) return cfg;
    }
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace qkdrate::testing
