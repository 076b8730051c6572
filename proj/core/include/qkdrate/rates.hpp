#pragma once

// Finite-size secret-key rates for entanglement-based BB84 under collective
// attacks, in secret bits per transmitted signal.
//
// All three bounds share the same bookkeeping: eta f N signals estimate the
// QBER, the remaining n = eta (1-f) N produce key, error correction leaks
// gamma n h2(q_eff) bits, and privacy amplification costs 2 log2(sqrt(2) eps_h).
// They differ in how the entropy of Bob's key given Eve is bounded:
//
//   FME  n [-log2 P_g(q_eff)]             (min-entropy via guessing probability)
//   AEP  n [1 - h2(q_eff)] - sqrt(n) Delta(eps_s)
//   EUR  n [1 - h2(q_eff)]                 (uncertainty relation)

#include "qkdrate/model.hpp"

#include <array>
#include <string_view>

namespace qkdrate {

enum class Method { FME, AEP, EUR };

inline constexpr std::array<Method, 3> kAllMethods{Method::FME, Method::AEP, Method::EUR};

std::string_view to_string(Method m);
/// Accepts "FME", "AEP", "EUR" (case-insensitive).
Method parse_method(std::string_view name);

struct RatePoint {
  Method method = Method::EUR;
  /// False when q_eff > 1/2: the estimate cannot bound the QBER away from
  /// 1/2 and no rate is defined. raw_rate and leak_per_signal are NaN then.
  bool feasible = true;
  double raw_rate = 0.0;
  double clamped_rate = 0.0;  // max(raw_rate, 0), 0 if infeasible
  double effective_qber = 0.0;
  double delta = 0.0;
  double leak_per_signal = 0.0;
  double epsilon_total = 0.0;
  double n_key = 0.0;  // eta (1-f) N; +inf in the asymptotic limit
  double estimation_fraction = 0.0;
};

/// Total bits disclosed by error correction, gamma eta (1-f) N h2(q_eff).
double ec_leakage(const ProtocolConfig& cfg, double effective_qber);

/// 4 log2(2 + sqrt 2) sqrt(log2(2 / eps_s^2)). Defined for 0 < eps_s <= sqrt 2
/// (eps_s = sqrt 2 gives 0); throws std::invalid_argument otherwise.
double delta_aep(double eps_s);

/// (2/N) log2(sqrt(2) eps_h), negative for eps_h < 1/sqrt 2.
double privacy_amplification_term(double block_size_n, double eps_h);

/// Failure probability of the composed protocol. FME omits eps_s.
/// Throws std::invalid_argument for an invalid component or a sum >= 1.
double epsilon_total(Method method, const SecurityBudget& budget);

RatePoint rate_fme(const ProtocolConfig& cfg);
RatePoint rate_aep(const ProtocolConfig& cfg);
RatePoint rate_eur(const ProtocolConfig& cfg);
RatePoint evaluate_rate(Method method, const ProtocolConfig& cfg);

/// N -> infinity limit (f -> 0, delta -> 0):
///   AEP, EUR: eta [1 - (1 + gamma) h2(p)]
///   FME:      eta [-log2(1/2 + sqrt(p(1-p))) - gamma h2(p)]
double rate_asymptotic(Method method, double p, double eta, double gamma);

/// rate_asymptotic packaged as a RatePoint (delta 0, n_key +inf).
RatePoint asymptotic_point(Method method, double p, double eta, double gamma,
                           const SecurityBudget& budget);

}  // namespace qkdrate
