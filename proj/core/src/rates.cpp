#include "qkdrate/rates.hpp"

#include "qkdrate/guessing.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qkdrate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Ingredients common to all three finite-size bounds.
struct Bookkeeping {
  double key_fraction = 0.0;  // eta (1 - f)
  double n_key = 0.0;
  EstimationOutcome estimation{};
  double pa_term = 0.0;
  bool feasible = true;
};

Bookkeeping prepare(const ProtocolConfig& cfg) {
  validate(cfg);
  Bookkeeping b;
  b.key_fraction = transmittance(cfg.channel) * (1.0 - cfg.estimation_fraction_f);
  b.n_key = key_sample_size(cfg);
  b.estimation = estimate(cfg);
  b.pa_term = privacy_amplification_term(cfg.block_size_n, cfg.budget.eps_h);
  b.feasible = b.estimation.effective_qber <= 0.5;
  return b;
}

RatePoint make_point(Method method, const ProtocolConfig& cfg, const Bookkeeping& b) {
  RatePoint r;
  r.method = method;
  r.feasible = b.feasible;
  r.effective_qber = b.estimation.effective_qber;
  r.delta = b.estimation.delta;
  r.epsilon_total = epsilon_total(method, cfg.budget);
  r.n_key = b.n_key;
  r.estimation_fraction = cfg.estimation_fraction_f;
  if (!b.feasible) {
    r.raw_rate = kNaN;
    r.clamped_rate = 0.0;
    r.leak_per_signal = kNaN;
  } else {
    r.leak_per_signal =
        cfg.reconciliation_gamma * b.key_fraction * binary_entropy(b.estimation.effective_qber);
  }
  return r;
}

void finish(RatePoint& r, double raw) {
  if (!r.feasible) return;
  r.raw_rate = raw;
  r.clamped_rate = std::max(raw, 0.0);
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::FME: return "FME";
    case Method::AEP: return "AEP";
    case Method::EUR: return "EUR";
  }
  return "EUR";
}

Method parse_method(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "FME") return Method::FME;
  if (upper == "AEP") return Method::AEP;
  if (upper == "EUR") return Method::EUR;
  throw std::invalid_argument("unknown method \"" + std::string(name) +
                              "\" (expected FME, AEP or EUR)");
}

double ec_leakage(const ProtocolConfig& cfg, double effective_qber) {
  if (!(effective_qber >= 0.0 && effective_qber <= 0.5)) {
    throw std::invalid_argument("ec_leakage: effective QBER must lie in [0, 1/2]");
  }
  return cfg.reconciliation_gamma * key_sample_size(cfg) * binary_entropy(effective_qber);
}

double delta_aep(double eps_s) {
  if (!(eps_s > 0.0 && eps_s <= std::sqrt(2.0))) {
    throw std::invalid_argument("delta_aep: eps_s must lie in (0, sqrt 2]");
  }
  const double log_arg = std::max(std::log2(2.0 / (eps_s * eps_s)), 0.0);
  return 4.0 * std::log2(2.0 + std::sqrt(2.0)) * std::sqrt(log_arg);
}

double privacy_amplification_term(double block_size_n, double eps_h) {
  return 2.0 / block_size_n * std::log2(std::sqrt(2.0) * eps_h);
}

double epsilon_total(Method method, const SecurityBudget& budget) {
  auto check = [](double eps, const char* name) {
    if (!(eps > 0.0 && eps < 1.0)) {
      throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
    }
  };
  check(budget.eps_pe, "eps_pe");
  check(budget.eps_ec, "eps_ec");
  check(budget.eps_h, "eps_h");
  double total = budget.eps_h + budget.eps_ec + budget.eps_pe;
  if (method != Method::FME) {
    check(budget.eps_s, "eps_s");
    total += budget.eps_s;
  }
  if (!(total < 1.0)) {
    throw std::invalid_argument("total failure probability must be < 1");
  }
  return total;
}

RatePoint rate_fme(const ProtocolConfig& cfg) {
  const Bookkeeping b = prepare(cfg);
  RatePoint r = make_point(Method::FME, cfg, b);
  if (r.feasible) {
    const double q = b.estimation.effective_qber;
    const double min_entropy = -std::log2(pg_closed_form(q));
    finish(r, b.key_fraction * (min_entropy - cfg.reconciliation_gamma * binary_entropy(q)) +
                  b.pa_term);
  }
  return r;
}

RatePoint rate_eur(const ProtocolConfig& cfg) {
  const Bookkeeping b = prepare(cfg);
  RatePoint r = make_point(Method::EUR, cfg, b);
  if (r.feasible) {
    const double h = binary_entropy(b.estimation.effective_qber);
    finish(r, b.key_fraction * (1.0 - (1.0 + cfg.reconciliation_gamma) * h) + b.pa_term);
  }
  return r;
}

RatePoint rate_aep(const ProtocolConfig& cfg) {
  const Bookkeeping b = prepare(cfg);
  RatePoint r = make_point(Method::AEP, cfg, b);
  if (r.feasible) {
    const double h = binary_entropy(b.estimation.effective_qber);
    const double correction =
        std::sqrt(b.key_fraction / cfg.block_size_n) * delta_aep(cfg.budget.eps_s);
    finish(r, b.key_fraction * (1.0 - (1.0 + cfg.reconciliation_gamma) * h) - correction +
                  b.pa_term);
  }
  return r;
}

RatePoint evaluate_rate(Method method, const ProtocolConfig& cfg) {
  switch (method) {
    case Method::FME: return rate_fme(cfg);
    case Method::AEP: return rate_aep(cfg);
    case Method::EUR: return rate_eur(cfg);
  }
  throw std::invalid_argument("evaluate_rate: unknown method");
}

double rate_asymptotic(Method method, double p, double eta, double gamma) {
  if (!(p >= 0.0 && p <= 0.5)) {
    throw std::invalid_argument("rate_asymptotic: QBER must lie in [0, 1/2]");
  }
  const double h = binary_entropy(p);
  if (method == Method::FME) {
    return eta * (-std::log2(pg_closed_form(p)) - gamma * h);
  }
  return eta * (1.0 - (1.0 + gamma) * h);
}

RatePoint asymptotic_point(Method method, double p, double eta, double gamma,
                           const SecurityBudget& budget) {
  RatePoint r;
  r.method = method;
  r.feasible = true;
  r.raw_rate = rate_asymptotic(method, p, eta, gamma);
  r.clamped_rate = std::max(r.raw_rate, 0.0);
  r.effective_qber = p;
  r.delta = 0.0;
  r.leak_per_signal = gamma * eta * binary_entropy(p);
  r.epsilon_total = epsilon_total(method, budget);
  r.n_key = std::numeric_limits<double>::infinity();
  r.estimation_fraction = 0.0;
  return r;
}

}  // namespace qkdrate
