#include "qkdrate/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qkdrate {

namespace {

void require_probability(double eps, const char* field) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument(std::string(field) + " must lie in (0, 1), got " +
                                std::to_string(eps));
  }
}

}  // namespace

std::string_view to_string(DeltaVariant v) {
  switch (v) {
    case DeltaVariant::MainText: return "main";
    case DeltaVariant::Appendix: return "appendix";
  }
  return "main";
}

DeltaVariant parse_delta_variant(std::string_view name) {
  if (name == "main") return DeltaVariant::MainText;
  if (name == "appendix") return DeltaVariant::Appendix;
  throw std::invalid_argument("delta_variant must be \"main\" or \"appendix\", got \"" +
                              std::string(name) + "\"");
}

double transmittance(const ChannelModel& channel) {
  return std::pow(10.0, -channel.attenuation_db_per_km * channel.distance_km / 10.0);
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binary_entropy: p must lie in [0, 1], got " + std::to_string(p));
  }
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double qber_estimate(std::uint64_t error_count, double sample_size_m) {
  if (!(sample_size_m > 0.0)) {
    throw std::invalid_argument("qber_estimate: sample size must be positive");
  }
  if (static_cast<double>(error_count) > sample_size_m) {
    throw std::invalid_argument("qber_estimate: error count exceeds sample size");
  }
  return static_cast<double>(error_count) / sample_size_m;
}

double hoeffding_delta(double sample_size_m, double eps_pe, DeltaVariant variant) {
  if (!(sample_size_m > 0.0)) {
    throw std::invalid_argument("hoeffding_delta: sample size must be positive");
  }
  require_probability(eps_pe, "eps_pe");
  const double denom = variant == DeltaVariant::Appendix ? 2.0 * sample_size_m : sample_size_m;
  return std::sqrt(std::log(1.0 / eps_pe) / denom);
}

double estimation_sample_size(const ProtocolConfig& cfg) {
  return transmittance(cfg.channel) * cfg.estimation_fraction_f * cfg.block_size_n;
}

double key_sample_size(const ProtocolConfig& cfg) {
  return transmittance(cfg.channel) * (1.0 - cfg.estimation_fraction_f) * cfg.block_size_n;
}

EstimationOutcome estimate(const ProtocolConfig& cfg) {
  EstimationOutcome out;
  out.sample_size_m = estimation_sample_size(cfg);
  out.empirical_qber = cfg.observed_qber;
  out.delta = hoeffding_delta(out.sample_size_m, cfg.budget.eps_pe, cfg.delta_variant);
  out.effective_qber = out.empirical_qber + out.delta;
  return out;
}

void validate(const ChannelModel& channel) {
  if (!(channel.attenuation_db_per_km >= 0.0) || !std::isfinite(channel.attenuation_db_per_km)) {
    throw std::invalid_argument("attenuation_db_per_km must be finite and >= 0");
  }
  if (!(channel.distance_km >= 0.0) || !std::isfinite(channel.distance_km)) {
    throw std::invalid_argument("distance_km must be finite and >= 0");
  }
  if (!(transmittance(channel) > 0.0)) {
    throw std::invalid_argument("channel loss underflows: transmittance is 0");
  }
}

void validate(const SecurityBudget& budget) {
  require_probability(budget.eps_pe, "eps_pe");
  require_probability(budget.eps_ec, "eps_ec");
  require_probability(budget.eps_h, "eps_h");
  require_probability(budget.eps_s, "eps_s");
}

void validate(const ProtocolConfig& cfg) {
  validate(cfg.channel);
  validate(cfg.budget);
  if (!(cfg.block_size_n > 0.0) || !std::isfinite(cfg.block_size_n)) {
    throw std::invalid_argument("block_size must be finite and positive");
  }
  if (!(cfg.estimation_fraction_f > 0.0 && cfg.estimation_fraction_f < 1.0)) {
    throw std::invalid_argument("estimation_fraction must lie in (0, 1)");
  }
  if (!(cfg.reconciliation_gamma >= 1.0) || !std::isfinite(cfg.reconciliation_gamma)) {
    throw std::invalid_argument("gamma must be finite and >= 1");
  }
  if (!(cfg.observed_qber >= 0.0 && cfg.observed_qber <= 0.5)) {
    throw std::invalid_argument("qber must lie in [0, 0.5]");
  }
  if (!(estimation_sample_size(cfg) >= 1.0)) {
    throw std::invalid_argument(
        "estimation_fraction too small: eta * f * N must be at least one sample");
  }
}

}  // namespace qkdrate
