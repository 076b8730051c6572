#pragma once

// Physical and statistical primitives shared by every key-rate bound:
// channel loss, binary entropy, and the parameter-estimation confidence
// interval on the QBER.

#include <cstdint>
#include <string_view>

namespace qkdrate {

/// Fiber link. Loss is modelled as a pure attenuation in dB/km.
struct ChannelModel {
  double attenuation_db_per_km = 0.2;
  double distance_km = 0.0;
};

/// Failure probabilities of the four post-processing steps.
struct SecurityBudget {
  double eps_pe = 1e-10;  // parameter estimation
  double eps_ec = 1e-10;  // error correction
  double eps_h = 1e-10;   // privacy amplification (leftover hash)
  double eps_s = 1e-10;   // smoothing (AEP and EUR only)
};

/// Which Hoeffding-type confidence interval to use for the QBER bound.
///   MainText:  delta = sqrt(ln(1/eps_pe) / m)
///   Appendix:  delta = sqrt(ln(1/eps_pe) / (2 m))
enum class DeltaVariant { MainText, Appendix };

std::string_view to_string(DeltaVariant v);
DeltaVariant parse_delta_variant(std::string_view name);

struct ProtocolConfig {
  double block_size_n = 1e8;             // transmitted signals N
  double estimation_fraction_f = 0.01;   // fraction of detections disclosed
  double reconciliation_gamma = 1.0;     // leak = gamma * h2 per key bit
  double observed_qber = 0.0;
  ChannelModel channel{};
  SecurityBudget budget{};
  DeltaVariant delta_variant = DeltaVariant::MainText;
};

/// Result of the parameter-estimation step.
struct EstimationOutcome {
  double sample_size_m = 0.0;
  double empirical_qber = 0.0;
  double delta = 0.0;
  double effective_qber = 0.0;  // empirical_qber + delta
};

/// eta = 10^(-a d / 10).
double transmittance(const ChannelModel& channel);

/// h2(p) = -p log2 p - (1-p) log2 (1-p), with h2(0) = h2(1) = 0.
/// Throws std::invalid_argument outside [0, 1].
double binary_entropy(double p);

/// error_count / m. Throws if error_count > m or m <= 0.
double qber_estimate(std::uint64_t error_count, double sample_size_m);

/// Width of the one-sided confidence interval on the QBER.
/// Throws std::invalid_argument for m <= 0 or eps_pe outside (0, 1).
double hoeffding_delta(double sample_size_m, double eps_pe,
                       DeltaVariant variant = DeltaVariant::MainText);

/// Signals disclosed for estimation, m = eta f N (kept real-valued).
double estimation_sample_size(const ProtocolConfig& cfg);

/// Signals used for key generation, n = eta (1-f) N.
double key_sample_size(const ProtocolConfig& cfg);

/// Runs parameter estimation on cfg.observed_qber, treated as the empirical
/// QBER of an eta f N sample.
EstimationOutcome estimate(const ProtocolConfig& cfg);

/// Checks every field of cfg; throws std::invalid_argument naming the field.
/// Does not check feasibility of the effective QBER.
void validate(const ProtocolConfig& cfg);
void validate(const ChannelModel& channel);
void validate(const SecurityBudget& budget);

}  // namespace qkdrate
