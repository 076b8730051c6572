#pragma once

// Estimation-fraction optimization, QBER thresholds and parameter sweeps.

#include "qkdrate/model.hpp"
#include "qkdrate/rates.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace qkdrate {

/// Everything except the block size, QBER and estimation fraction.
struct Environment {
  ChannelModel channel{};
  SecurityBudget budget{};
  double gamma = 1.0;
  DeltaVariant delta_variant = DeltaVariant::MainText;
  /// When set, f is held at this value instead of being optimized.
  std::optional<double> fixed_f;
};

ProtocolConfig make_config(const Environment& env, double block_size_n, double qber,
                           double estimation_fraction);

struct FSearchOptions {
  double f_min = 1e-4;
  double f_max = 0.5;
  int coarse_points = 200;
};

struct OptimizedRate {
  double f_opt = 0.0;
  RatePoint rate{};  // rate.feasible is false when no f in range is feasible
};

/// Maximizes the rate over f in [f_min, f_max]: a log-spaced coarse grid,
/// then golden-section refinement (in log f) on the bracket around the best
/// grid point. The f field of cfg_template is ignored.
OptimizedRate optimize_f(Method method, const ProtocolConfig& cfg_template,
                         const FSearchOptions& options = {});

/// optimize_f, or a plain evaluation at env.fixed_f when that is set.
OptimizedRate best_rate(Method method, const Environment& env, double block_size_n, double qber,
                        const FSearchOptions& options = {});

/// Thrown when a method yields no key even at QBER 0.
class NoKeyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ThresholdResult {
  Method method = Method::EUR;
  double threshold_qber = 0.0;  // largest probed QBER with a positive rate
  double bracket_width = 0.0;
  std::optional<double> at_block_size;  // nullopt: asymptotic
};

/// Bisection on the observed QBER over [0, 1/2] for the boundary of the
/// positive-rate region, optimizing f at every probe. block_size == nullopt
/// uses the asymptotic rate. Throws NoKeyError when the rate at QBER 0 is
/// not positive.
ThresholdResult qber_threshold(Method method, std::optional<double> block_size,
                               const Environment& env, double bracket_width = 1e-4,
                               const FSearchOptions& options = {});

enum class SweepAxis { BlockSize, Qber };

struct SweepSpec {
  std::vector<Method> methods;
  SweepAxis axis = SweepAxis::BlockSize;
  std::vector<double> grid;
  Environment env{};
  double block_size_n = 1e5;  // used when sweeping QBER
  double qber = 0.03;         // used when sweeping block size
  bool asymptotic = false;    // QBER sweeps only: use the N -> infinity rate
  FSearchOptions f_search{};
  unsigned workers = 1;
};

struct SweepRow {
  double axis_value = 0.0;
  RatePoint rate{};
  double f_opt = 0.0;
};

/// Throws std::invalid_argument for an empty method set, an empty or
/// non-increasing grid, or asymptotic block-size sweeps.
void validate(const SweepSpec& spec);

/// One row per (grid value, method), grid-major then method-major. Cells may
/// be computed on several workers; the output order does not depend on it.
std::vector<SweepRow> sweep(const SweepSpec& spec);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct CrossoverOptions {
  int scan_points = 200;
  double relative_width = 0.01;
  FSearchOptions f_search{};
};

/// Largest sub-interval of [n_lo, n_hi] on which the FME rate strictly
/// exceeds the AEP rate (both clamped, f optimized unless env.fixed_f),
/// located on a log-spaced scan and refined at its ends by bisection.
std::optional<Interval> crossover_window(double qber, double n_lo, double n_hi,
                                         const Environment& env,
                                         const CrossoverOptions& options = {});

}  // namespace qkdrate
