#include "qkdrate/optimize.hpp"

#include "qkdrate/search.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

namespace qkdrate {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Raw rate as an objective: infeasible points and f values leaving fewer
// than one estimation sample rank below every feasible point.
double objective(Method method, ProtocolConfig cfg, double f) {
  cfg.estimation_fraction_f = f;
  if (estimation_sample_size(cfg) < 1.0) return kNegInf;
  const RatePoint r = evaluate_rate(method, cfg);
  return r.feasible ? r.raw_rate : kNegInf;
}

}  // namespace

ProtocolConfig make_config(const Environment& env, double block_size_n, double qber,
                           double estimation_fraction) {
  ProtocolConfig cfg;
  cfg.block_size_n = block_size_n;
  cfg.estimation_fraction_f = estimation_fraction;
  cfg.reconciliation_gamma = env.gamma;
  cfg.observed_qber = qber;
  cfg.channel = env.channel;
  cfg.budget = env.budget;
  cfg.delta_variant = env.delta_variant;
  return cfg;
}

OptimizedRate optimize_f(Method method, const ProtocolConfig& cfg_template,
                         const FSearchOptions& options) {
  if (!(options.f_min > 0.0 && options.f_max < 1.0 && options.f_min < options.f_max) ||
      options.coarse_points < 3) {
    throw std::invalid_argument("optimize_f: invalid f search interval");
  }
  const std::vector<double> grid =
      log_space(options.f_min, options.f_max, static_cast<std::size_t>(options.coarse_points));

  std::size_t best = 0;
  double best_value = kNegInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = objective(method, cfg_template, grid[i]);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }

  OptimizedRate out;
  ProtocolConfig cfg = cfg_template;
  if (best_value == kNegInf) {
    cfg.estimation_fraction_f = options.f_max;
    out.f_opt = options.f_max;
    out.rate = evaluate_rate(method, cfg);
    return out;
  }

  double f_best = grid[best];
  const double lo = std::log(grid[best == 0 ? 0 : best - 1]);
  const double hi = std::log(grid[std::min(best + 1, grid.size() - 1)]);
  const ScalarMax refined = golden_section_maximize(
      [&](double log_f) { return objective(method, cfg_template, std::exp(log_f)); }, lo, hi,
      1e-10);
  if (refined.value > best_value) f_best = std::exp(refined.x);

  cfg.estimation_fraction_f = f_best;
  out.f_opt = f_best;
  out.rate = evaluate_rate(method, cfg);
  return out;
}

OptimizedRate best_rate(Method method, const Environment& env, double block_size_n, double qber,
                        const FSearchOptions& options) {
  if (env.fixed_f) {
    const ProtocolConfig cfg = make_config(env, block_size_n, qber, *env.fixed_f);
    return {*env.fixed_f, evaluate_rate(method, cfg)};
  }
  return optimize_f(method, make_config(env, block_size_n, qber, options.f_max), options);
}

ThresholdResult qber_threshold(Method method, std::optional<double> block_size,
                               const Environment& env, double bracket_width,
                               const FSearchOptions& options) {
  if (!(bracket_width > 0.0)) throw std::invalid_argument("bracket width must be positive");

  auto positive = [&](double qber) {
    if (!block_size) {
      return rate_asymptotic(method, qber, transmittance(env.channel), env.gamma) > 0.0;
    }
    return best_rate(method, env, *block_size, qber, options).rate.clamped_rate > 0.0;
  };

  ThresholdResult out;
  out.method = method;
  out.at_block_size = block_size;
  if (!positive(0.0)) {
    throw NoKeyError(std::string(to_string(method)) + ": no positive key rate at QBER 0");
  }
  if (positive(0.5)) {
    out.threshold_qber = 0.5;
    return out;
  }
  const Bracket b = bisect_boundary(positive, 0.0, 0.5, bracket_width);
  out.threshold_qber = b.lo;
  out.bracket_width = b.width();
  return out;
}

void validate(const SweepSpec& spec) {
  if (spec.methods.empty()) throw std::invalid_argument("methods: at least one method required");
  if (spec.grid.empty()) throw std::invalid_argument("grid: at least one point required");
  for (std::size_t i = 1; i < spec.grid.size(); ++i) {
    if (!(spec.grid[i] > spec.grid[i - 1])) {
      throw std::invalid_argument("grid: values must be strictly increasing");
    }
  }
  if (spec.asymptotic && spec.axis == SweepAxis::BlockSize) {
    throw std::invalid_argument("asymptotic: not meaningful for a block-size sweep");
  }
}

std::vector<SweepRow> sweep(const SweepSpec& spec) {
  validate(spec);
  const std::size_t n_methods = spec.methods.size();
  std::vector<SweepRow> rows(spec.grid.size() * n_methods);

  auto cell = [&](std::size_t index) {
    const double x = spec.grid[index / n_methods];
    const Method method = spec.methods[index % n_methods];
    SweepRow row;
    row.axis_value = x;
    if (spec.asymptotic) {
      row.rate = asymptotic_point(method, x, transmittance(spec.env.channel), spec.env.gamma,
                                  spec.env.budget);
      row.f_opt = 0.0;
    } else {
      const double n = spec.axis == SweepAxis::BlockSize ? x : spec.block_size_n;
      const double q = spec.axis == SweepAxis::Qber ? x : spec.qber;
      const OptimizedRate best = best_rate(method, spec.env, n, q, spec.f_search);
      row.rate = best.rate;
      row.f_opt = best.f_opt;
    }
    rows[index] = row;
  };

  const unsigned workers = std::max(1u, spec.workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) cell(i);
    return rows;
  }
  // Strided partition; every cell writes only its own slot.
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < rows.size(); i += workers) cell(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::optional<Interval> crossover_window(double qber, double n_lo, double n_hi,
                                         const Environment& env,
                                         const CrossoverOptions& options) {
  if (!(n_lo > 0.0 && n_hi > n_lo)) throw std::invalid_argument("crossover_window: bad N range");

  auto fme_wins = [&](double n) {
    const double fme = best_rate(Method::FME, env, n, qber, options.f_search).rate.clamped_rate;
    const double aep = best_rate(Method::AEP, env, n, qber, options.f_search).rate.clamped_rate;
    return fme > aep;
  };

  const std::vector<double> grid =
      log_space(n_lo, n_hi, static_cast<std::size_t>(std::max(options.scan_points, 2)));
  std::vector<bool> wins(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) wins[i] = fme_wins(grid[i]);

  // Longest run of consecutive wins; the earliest one on ties.
  std::size_t best_start = 0;
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < grid.size();) {
    if (!wins[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < grid.size() && wins[j]) ++j;
    if (j - i > best_len) {
      best_len = j - i;
      best_start = i;
    }
    i = j;
  }
  if (best_len == 0) return std::nullopt;

  const double log_width = std::log10(1.0 + options.relative_width);
  const std::size_t first = best_start;
  const std::size_t last = best_start + best_len - 1;

  Interval window{grid[first], grid[last]};
  if (first > 0) {
    const Bracket b = bisect_boundary(
        [&](double log_n) { return !fme_wins(std::pow(10.0, log_n)); },
        std::log10(grid[first - 1]), std::log10(grid[first]), log_width);
    window.lo = std::pow(10.0, b.hi);
  }
  if (last + 1 < grid.size()) {
    const Bracket b = bisect_boundary(
        [&](double log_n) { return fme_wins(std::pow(10.0, log_n)); }, std::log10(grid[last]),
        std::log10(grid[last + 1]), log_width);
    window.hi = std::pow(10.0, b.lo);
  }
  return window;
}

}  // namespace qkdrate
