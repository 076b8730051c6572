#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace qkdrate {

struct ScalarMax {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal fn on [lo, hi].
/// The endpoints are evaluated too, so a monotone fn returns its boundary.
template <class Fn>
ScalarMax golden_section_maximize(Fn&& fn, double lo, double hi, double x_tol = 1e-12,
                                  int max_iter = 300) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = fn(d);
    }
  }
  ScalarMax best = fc >= fd ? ScalarMax{c, fc} : ScalarMax{d, fd};
  for (double edge : {lo, hi}) {
    const double fe = fn(edge);
    if (fe > best.value) best = {edge, fe};
  }
  return best;
}

struct Bracket {
  double lo = 0.0;  // predicate holds
  double hi = 0.0;  // predicate fails
  double width() const { return hi - lo; }
};

/// Shrinks [lo, hi] around the point where pred switches from true to false.
/// Requires pred(lo) == true and pred(hi) == false.
template <class Pred>
Bracket bisect_boundary(Pred&& pred, double lo, double hi, double width) {
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

/// count points, log-uniform from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, std::size_t count);

/// count points, uniform from lo to hi inclusive.
std::vector<double> lin_space(double lo, double hi, std::size_t count);

}  // namespace qkdrate
