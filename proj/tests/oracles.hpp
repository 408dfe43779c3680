#pragma once

// Test-side oracles, kept independent of the library's own numerical paths:
// plain partial sums, composite Simpson quadrature, and interval bisection.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace oracles {

// Direct double loop; no Eigen, no shared code with the diagnostics.
inline double partial_sum_covariance(
    const std::function<double(std::size_t, double)>& term_value,
    std::size_t n_terms, double s, double t) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n_terms; ++j) {
    acc += term_value(j, s) * term_value(j, t);
  }
  return acc;
}

inline double simpson(const std::function<double(double)>& f, double a,
                      double b, std::size_t intervals) {
  if (intervals % 2 == 1) ++intervals;
  const double h = (b - a) / double(intervals);
  double acc = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i) {
    acc += f(a + double(i) * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

inline double bisect(const std::function<double(double)>& f, double lo,
                     double hi, int iterations = 200) {
  double flo = f(lo);
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if ((flo > 0.0) == (fmid > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracles
