#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace gpseries {

// Bessel order restricted to the range the expansions use.
struct BesselOrder {
  double nu;
  explicit BesselOrder(double order);
};

struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  std::size_t max_panels = std::size_t(1) << 20;

  void validate() const;
};

// Bessel function of the first kind, real order, x >= 0.
//
// Three branches: ascending series for x < 10, a quadrature of the Schlaefli
// integral representation for 10 <= x < 30, and the Hankel large-argument
// expansion (five terms in each modulus series) for x >= 30. Half-integer
// orders short-circuit to their trigonometric closed forms. The branch
// boundaries are chosen so adjacent branches agree to better than 1e-12 on an
// overlap interval; absolute accuracy is ~1e-13 across 0 <= x <= 1e4 for
// |order| < 1. Orders in (-2,2) are accepted so the zero finder can form
// derivatives J_{nu-1} - J_{nu+1}.
double bessel_j(double nu, double x);
double bessel_j(BesselOrder nu, double x);

// First `count` positive zeros, strictly increasing, each with
// |J_nu(zero)| <= 1e-10. McMahon initializer + safeguarded Newton with a
// scan-and-bisect fallback; throws NumericalError when a zero cannot be
// certified.
std::vector<double> bessel_positive_zeros(BesselOrder nu, std::size_t count);

// Adaptive Gauss-Kronrod 7/15 on [a,b]; err_out (if given) receives the
// accumulated error estimate.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, const QuadratureConfig& cfg = {},
                          double* err_out = nullptr);

// Fourier cosine coefficients of an even function gamma on [-T, T]:
//   j = 0:  (1/T) Int_0^T gamma
//   j >= 1: (2/T) Int_0^T gamma(t) cos(pi j t / T) dt
// Panel boundaries are forced onto every zero of the cosine factor (j+1
// mandatory panels) so no panel spans an oscillation; each panel is then
// refined adaptively.
double fourier_cosine_coefficient(const std::function<double(double)>& gamma,
                                  double T, std::size_t j,
                                  const QuadratureConfig& cfg = {});

// Fourier cosine coefficients for j = 0..count-1, optionally computed on
// several threads (0 = hardware concurrency). Results are identical to the
// sequential loop for any thread count.
std::vector<double> fourier_cosine_coefficients(
    const std::function<double(double)>& gamma, double T, std::size_t count,
    const QuadratureConfig& cfg = {}, unsigned threads = 1);

}  // namespace gpseries
