#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "gpseries/expansions.hpp"
#include "gpseries/kernels.hpp"

namespace gpseries {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string anchor;  // the identity or asymptote being checked
};

struct DiagnosticsReport {
  std::vector<CheckResult> checks;
  bool overall() const;
};

// max over grid x grid of |sum_{j<n} f_j(s) f_j(t) - C(s,t)|.
CheckResult check_covariance_reconstruction(const ExpansionFamily& family,
                                            const Grid& grid,
                                            std::size_t n_terms, double tol);

// Quadratic-form identity on random Dirac combinations: compares
// sum_j (sum_i a_i f_j(t_i))^2 with a' Gram a; measured is the worst
// relative gap over n_vectors draws.
CheckResult check_discrete_parseval(const ExpansionFamily& family,
                                    const Grid& grid, std::size_t n_terms,
                                    double tol, std::uint64_t seed = 7,
                                    std::size_t n_vectors = 20);

// Nystrom eigenvalues of (T/N) * Gram on an N-point grid, descending.
std::vector<double> nystrom_eigenvalues(const Kernel& kernel, std::size_t n);

// Ratio of Nystrom eigenvalues to the stationary high-frequency asymptote
// 2 T^{1+rho} pi c(rho) / (pi j)^{1+rho}, c(rho) = alpha Gamma(1+rho)
// sin(pi rho/2) / pi; measured is the worst |ratio - 1| for j in
// [j_lo, j_hi]. Kernel must be fractional OU (or plain OU, taken as rho=1).
CheckResult check_eigenvalue_asymptotics(const Kernel& kernel, std::size_t n,
                                         std::size_t j_lo, std::size_t j_hi,
                                         double tol = 0.10);

// Expected failure mode for rho in (1,2): some beta_j dips below -1e-12 and
// the large-j signs alternate like (-1)^{j+1}. Passes iff both hold.
CheckResult check_nonconvex_failure(double rho, double alpha, double T,
                                    std::size_t j_max,
                                    const QuadratureConfig& cfg = {});

// Log-log fit of sup bounds over the family's second half; passes iff the
// fitted exponent is at most -theta_claimed + 0.1.
CheckResult check_sup_norm_decay(const ExpansionFamily& family);

// H-norm of h on [0,T] for the exponential stationary kernel with index 1:
// (h(0)^2 + h(T)^2)/2 + (1/2 alpha) Int_0^T (h'^2 + alpha^2 h^2).
// The derivative is taken by high-order central differences.
double ou_h_norm_squared(const AnalyticTerm& h, double alpha, double T);

// Compares |f_{2j-1}|_H^2 of a rho=1 trigonometric frame against
// (1 - e^{-alpha T} (-1)^j)/2 for j = 1..j_max and checks every value < 1.
CheckResult check_ou_frame_h_norms(const ExpansionFamily& family,
                                   std::size_t j_max, double tol = 1e-6);

}  // namespace gpseries
