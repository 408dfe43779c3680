#include "gpseries/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpseries/errors.hpp"
#include "gpseries/montecarlo.hpp"
#include "gpseries/specialfn.hpp"

namespace gpseries {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::vector<double> grid_points_1d(const Grid& grid) {
  if (grid.dim() != 1) {
    throw std::invalid_argument("this check expects a 1-D grid");
  }
  return grid.axis_points();
}

}  // namespace

bool DiagnosticsReport::overall() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

CheckResult check_covariance_reconstruction(const ExpansionFamily& family,
                                            const Grid& grid,
                                            std::size_t n_terms, double tol) {
  if (n_terms > family.size()) {
    throw std::invalid_argument("n_terms exceeds the family size");
  }
  double worst = 0.0;
  if (grid.dim() == 1) {
    const auto pts = grid_points_1d(grid);
    const Eigen::MatrixXd f =
        term_matrix(family, std::span<const double>(pts), n_terms);
    const Eigen::MatrixXd reconstructed = f.transpose() * f;
    const Eigen::MatrixXd exact =
        gram_matrix(family.kernel(), std::span<const double>(pts));
    worst = (reconstructed - exact).cwiseAbs().maxCoeff();
  } else {
    const std::size_t total = grid.total_points();
    std::vector<std::vector<double>> pts;
    pts.reserve(total);
    for (std::size_t i = 0; i < total; ++i) pts.push_back(grid.point_at(i));
    Eigen::MatrixXd f{static_cast<Eigen::Index>(n_terms),
                      static_cast<Eigen::Index>(total)};
    for (std::size_t j = 0; j < n_terms; ++j) {
      for (std::size_t i = 0; i < total; ++i) {
        f(Eigen::Index(j), Eigen::Index(i)) =
            family.term(j).evaluate(std::span<const double>(pts[i]));
      }
    }
    const Eigen::MatrixXd reconstructed = f.transpose() * f;
    const Eigen::MatrixXd exact =
        gram_matrix(family.kernel(), std::span<const std::vector<double>>(pts));
    worst = (reconstructed - exact).cwiseAbs().maxCoeff();
  }
  return {"covariance_reconstruction", worst <= tol, worst, tol,
          "sum_{j<n} f_j(s) f_j(t) -> C(s,t)"};
}

CheckResult check_discrete_parseval(const ExpansionFamily& family,
                                    const Grid& grid, std::size_t n_terms,
                                    double tol, std::uint64_t seed,
                                    std::size_t n_vectors) {
  if (n_terms > family.size()) {
    throw std::invalid_argument("n_terms exceeds the family size");
  }
  const auto pts = grid_points_1d(grid);
  const Eigen::MatrixXd f =
      term_matrix(family, std::span<const double>(pts), n_terms);
  const Eigen::MatrixXd gram =
      gram_matrix(family.kernel(), std::span<const double>(pts));
  const auto n_points = Eigen::Index(pts.size());
  double worst = 0.0;
  for (std::size_t v = 0; v < n_vectors; ++v) {
    NormalStream stream(seed, v);
    Eigen::VectorXd a(n_points);
    for (Eigen::Index i = 0; i < n_points; ++i) a(i) = stream.next();
    const double frame_side = (f * a).squaredNorm();
    const double kernel_side = a.dot(gram * a);
    const double gap =
        std::abs(frame_side - kernel_side) / std::max(kernel_side, 1e-300);
    worst = std::max(worst, gap);
  }
  return {"discrete_parseval", worst <= tol, worst, tol,
          "sum_j (u,f_j)^2 = (u, C u) on Dirac spans"};
}

std::vector<double> nystrom_eigenvalues(const Kernel& kernel, std::size_t n) {
  if (kernel.dim() != 1) {
    throw std::invalid_argument("Nystrom eigenvalues expect a 1-D kernel");
  }
  if (n < 2) throw std::invalid_argument("need n >= 2");
  const Grid grid(kernel.horizon(), n);
  const Eigen::MatrixXd gram = gram_matrix(kernel, grid);
  const double weight = kernel.horizon() / double(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.compute(weight * gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolve failed");
  }
  std::vector<double> lambda(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + n);
  std::sort(lambda.begin(), lambda.end(), std::greater<double>());
  return lambda;
}

namespace {

struct StationaryIndex {
  double rho;
  double alpha;
  double scale;  // variance multiplier in front of e^{-alpha |s-t|^rho}
};

StationaryIndex stationary_index(const Kernel& kernel) {
  if (const auto* fou = std::get_if<FractionalOUKernel>(&kernel.kind())) {
    return {fou->rho, fou->alpha, 1.0};
  }
  if (const auto* ou = std::get_if<OrnsteinUhlenbeckKernel>(&kernel.kind())) {
    const double sigma =
        ou->sigma > 0.0 ? ou->sigma : std::sqrt(2.0 * ou->alpha);
    return {1.0, ou->alpha, sigma * sigma / (2.0 * ou->alpha)};
  }
  throw std::invalid_argument(
      "eigenvalue asymptote needs an exponential stationary kernel");
}

}  // namespace

CheckResult check_eigenvalue_asymptotics(const Kernel& kernel, std::size_t n,
                                         std::size_t j_lo, std::size_t j_hi,
                                         double tol) {
  if (j_lo < 1 || j_hi < j_lo) throw std::invalid_argument("bad j range");
  if (n < 4 * j_hi) {
    throw std::invalid_argument("grid too coarse for the requested j range");
  }
  const auto [rho, alpha, scale] = stationary_index(kernel);
  const double T = kernel.horizon();
  const auto lambda = nystrom_eigenvalues(kernel, n);
  const double c_rho = alpha * std::tgamma(1.0 + rho) * std::sin(kPi * rho / 2.0) / kPi;
  double worst = 0.0;
  for (std::size_t j = j_lo; j <= j_hi; ++j) {
    const double asymptote = scale * 2.0 * std::pow(T, 1.0 + rho) * kPi * c_rho /
                             std::pow(kPi * double(j), 1.0 + rho);
    const double ratio = lambda[j - 1] / asymptote;
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  return {"eigenvalue_asymptotics", worst <= tol, worst, tol,
          "lambda_j ~ 2 T^{1+rho} pi c(rho) (pi j)^{-(1+rho)}"};
}

CheckResult check_nonconvex_failure(double rho, double alpha, double T,
                                    std::size_t j_max,
                                    const QuadratureConfig& cfg) {
  if (!(rho > 1.0 && rho < 2.0)) {
    // Boundary and convex cases are allowed through so callers can watch the
    // check report "no failure found"; they simply never pass.
    if (!(rho > 0.0 && rho < 2.0)) {
      throw std::invalid_argument("rho must lie in (0,2)");
    }
  }
  if (j_max < 20) throw std::invalid_argument("need j_max >= 20");
  const auto gamma = [alpha, rho](double t) {
    return std::exp(-alpha * std::pow(std::abs(t), rho));
  };
  const auto beta = fourier_cosine_coefficients(gamma, T, j_max + 1, cfg);
  double most_negative = 0.0;
  for (double b : beta) most_negative = std::min(most_negative, b);
  const bool has_negative = most_negative < -1e-12;

  // Sign alternation (-1)^{j+1} over the top decade of j.
  std::size_t agree = 0, total = 0;
  for (std::size_t j = (j_max * 9) / 10 + 1; j <= j_max; ++j) {
    const double expected_sign = (j % 2 == 0) ? -1.0 : 1.0;
    if (beta[j] * expected_sign > 0.0) ++agree;
    ++total;
  }
  const bool alternating = total > 0 && 2 * agree > total;
  return {"nonconvex_failure", has_negative && alternating, most_negative,
          -1e-12, "beta_j < 0 occurs for rho in (1,2), signs ~ (-1)^{j+1}"};
}

CheckResult check_sup_norm_decay(const ExpansionFamily& family) {
  if (family.size() < 16) {
    throw std::invalid_argument("sup-norm decay fit needs >= 16 terms");
  }
  if (!family.rate_params()) {
    throw std::invalid_argument("family carries no claimed rate parameters");
  }
  const double theta = family.rate_params()->theta;
  const std::size_t lo = family.size() / 2;
  double mx = 0.0, my = 0.0;
  std::size_t m = 0;
  for (std::size_t j = lo; j < family.size(); ++j) {
    mx += std::log(double(j + 1));
    my += std::log(family.term(j).sup_bound());
    ++m;
  }
  mx /= double(m);
  my /= double(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = lo; j < family.size(); ++j) {
    const double dx = std::log(double(j + 1)) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(family.term(j).sup_bound()) - my);
  }
  const double slope = sxy / sxx;
  const double threshold = -theta + 0.1;
  return {"sup_norm_decay", slope <= threshold, slope, threshold,
          "sup|f_j| <= c j^{-theta} log(1+j)^gamma"};
}

namespace {

double derivative_5pt(const AnalyticTerm& h, double t, double step) {
  return (-h.evaluate(t + 2.0 * step) + 8.0 * h.evaluate(t + step) -
          8.0 * h.evaluate(t - step) + h.evaluate(t - 2.0 * step)) /
         (12.0 * step);
}

}  // namespace

double ou_h_norm_squared(const AnalyticTerm& h, double alpha, double T) {
  if (!(alpha > 0.0) || !(T > 0.0)) {
    throw std::invalid_argument("alpha and T must be positive");
  }
  const double step = 1e-5 * T;
  const auto integrand = [&](double t) {
    const double v = h.evaluate(t);
    const double d = derivative_5pt(h, t, step);
    return d * d + alpha * alpha * v * v;
  };
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-10;
  cfg.rel_tol = 1e-10;
  const double integral = integrate_adaptive(integrand, 0.0, T, cfg);
  const double b0 = h.evaluate(0.0);
  const double bT = h.evaluate(T);
  return 0.5 * (b0 * b0 + bT * bT) + integral / (2.0 * alpha);
}

CheckResult check_ou_frame_h_norms(const ExpansionFamily& family,
                                   std::size_t j_max, double tol) {
  const auto* fou = std::get_if<FractionalOUKernel>(&family.kernel().kind());
  if (!fou || fou->rho != 1.0) {
    throw std::invalid_argument(
        "H-norm witness is defined for the rho = 1 trigonometric frame");
  }
  if (family.size() < 2 * j_max) {
    throw std::invalid_argument("family too small for the requested j range");
  }
  const double alpha = fou->alpha;
  const double T = fou->horizon;
  double worst = 0.0;
  bool strictly_below_one = true;
  for (std::size_t j = 1; j <= j_max; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    const double target = 0.5 * (1.0 - std::exp(-alpha * T) * sign);
    const double computed = ou_h_norm_squared(family.term(2 * j - 1), alpha, T);
    worst = std::max(worst, std::abs(computed - target));
    if (!(computed < 1.0)) strictly_below_one = false;
  }
  return {"ou_frame_h_norms", worst <= tol && strictly_below_one, worst, tol,
          "|f_{2j-1}|_H^2 = (1 - e^{-alpha T}(-1)^j)/2 < 1"};
}

}  // namespace gpseries
