#include <doctest.h>

#include <cmath>

#include "gpseries/diagnostics.hpp"
#include "gpseries/expansions.hpp"
#include "oracles.hpp"

using namespace gpseries;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Exact eigenvalues of the unit-variance exponential kernel on [0,1]:
// lambda = 2 / (1 + w^2) with tan(w) = 2 w / (w^2 - 1). The j-th root lives
// in ((j-1) pi, (j-1) pi + pi/2) for j >= 2 and in (1, pi/2) for j = 1.
double ou_exact_eigenvalue(std::size_t j) {
  const auto h = [](double w) {
    return std::sin(w) * (w * w - 1.0) - 2.0 * w * std::cos(w);
  };
  double lo, hi;
  if (j == 1) {
    lo = 1.0001;
    hi = kPi / 2.0 - 1e-9;
  } else {
    lo = double(j - 1) * kPi + 1e-9;
    hi = double(j - 1) * kPi + kPi / 2.0 - 1e-9;
  }
  const double w = oracles::bisect(h, lo, hi);
  return 2.0 / (1.0 + w * w);
}

}  // namespace

TEST_CASE("reconstruction check: empty sum measures the kernel peak") {
  const auto fam = build_bm_kl(1.0, 64);
  const Grid grid(1.0, 17);
  const auto empty = check_covariance_reconstruction(fam, grid, 0, 1e-3);
  CHECK(empty.measured == doctest::Approx(1.0).epsilon(1e-15));  // C(T,T)
  CHECK(!empty.pass);

  const auto full = check_covariance_reconstruction(fam, grid, 64, 6e-3);
  CHECK(full.pass);
  CHECK(full.measured > 0.0);
  CHECK(full.name == "covariance_reconstruction");
  CHECK(full.tolerance == 6e-3);
}

TEST_CASE("reconstruction check passes the trigonometric frame") {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-10;
  cfg.rel_tol = 1e-9;
  const auto fam = build_fou_trig(1.0, 1.0, 1.0, 2000, cfg, 2);
  const auto entry =
      check_covariance_reconstruction(fam, Grid(1.0, 65), fam.size(), 2e-3);
  CHECK(entry.pass);
  CHECK(entry.measured <= 5e-4);
}

TEST_CASE("discrete parseval: dirac and pairwise identities, random battery") {
  const auto fam = build_bridge_kl(1.0, 2000);
  const Grid grid(1.0, 33);

  // single dirac: partial diagonal sum stays below the variance
  for (double t : {0.25, 0.5, 0.75}) {
    double acc = 0.0;
    for (std::size_t j = 0; j < fam.size(); ++j) {
      const double v = fam.term(j).evaluate(t);
      acc += v * v;
    }
    const double exact = fam.kernel().cov(t, t);
    CHECK(acc <= exact + 1e-9);
    CHECK(std::abs(acc - exact) <= 1e-3);
  }

  // two-point combination expands against the 2x2 gram
  {
    const double s = 0.3, t = 0.8, as = 1.0, at = 1.0;
    double frame = 0.0;
    for (std::size_t j = 0; j < fam.size(); ++j) {
      const double v = as * fam.term(j).evaluate(s) + at * fam.term(j).evaluate(t);
      frame += v * v;
    }
    const auto& k = fam.kernel();
    const double exact = as * as * k.cov(s, s) + 2.0 * as * at * k.cov(s, t) +
                         at * at * k.cov(t, t);
    CHECK(std::abs(frame - exact) <= 2e-3);
  }

  const auto entry = check_discrete_parseval(fam, grid, 2000, 1e-3);
  CHECK(entry.pass);
  const auto again = check_discrete_parseval(fam, grid, 2000, 1e-3);
  CHECK(entry.measured == again.measured);  // bitwise reproducible
}

TEST_CASE("nystrom eigenvalues match the exact exponential spectrum") {
  const Kernel k(FractionalOUKernel{1.0, 1.0, 1.0});
  const auto lambda = nystrom_eigenvalues(k, 1024);
  CHECK(lambda.size() == 1024);
  // nonnegative down to a tiny multiple of the top eigenvalue
  CHECK(lambda.back() >= -1e-10 * lambda.front());
  for (std::size_t j : {1u, 5u, 10u, 20u, 40u}) {
    const double exact = ou_exact_eigenvalue(j);
    CHECK(std::abs(lambda[j - 1] / exact - 1.0) <= 0.02);
  }
}

TEST_CASE("eigenvalue asymptote check at index one half") {
  const Kernel k(FractionalOUKernel{0.5, 1.0, 1.0});
  const auto entry = check_eigenvalue_asymptotics(k, 1024, 10, 40, 0.10);
  CHECK(entry.pass);
  CHECK(entry.measured <= 0.05);

  // halving the resolution cannot make the asymptote fit better than noise
  const auto coarse = check_eigenvalue_asymptotics(k, 512, 10, 40, 0.10);
  CHECK(coarse.measured >= entry.measured - 0.01);

  CHECK_THROWS_AS(check_eigenvalue_asymptotics(k, 64, 10, 40, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      check_eigenvalue_asymptotics(Kernel(BrownianMotionKernel{1.0}), 512, 10,
                                   40, 0.1),
      std::invalid_argument);
}

TEST_CASE("nonconvex failure appears for rho above one and not at the boundary") {
  const auto fail15 = check_nonconvex_failure(1.5, 1.0, 1.0, 400);
  CHECK(fail15.pass);
  CHECK(fail15.measured < -1e-12);

  const auto fail18 = check_nonconvex_failure(1.8, 1.0, 1.0, 400);
  CHECK(fail18.pass);

  const auto boundary = check_nonconvex_failure(1.0, 1.0, 1.0, 400);
  CHECK(!boundary.pass);
  CHECK(boundary.measured >= -1e-12);
}

TEST_CASE("sup-norm decay fit: passes true rates, rejects a flat family") {
  const auto bm = check_sup_norm_decay(build_bm_kl(1.0, 256));
  CHECK(bm.pass);
  CHECK(bm.measured == doctest::Approx(-1.0).epsilon(0.02));

  QuadratureConfig cfg;
  const auto fou = check_sup_norm_decay(build_fou_trig(0.5, 1.0, 1.0, 150, cfg, 2));
  CHECK(fou.pass);
  CHECK(fou.measured == doctest::Approx(-0.75).epsilon(0.05));

  std::vector<AnalyticTerm> flat;
  for (int i = 0; i < 32; ++i) flat.emplace_back(ConstTerm{0.05}, 1.0);
  const ExpansionFamily fake(std::move(flat), Kernel(BrownianMotionKernel{1.0}),
                             Provenance::BrownianKL, RateParams{1.0, 0.0});
  const auto entry = check_sup_norm_decay(fake);
  CHECK(!entry.pass);
  CHECK(std::abs(entry.measured) <= 1e-12);

  CHECK_THROWS_AS(check_sup_norm_decay(build_bm_kl(1.0, 8)),
                  std::invalid_argument);
}

TEST_CASE("h-norm witness matches the closed form and stays below one") {
  QuadratureConfig cfg;
  const auto fam = build_fou_trig(1.0, 1.0, 1.0, 25, cfg, 2);
  const auto entry = check_ou_frame_h_norms(fam, 20, 1e-6);
  CHECK(entry.pass);
  CHECK(entry.measured <= 1e-8);

  // spot value: j = 1 gives (1 + e^{-1})/2
  const double norm1 = ou_h_norm_squared(fam.term(1), 1.0, 1.0);
  CHECK(norm1 == doctest::Approx(0.5 * (1.0 + std::exp(-1.0))).epsilon(1e-7));
  CHECK(norm1 < 1.0);

  CHECK_THROWS_AS(check_ou_frame_h_norms(build_bm_kl(1.0, 64), 10, 1e-6),
                  std::invalid_argument);
}

TEST_CASE("report aggregates pass/fail") {
  DiagnosticsReport report;
  report.checks.push_back({"a", true, 0.0, 1.0, ""});
  CHECK(report.overall());
  report.checks.push_back({"b", false, 2.0, 1.0, ""});
  CHECK(!report.overall());
}
