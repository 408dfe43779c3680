#include <doctest.h>

#include <cmath>

#include "gpseries/errors.hpp"
#include "gpseries/expansions.hpp"
#include "oracles.hpp"

using namespace gpseries;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double reconstruct(const ExpansionFamily& fam, double s, double t,
                   std::size_t n_terms) {
  return oracles::partial_sum_covariance(
      [&](std::size_t j, double x) { return fam.term(j).evaluate(x); }, n_terms,
      s, t);
}

}  // namespace

TEST_CASE("sine family: printed amplitude and partial-sum covariance") {
  const auto fam = build_bm_kl(1.0, 2000);
  CHECK(fam.size() == 2000);
  CHECK(fam.provenance() == Provenance::BrownianKL);
  CHECK(fam.term(0).evaluate(1.0) ==
        doctest::Approx(2.0 * std::sqrt(2.0) / kPi).epsilon(1e-15));
  for (std::size_t j : {0u, 7u, 512u}) CHECK(fam.term(j).evaluate(0.0) == 0.0);
  CHECK(std::abs(reconstruct(fam, 0.3, 0.7, 2000) - 0.3) <= 2e-4);
  REQUIRE(fam.rate_params());
  CHECK(fam.rate_params()->theta == 1.0);
}

TEST_CASE("split frame: halved members and diagonal sum at the endpoint") {
  const auto split = build_bm_split_frame(1.0, 2000);
  const auto kl = build_bm_kl(1.0, 2000);
  CHECK(split.size() == 4000);
  // first kind sits at odd positions and equals the KL member / sqrt(2)
  for (std::size_t j : {1u, 2u, 40u}) {
    for (double t : {0.25, 0.5, 0.9}) {
      CHECK(split.term(2 * j - 1).evaluate(t) ==
            doctest::Approx(kl.term(j - 1).evaluate(t) / std::sqrt(2.0))
                .epsilon(1e-14));
    }
    // sup of the sine member is attained
    CHECK(split.term(2 * j - 1).sup_bound() ==
          doctest::Approx(std::sqrt(1.0) / (kPi * (double(j) - 0.5)))
              .epsilon(1e-12));
  }
  double diag = 0.0;
  for (std::size_t j = 0; j < split.size(); ++j) {
    const double v = split.term(j).evaluate(1.0);
    diag += v * v;
  }
  CHECK(std::abs(diag - 1.0) <= 2e-4);
}

TEST_CASE("paley-wiener family: boundary values and reconstruction") {
  const auto fam = build_bm_paley_wiener(1.0, 4001);
  CHECK(fam.size() == 4001);
  CHECK(fam.term(0).evaluate(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t j : {1u, 2u, 3u, 4u, 101u, 102u}) {
    CHECK(std::abs(fam.term(j).evaluate(1.0)) <= 1e-12);
  }
  CHECK(std::abs(reconstruct(fam, 0.25, 0.9, 4001) - 0.25) <= 5e-4);
}

TEST_CASE("wavelet family: window, filter, dyadic reconstruction") {
  const auto fam = build_bm_wavelet(1.0, 0, 3);
  // levels 0..3 keep 1+2+4+8 shifts on [0,1]
  CHECK(fam.size() == 15);
  const auto& first = std::get<WaveletPrimitiveTerm>(fam.term(0).kind());
  CHECK(first.level == 0);
  CHECK(first.shift == 0);
  CHECK(fam.term(0).evaluate(0.5) == 0.5);

  const auto wide = build_bm_wavelet(1.0, -10, 10);
  const double err =
      std::abs(reconstruct(wide, 0.25, 0.75, wide.size()) - 0.25);
  CHECK(err <= 2e-3);
  CHECK_THROWS_AS(build_bm_wavelet(1.0, 3, 1), std::invalid_argument);
}

TEST_CASE("wavelet shifts whose support misses the horizon are excluded") {
  const auto fam = build_bm_wavelet(0.4, 2, 2);
  // 2^2 * 0.4 = 1.6 -> shifts 0 and 1 only
  CHECK(fam.size() == 2);
  for (const auto& term : fam.terms()) {
    const auto& w = std::get<WaveletPrimitiveTerm>(term.kind());
    CHECK(w.shift <= 1);
  }
}

TEST_CASE("bessel-zero family: vanishing at zero and index-half coincidence") {
  const auto dvz = build_fbm_dvz(0.5, 1.0, 500);
  const auto split = build_bm_split_frame(1.0, 500);
  REQUIRE(dvz.size() == split.size());
  for (std::size_t j = 0; j < dvz.size(); ++j) {
    CHECK(std::abs(dvz.term(j).evaluate(0.0)) == 0.0);
    // compare the closed-form parameters member by member
    if (const auto* a = std::get_if<TrigTerm>(&dvz.term(j).kind())) {
      const auto& b = std::get<TrigTerm>(split.term(j).kind());
      CHECK(std::abs(a->a_sin - b.a_sin) <= 1e-8);
      CHECK(std::abs(a->omega - b.omega) <= 1e-8);
    } else {
      const auto& a2 = std::get<TrigAffineTerm>(dvz.term(j).kind());
      const auto& b2 = std::get<TrigAffineTerm>(split.term(j).kind());
      CHECK(std::abs(a2.a0 - b2.a0) <= 1e-8);
      CHECK(std::abs(a2.a_cos - b2.a_cos) <= 1e-8);
      CHECK(std::abs(a2.omega - b2.omega) <= 1e-8);
    }
  }
}

TEST_CASE("bessel-zero family reconstructs the fractional covariance") {
  const auto fam = build_fbm_dvz(0.75, 1.0, 4000);
  const double exact = std::pow(0.5, 1.5);  // C(1/2,1/2) = (1/2)^{2 rho}
  CHECK(std::abs(reconstruct(fam, 0.5, 0.5, fam.size()) - exact) <= 1e-2);
  CHECK_THROWS_AS(build_fbm_dvz(1.0, 1.0, 4), std::invalid_argument);
}

TEST_CASE("bridge family: pinned ends, decreasing sups, reconstruction") {
  const auto fam = build_bridge_kl(1.0, 2000);
  for (std::size_t j : {0u, 3u, 700u}) {
    CHECK(fam.term(j).evaluate(0.0) == 0.0);
    CHECK(std::abs(fam.term(j).evaluate(1.0)) <= 1e-12);
  }
  for (std::size_t j = 1; j < 50; ++j) {
    CHECK(fam.term(j).sup_bound() < fam.term(j - 1).sup_bound());
    CHECK(fam.term(j).sup_bound() ==
          doctest::Approx(std::sqrt(2.0) / (kPi * double(j + 1))).epsilon(1e-12));
  }
  const double exact = 0.3 - 0.3 * 0.6;
  CHECK(std::abs(reconstruct(fam, 0.3, 0.6, 2000) - exact) <= 2e-4);
}

TEST_CASE("convolution family matches a quadrature oracle") {
  const double alpha = 1.0, T = 1.0;
  const double sigma = std::sqrt(2.0 * alpha);
  const auto fam = build_ou_conv(alpha, 0.0, T, 2000);
  CHECK(fam.term(0).evaluate(0.0) ==
        doctest::Approx(sigma / std::sqrt(2.0 * alpha)).epsilon(1e-15));
  for (std::size_t j : {1u, 2u, 9u}) CHECK(std::abs(fam.term(j).evaluate(0.0)) <= 1e-15);

  const int j = 3;
  const double omega = kPi * (double(j) - 0.5) / T;
  for (double t : {0.2, 0.7}) {
    const double conv = sigma * oracles::simpson(
        [&](double s) {
          return std::exp(-alpha * (t - s)) * std::sqrt(2.0 / T) *
                 std::cos(omega * s);
        },
        0.0, t, 20000);
    CHECK(std::abs(fam.term(std::size_t(j)).evaluate(t) - conv) <= 1e-10);
  }
  CHECK(std::abs(reconstruct(fam, 0.2, 0.8, 2000) -
                 fam.kernel().cov(0.2, 0.8)) <= 2e-3);
}

TEST_CASE("lamperti family: endpoint values, variance, composition") {
  const double alpha = 1.0, T = 1.0;
  const double sigma = std::sqrt(2.0 * alpha);
  const auto fam = build_ou_lamperti(alpha, 0.0, T, 5000);
  for (std::size_t j = 1; j <= 5; ++j) {
    const double expect = sigma / (std::sqrt(alpha) * kPi * (double(j) - 0.5));
    CHECK(std::abs(std::abs(fam.term(j - 1).evaluate(T)) - expect) <= 1e-13);
  }
  double diag = 0.0;
  for (std::size_t j = 0; j < fam.size(); ++j) {
    const double v = fam.term(j).evaluate(0.5);
    diag += v * v;
  }
  CHECK(std::abs(diag - sigma * sigma / (2.0 * alpha)) <= 1e-3);

  // time-warp composition of the sine family on the stretched horizon
  const double warped_T = std::exp(2.0 * alpha * T);
  const auto bm = build_bm_kl(warped_T, 8);
  for (std::size_t j = 0; j < 8; ++j) {
    for (double t : {0.0, 0.31, 0.78, 1.0}) {
      const double expect = sigma / std::sqrt(2.0 * alpha) *
                            std::exp(-alpha * t) *
                            bm.term(j).evaluate(std::exp(2.0 * alpha * t));
      CHECK(std::abs(fam.term(j).evaluate(t) - expect) <= 1e-12);
    }
  }
}

TEST_CASE("trigonometric frame: amplitudes follow the closed form") {
  QuadratureConfig cfg;
  const auto fam = build_fou_trig(1.0, 1.0, 1.0, 200, cfg, 2);
  CHECK(fam.size() == 401);
  const double b0 = 1.0 - std::exp(-1.0);
  CHECK(std::get<ConstTerm>(fam.term(0).kind()).a ==
        doctest::Approx(std::sqrt(b0)).epsilon(1e-10));
  for (std::size_t j = 1; j <= 200; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    const double beta = 2.0 * (1.0 - std::exp(-1.0) * sign) /
                        (1.0 + kPi * kPi * double(j) * double(j));
    const auto& sin_term = std::get<TrigTerm>(fam.term(2 * j - 1).kind());
    const auto& cos_term = std::get<TrigTerm>(fam.term(2 * j).kind());
    CHECK(std::abs(sin_term.a_sin * sin_term.a_sin - beta) <= 1e-9);
    CHECK(std::abs(cos_term.a_cos * cos_term.a_cos - beta) <= 1e-9);
    CHECK(sin_term.omega == doctest::Approx(kPi * double(j)).epsilon(1e-15));
  }
  REQUIRE(fam.rate_params());
  CHECK(fam.rate_params()->theta == 1.0);
}

TEST_CASE("trigonometric frame: diagonal sums approach gamma(0)") {
  QuadratureConfig cfg;
  const auto fam = build_fou_trig(0.5, 1.0, 1.0, 2000, cfg, 2);
  double diag = 0.0;
  for (std::size_t j = 0; j < fam.size(); ++j) {
    const double v = fam.term(j).evaluate(0.37);
    diag += v * v;
  }
  // theta = 3/4 tail: sum_{j>n} beta_j ~ 0.45 / sqrt(n)
  CHECK(std::abs(diag - 1.0) <= 0.45 / std::sqrt(2000.0) * 1.3);
  CHECK(diag < 1.0 + 1e-9);
}

TEST_CASE("trigonometric frame refuses the nonconvex index range loudly") {
  QuadratureConfig cfg;
  CHECK_THROWS_AS(build_fou_trig(1.5, 1.0, 1.0, 50, cfg, 2), NumericalError);
  CHECK_THROWS_AS(build_fou_trig(2.0, 1.0, 1.0, 10, cfg, 1),
                  std::invalid_argument);
}

TEST_CASE("frame asymptote: beta_j (pi j)^{1+rho} approaches its constant") {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-9;
  cfg.rel_tol = 1e-9;
  const double rho = 0.5, alpha = 1.0, T = 1.0;
  const double beta = fourier_cosine_coefficient(
      [&](double t) { return std::exp(-alpha * std::pow(std::abs(t), rho)); },
      T, 5000, cfg);
  const double limit = 2.0 * alpha * std::pow(T, rho) * std::tgamma(1.0 + rho) *
                       std::sin(kPi * rho / 2.0);
  const double ratio = beta * std::pow(kPi * 5000.0, 1.0 + rho) / limit;
  CHECK(std::abs(ratio - 1.0) <= 0.10);
}

TEST_CASE("stationary convex builder: triangle coefficients") {
  const auto fam = build_convex_stationary_trig(
      Kernel(TriangleKernelSpec{1.0, 1.0}), 1.0, 10);
  CHECK(std::get<ConstTerm>(fam.term(0).kind()).a ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  for (std::size_t j = 1; j <= 10; ++j) {
    const double closed = (j % 2 == 1) ? 4.0 / (kPi * kPi * double(j) * double(j)) : 0.0;
    const auto& sin_term = std::get<TrigTerm>(fam.term(2 * j - 1).kind());
    CHECK(std::abs(sin_term.a_sin * sin_term.a_sin - closed) <= 1e-10);
  }

  const auto half = build_convex_stationary_trig(
      Kernel(TriangleKernelSpec{0.5, 1.0}), 1.0, 4);
  CHECK(std::get<ConstTerm>(half.term(0).kind()).a ==
        doctest::Approx(std::sqrt(0.25)).epsilon(1e-9));
}

TEST_CASE("stationary convex builder reproduces the exponential frame") {
  QuadratureConfig cfg;
  const auto direct = build_fou_trig(1.0, 1.0, 1.0, 60, cfg, 2);
  const auto via_kernel = build_convex_stationary_trig(
      Kernel(StationaryConvexKernel(
          [](double tau) { return std::exp(-std::abs(tau)); }, 1.0)),
      1.0, 60, cfg, 2);
  REQUIRE(direct.size() == via_kernel.size());
  for (std::size_t j = 0; j < direct.size(); ++j) {
    for (double t : {0.2, 0.9}) {
      CHECK(std::abs(direct.term(j).evaluate(t) -
                     via_kernel.term(j).evaluate(t)) <= 1e-10);
    }
  }
}

TEST_CASE("stationary convex builder flags a concave tabulation") {
  std::vector<double> table;
  const double step = 1.0 / 256.0;
  for (int i = 0; i <= 256; ++i) {
    const double tau = double(i) * step;
    table.push_back(std::exp(-tau));
  }
  table[128] += 0.02;  // concave bump
  const auto fam = build_convex_stationary_trig(
      Kernel(StationaryConvexKernel(table, step, 0.01, 1.0)), 1.0, 4);
  bool flagged = false;
  for (const auto& note : fam.notes()) {
    if (note.find("convexity") != std::string::npos) flagged = true;
  }
  CHECK(flagged);
}

TEST_CASE("tensor sheet: ordering, trivial case, probe reconstruction") {
  const auto one = build_bm_kl(1.0, 1);
  const auto single = build_tensor_sheet({one, one}, 4);
  CHECK(single.size() == 1);
  CHECK(single.term(0).dim() == 2);

  const auto ax = build_bm_kl(1.0, 60);
  const auto sheet = build_tensor_sheet({ax, ax}, 3600);
  CHECK(sheet.size() == 3600);
  for (std::size_t j = 1; j < sheet.size(); ++j) {
    CHECK(sheet.term(j).sup_bound() <=
          sheet.term(j - 1).sup_bound() * (1.0 + 1e-12));
  }
  const double s[2] = {0.3, 0.4};
  const double t[2] = {0.8, 0.9};
  double acc = 0.0;
  for (std::size_t j = 0; j < sheet.size(); ++j) {
    acc += sheet.term(j).evaluate(std::span<const double>(s)) *
           sheet.term(j).evaluate(std::span<const double>(t));
  }
  CHECK(std::abs(acc - 0.3 * 0.4) <= 5e-3);

  CHECK_THROWS_AS(build_tensor_sheet({ax}, 10), std::invalid_argument);
  const auto other = build_bm_kl(2.0, 4);
  CHECK_THROWS_AS(build_tensor_sheet({ax, other}, 10), std::invalid_argument);
}

TEST_CASE("families keep sup bounds under the diagonal cap") {
  const std::vector<ExpansionFamily> families = {
      build_bm_kl(1.0, 64),           build_bm_split_frame(1.0, 32),
      build_bm_paley_wiener(1.0, 65), build_bridge_kl(1.0, 64),
      build_ou_conv(1.0, 0.0, 1.0, 64), build_ou_lamperti(1.0, 0.0, 1.0, 64),
      build_fbm_dvz(0.25, 1.0, 32),   build_bm_wavelet(1.0, -6, 8)};
  for (const auto& fam : families) {
    const double cap = std::sqrt(fam.kernel().max_diagonal()) + 1e-9;
    for (const auto& term : fam.terms()) CHECK(term.sup_bound() <= cap);
  }
  // a term breaking the cap is rejected at family construction
  CHECK_THROWS_AS(
      ExpansionFamily({AnalyticTerm(ConstTerm{2.0}, 1.0)},
                      Kernel(BrownianMotionKernel{1.0}),
                      Provenance::BrownianKL),
      std::invalid_argument);
}

TEST_CASE("diagonal partial sums increase toward the variance") {
  const auto fam = build_bm_kl(1.0, 512);
  for (int i = 0; i < 33; ++i) {
    const double t = double(i) / 32.0;
    const double at256 = reconstruct(fam, t, t, 256);
    const double at512 = reconstruct(fam, t, t, 512);
    CHECK(at256 <= fam.kernel().cov(t, t) + 1e-9);
    CHECK(at512 + 1e-12 >= at256);
    CHECK(at512 <= fam.kernel().cov(t, t) + 1e-9);
  }
}

TEST_CASE("reconstruction error envelope shrinks when terms double") {
  const Grid grid(1.0, 33);
  for (const auto& fam :
       {build_bm_kl(1.0, 1024), build_bridge_kl(1.0, 1024)}) {
    double worst_half = 0.0, worst_full = 0.0;
    for (std::size_t a = 0; a < 33; ++a) {
      for (std::size_t b = 0; b < 33; ++b) {
        const double s = grid.point(a), t = grid.point(b);
        const double exact = fam.kernel().cov(s, t);
        worst_half = std::max(worst_half,
                              std::abs(reconstruct(fam, s, t, 512) - exact));
        worst_full = std::max(worst_full,
                              std::abs(reconstruct(fam, s, t, 1024) - exact));
      }
    }
    CHECK(worst_full <= worst_half + 1e-12);
  }
}

TEST_CASE("terms obey the covariance-increment modulus") {
  // |f_j(s) - f_j(t)| <= sqrt(E|X_s - X_t|^2) + 1e-9 for frame members
  const std::vector<ExpansionFamily> families = {
      build_bm_kl(1.0, 100), build_bridge_kl(1.0, 100),
      build_fbm_dvz(0.3, 1.0, 50), build_ou_conv(1.0, 0.0, 1.0, 100)};
  for (const auto& fam : families) {
    for (int i = 0; i < 64; ++i) {
      const double s = double((i * 29) % 65) / 64.0;
      const double t = double((i * 47) % 65) / 64.0;
      const auto& k = fam.kernel();
      const double increment =
          std::sqrt(std::max(0.0, k.cov(s, s) + k.cov(t, t) - 2.0 * k.cov(s, t)));
      for (std::size_t j = 0; j < fam.size(); j += 13) {
        CHECK(std::abs(fam.term(j).evaluate(s) - fam.term(j).evaluate(t)) <=
              increment + 1e-9);
      }
    }
  }
}

TEST_CASE("sup bounds decay along every rated family") {
  const std::vector<ExpansionFamily> families = {
      build_bm_kl(1.0, 256), build_fbm_dvz(0.6, 1.0, 128),
      build_ou_lamperti(1.0, 0.0, 1.0, 256)};
  for (const auto& fam : families) {
    double tail_max_earlier = 0.0;
    for (std::size_t m : {192u, 224u, 240u}) {
      double tail_max = 0.0;
      for (std::size_t j = m; j < fam.size(); ++j) {
        tail_max = std::max(tail_max, fam.term(j).sup_bound());
      }
      if (tail_max_earlier > 0.0) CHECK(tail_max <= tail_max_earlier);
      tail_max_earlier = tail_max;
    }
    CHECK(tail_max_earlier < fam.term(0).sup_bound());
  }
}

TEST_CASE("builders count terms as requested") {
  CHECK(build_bm_kl(1.0, 7).size() == 7);
  CHECK(build_bm_split_frame(1.0, 7).size() == 14);
  CHECK(build_bm_paley_wiener(1.0, 8).size() == 8);
  CHECK(build_bridge_kl(1.0, 7).size() == 7);
  CHECK(build_ou_conv(1.0, 0.0, 1.0, 7).size() == 7);
  CHECK(build_ou_lamperti(1.0, 0.0, 1.0, 7).size() == 7);
  CHECK(build_fbm_dvz(0.4, 1.0, 7).size() == 14);
  QuadratureConfig cfg;
  CHECK(build_fou_trig(0.8, 1.0, 1.0, 7, cfg, 1).size() == 15);
}

TEST_CASE("provenance tags round-trip") {
  for (Provenance p :
       {Provenance::BrownianKL, Provenance::BrownianSplitFrame,
        Provenance::BrownianPaleyWiener, Provenance::BrownianWavelet,
        Provenance::FractionalBMDvZ, Provenance::BridgeKL,
        Provenance::OUConvolution, Provenance::OULamperti,
        Provenance::FOUTrigFrame, Provenance::ConvexStationaryTrigFrame,
        Provenance::TensorSheet}) {
    CHECK(provenance_from_tag(provenance_tag(p)) == p);
  }
  CHECK_THROWS_AS(provenance_from_tag("nope"), SpecError);
}
