#include <doctest.h>

#include <cmath>
#include <thread>

#include "gpseries/terms.hpp"

using namespace gpseries;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("trig term evaluates the printed sine family exactly") {
  // j = 1 member of the half-integer sine family on [0,1]
  const double amp = std::sqrt(2.0) / (kPi * 0.5);
  const AnalyticTerm f(TrigTerm{0.0, amp, kPi * 0.5}, 1.0);
  const double expected = 2.0 * std::sqrt(2.0) / kPi;
  CHECK(f.evaluate(1.0) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(f.evaluate(1.0) == doctest::Approx(0.9003163).epsilon(1e-6));
  CHECK(f.evaluate(0.0) == 0.0);  // sine-only terms vanish at zero
}

TEST_CASE("tensor product multiplies axis evaluations") {
  const double amp = std::sqrt(2.0) / (kPi * 0.5);
  const AnalyticTerm f(TrigTerm{0.0, amp, kPi * 0.5}, 1.0);
  const AnalyticTerm prod(TensorProductTerm{{f, f}}, 1.0);
  const double point[2] = {1.0, 1.0};
  const double expected = std::pow(2.0 * std::sqrt(2.0) / kPi, 2);
  CHECK(prod.evaluate(std::span<const double>(point)) ==
        doctest::Approx(expected).epsilon(1e-15));
  CHECK(prod.evaluate(std::span<const double>(point)) ==
        doctest::Approx(0.8105695).epsilon(1e-6));
  CHECK(prod.dim() == 2);
  CHECK(prod.sup_bound() == f.sup_bound() * f.sup_bound());
}

TEST_CASE("evaluate_on_grid is bitwise the pointwise evaluation") {
  const AnalyticTerm f(
      DampedMixTerm{0.3, 1.7, -0.2, 0.9, 5.0, 0.05}, 2.0);
  const Grid grid(2.0, 33);
  const auto values = evaluate_on_grid(f, grid);
  REQUIRE(values.size() == 33);
  for (std::size_t i = 0; i < 33; ++i) {
    CHECK(values[i] == f.evaluate(grid.point(i)));
  }

  const AnalyticTerm c(ConstTerm{3.25}, 2.0);
  for (double v : evaluate_on_grid(c, grid)) CHECK(v == 3.25);
}

TEST_CASE("sine family values on a three-point grid") {
  const double amp = std::sqrt(2.0) / (kPi * 0.5);
  const AnalyticTerm f(TrigTerm{0.0, amp, kPi * 0.5}, 1.0);
  const Grid grid(1.0, 3);
  const auto values = evaluate_on_grid(f, grid);
  CHECK(values[0] == 0.0);
  CHECK(values[1] == doctest::Approx(amp * std::sin(kPi / 4.0)).epsilon(1e-15));
  CHECK(values[2] == doctest::Approx(2.0 * std::sqrt(2.0) / kPi).epsilon(1e-15));
}

TEST_CASE("haar primitive is the unit tent") {
  CHECK(haar_primitive(-0.5) == 0.0);
  CHECK(haar_primitive(0.25) == 0.25);
  CHECK(haar_primitive(0.5) == 0.5);
  CHECK(haar_primitive(0.75) == 0.25);
  CHECK(haar_primitive(1.5) == 0.0);

  const AnalyticTerm w(WaveletPrimitiveTerm{0, 0, 1.0, WaveletPrimitiveId::Haar},
                       1.0);
  CHECK(w.evaluate(0.0) == 0.0);
  CHECK(w.evaluate(0.25) == 0.25);
  CHECK(w.evaluate(0.5) == 0.5);
  CHECK(w.evaluate(1.0) == 0.0);
}

TEST_CASE("sup bounds dominate a dense grid scan") {
  const std::vector<AnalyticTerm> terms = {
      AnalyticTerm(TrigTerm{0.4, -0.3, 17.0}, 1.0),
      AnalyticTerm(TrigTerm{0.0, 0.9, 0.7}, 1.0),  // max not reached in [0,T]
      AnalyticTerm(TrigAffineTerm{0.2, -0.2, 0.0, kPi}, 1.0),
      AnalyticTerm(DampedMixTerm{-0.5, 1.0, 0.5, 0.8, 4.71, 0.0}, 1.0),
      AnalyticTerm(LampertiWarpTerm{0.45, 1.0, 1.0, kPi * 0.5}, 1.0),
      AnalyticTerm(WaveletPrimitiveTerm{-4, 0, 1.0, WaveletPrimitiveId::Haar},
                   1.0),
      AnalyticTerm(WaveletPrimitiveTerm{3, 5, 1.0, WaveletPrimitiveId::Haar},
                   1.0),
      AnalyticTerm(RampTerm{-1.25}, 1.0),
      AnalyticTerm(ConstTerm{0.0}, 1.0),
  };
  for (const auto& f : terms) {
    double grid_max = 0.0;
    for (std::size_t i = 0; i <= 10000; ++i) {
      grid_max = std::max(grid_max, std::abs(f.evaluate(double(i) / 10000.0)));
    }
    CHECK(grid_max <= f.sup_bound() * (1.0 + 1e-12));
    // bounds are also reasonably tight for these closed-form kinds
    CHECK(f.sup_bound() <= grid_max + 0.05 * (grid_max + 1e-6));
  }
}

TEST_CASE("evaluation is stable across threads") {
  const AnalyticTerm f(TrigTerm{0.1, 0.7, 31.0}, 1.0);
  const double reference = f.evaluate(0.618);
  std::vector<std::thread> pool;
  std::vector<double> out(8);
  for (int i = 0; i < 8; ++i) {
    pool.emplace_back([&, i] { out[std::size_t(i)] = f.evaluate(0.618); });
  }
  for (auto& th : pool) th.join();
  for (double v : out) CHECK(v == reference);
}

TEST_CASE("construction validates parameters") {
  CHECK_THROWS_AS(AnalyticTerm(ConstTerm{std::nan("")}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(AnalyticTerm(TrigTerm{0.0, 1.0, -2.0}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(AnalyticTerm(DampedMixTerm{1.0, 0.0, 0, 0, 1.0, 0}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(AnalyticTerm(LampertiWarpTerm{1.0, -1.0, 1.0, 1.0}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(AnalyticTerm(TensorProductTerm{{}}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(AnalyticTerm(TrigTerm{}, 0.0), std::invalid_argument);
}

TEST_CASE("dimension mismatches are rejected") {
  const AnalyticTerm f(TrigTerm{0.0, 1.0, 1.0}, 1.0);
  const AnalyticTerm prod(TensorProductTerm{{f, f}}, 1.0);
  const double one[1] = {0.5};
  CHECK_THROWS_AS(prod.evaluate(0.5), std::invalid_argument);
  CHECK_THROWS_AS(prod.evaluate(std::span<const double>(one)),
                  std::invalid_argument);
  CHECK_THROWS_AS(evaluate_on_grid(prod, Grid(1.0, 5)), std::invalid_argument);
}

TEST_CASE("grid points are uniform with exact endpoints") {
  const Grid g(2.5, 11);
  CHECK(g.point(0) == 0.0);
  CHECK(g.point(10) == 2.5);
  for (std::size_t i = 1; i < 11; ++i) CHECK(g.point(i) > g.point(i - 1));
  CHECK_THROWS_AS(Grid(1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Grid(-1.0, 5), std::invalid_argument);

  const Grid g2(1.0, 3, 2);
  CHECK(g2.total_points() == 9);
  const auto p = g2.point_at(5);  // row-major: (1, 2)
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 1.0);
}

TEST_CASE("scaling multiplies values") {
  const AnalyticTerm f(DampedMixTerm{0.3, 1.7, -0.2, 0.9, 5.0, 0.05}, 1.0);
  const AnalyticTerm g = f.scaled(0.5);
  for (double t : {0.0, 0.31, 0.77, 1.0}) {
    CHECK(g.evaluate(t) == doctest::Approx(0.5 * f.evaluate(t)).epsilon(1e-15));
  }
}
