#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace gpseries {

// Closed-form building blocks for series expansions of Gaussian processes.
// Every term evaluates exactly (no tabulation) and carries a certified upper
// bound on its sup-norm over [0, horizon].

enum class WaveletPrimitiveId { Haar };

struct ConstTerm {
  double a = 0.0;
};

// slope * t
struct RampTerm {
  double slope = 0.0;
};

// a_cos*cos(omega t) + a_sin*sin(omega t)
struct TrigTerm {
  double a_cos = 0.0;
  double a_sin = 0.0;
  double omega = 0.0;
};

// a0 + a_cos*cos(omega t) + a_sin*sin(omega t)
struct TrigAffineTerm {
  double a0 = 0.0;
  double a_cos = 0.0;
  double a_sin = 0.0;
  double omega = 0.0;
};

// a_exp*exp(-alpha t) + a_cos*cos(omega t) + a_sin*sin(omega t) + a0
struct DampedMixTerm {
  double a_exp = 0.0;
  double alpha = 1.0;
  double a_cos = 0.0;
  double a_sin = 0.0;
  double omega = 0.0;
  double a0 = 0.0;
};

// amplitude * 2^{-level/2} * (Psi(2^level t - shift) - Psi(-shift)) where Psi
// is the primitive of the generating wavelet (Haar: the unit tent of height
// 1/2 supported on (0,1)).
struct WaveletPrimitiveTerm {
  int level = 0;
  long shift = 0;
  double amplitude = 1.0;
  WaveletPrimitiveId primitive = WaveletPrimitiveId::Haar;
};

// a * exp(alpha (T - t)) * sin(b * exp(-2 alpha (T - t)))
struct LampertiWarpTerm {
  double a = 0.0;
  double alpha = 1.0;
  double horizon = 1.0;
  double b = 0.0;
};

class AnalyticTerm;

struct TensorProductTerm {
  std::vector<AnalyticTerm> factors;  // one per axis
};

using TermKind = std::variant<ConstTerm, RampTerm, TrigTerm, TrigAffineTerm,
                              DampedMixTerm, WaveletPrimitiveTerm,
                              LampertiWarpTerm, TensorProductTerm>;

// Immutable after construction; all parameters are validated up front so
// evaluation itself never throws. Safe to evaluate concurrently.
class AnalyticTerm {
 public:
  // horizon is the [0,T] interval the sup bound is certified on.
  AnalyticTerm(TermKind kind, double horizon);

  double evaluate(double t) const;
  // Multi-axis evaluation; for dim()==1 a single-element span is expected.
  double evaluate(std::span<const double> t) const;

  // Certified bound: sup_{t in [0,horizon]} |f(t)| <= sup_bound().
  double sup_bound() const { return sup_bound_; }
  double horizon() const { return horizon_; }
  int dim() const { return dim_; }
  const TermKind& kind() const { return kind_; }

  // Returns a copy with every amplitude-like parameter multiplied by c.
  AnalyticTerm scaled(double c) const;

 private:
  TermKind kind_;
  double horizon_ = 1.0;
  double sup_bound_ = 0.0;
  int dim_ = 1;
};

class Grid {
 public:
  // Uniform points on [0, horizon] per axis, endpoints included.
  Grid(double horizon, std::size_t points_per_axis, int dim = 1);

  double horizon() const { return horizon_; }
  std::size_t points_per_axis() const { return n_; }
  int dim() const { return dim_; }

  double point(std::size_t i) const;
  std::size_t total_points() const;
  // Row-major flat index decoding, axis 0 slowest.
  std::vector<double> point_at(std::size_t flat) const;
  std::vector<double> axis_points() const;

 private:
  double horizon_;
  std::size_t n_;
  int dim_;
};

double evaluate(const AnalyticTerm& term, double t);
double evaluate(const AnalyticTerm& term, std::span<const double> t);

// Elementwise equal to evaluate() at each grid point, bitwise.
std::vector<double> evaluate_on_grid(const AnalyticTerm& term, const Grid& grid);

// Primitive of the Haar wavelet: the tent with Psi(1/2) = 1/2, zero outside (0,1).
double haar_primitive(double x);

}  // namespace gpseries
