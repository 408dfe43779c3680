#include "gpseries/terms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpseries {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("non-finite parameter: ") + what);
  }
}

struct BoundInfo {
  double analytic;   // upper bound valid on [0, horizon]
  double lipschitz;  // bound on |f'| over [0, horizon]
};

double tent(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return x <= 0.5 ? x : 1.0 - x;
}

double eval_wavelet(const WaveletPrimitiveTerm& w, double t) {
  const double scale = std::ldexp(1.0, w.level);       // 2^level
  const double amp = std::exp2(-0.5 * w.level) * w.amplitude;
  return amp * (tent(scale * t - double(w.shift)) - tent(-double(w.shift)));
}

double eval_kind(const TermKind& kind, double t);

double eval_tensor(const TensorProductTerm& tp, std::span<const double> t) {
  double prod = 1.0;
  for (std::size_t i = 0; i < tp.factors.size(); ++i) {
    prod *= tp.factors[i].evaluate(t[i]);
  }
  return prod;
}

double eval_kind(const TermKind& kind, double t) {
  return std::visit(
      [t](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ConstTerm>) {
          return k.a;
        } else if constexpr (std::is_same_v<K, RampTerm>) {
          return k.slope * t;
        } else if constexpr (std::is_same_v<K, TrigTerm>) {
          return k.a_cos * std::cos(k.omega * t) + k.a_sin * std::sin(k.omega * t);
        } else if constexpr (std::is_same_v<K, TrigAffineTerm>) {
          return k.a0 + k.a_cos * std::cos(k.omega * t) +
                 k.a_sin * std::sin(k.omega * t);
        } else if constexpr (std::is_same_v<K, DampedMixTerm>) {
          return k.a_exp * std::exp(-k.alpha * t) +
                 k.a_cos * std::cos(k.omega * t) +
                 k.a_sin * std::sin(k.omega * t) + k.a0;
        } else if constexpr (std::is_same_v<K, WaveletPrimitiveTerm>) {
          return eval_wavelet(k, t);
        } else if constexpr (std::is_same_v<K, LampertiWarpTerm>) {
          const double u = std::exp(-2.0 * k.alpha * (k.horizon - t));
          return k.a * std::exp(k.alpha * (k.horizon - t)) * std::sin(k.b * u);
        } else {
          static_assert(std::is_same_v<K, TensorProductTerm>);
          const double point[1] = {t};
          return eval_tensor(k, point);
        }
      },
      kind);
}

BoundInfo analytic_bound(const TermKind& kind, double T) {
  return std::visit(
      [T](const auto& k) -> BoundInfo {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ConstTerm>) {
          return {std::abs(k.a), 0.0};
        } else if constexpr (std::is_same_v<K, RampTerm>) {
          return {std::abs(k.slope) * T, std::abs(k.slope)};
        } else if constexpr (std::is_same_v<K, TrigTerm>) {
          const double amp = std::hypot(k.a_cos, k.a_sin);
          return {amp, amp * k.omega};
        } else if constexpr (std::is_same_v<K, TrigAffineTerm>) {
          const double amp = std::hypot(k.a_cos, k.a_sin);
          return {std::abs(k.a0) + amp, amp * k.omega};
        } else if constexpr (std::is_same_v<K, DampedMixTerm>) {
          const double amp = std::hypot(k.a_cos, k.a_sin);
          return {std::abs(k.a_exp) + amp + std::abs(k.a0),
                  std::abs(k.a_exp) * k.alpha + amp * k.omega};
        } else if constexpr (std::is_same_v<K, WaveletPrimitiveTerm>) {
          const double amp = std::exp2(-0.5 * k.level) * std::abs(k.amplitude);
          // |Psi| <= 1/2, |psi| <= 1 for Haar
          return {amp, std::abs(k.amplitude) * std::exp2(0.5 * k.level)};
        } else if constexpr (std::is_same_v<K, LampertiWarpTerm>) {
          const double e = std::exp(k.alpha * k.horizon);
          const double abs_a = std::abs(k.a);
          const double sup = std::min(abs_a * e, abs_a * std::abs(k.b));
          return {sup, abs_a * k.alpha * e * (1.0 + 2.0 * std::abs(k.b))};
        } else {
          static_assert(std::is_same_v<K, TensorProductTerm>);
          return {0.0, 0.0};  // handled separately
        }
      },
      kind);
}

// Range of cos(theta) over [theta0, theta1]. Containment of multiples of pi
// is tested generously so the range can only widen, never shrink.
std::pair<double, double> cos_range(double theta0, double theta1) {
  const double t0 = theta0 / 3.141592653589793238462643383279502884;
  const double t1 = theta1 / 3.141592653589793238462643383279502884;
  if (t1 - t0 >= 2.0) return {-1.0, 1.0};  // spans a full period
  double cmax = std::max(std::cos(theta0), std::cos(theta1));
  double cmin = std::min(std::cos(theta0), std::cos(theta1));
  for (double k = std::ceil(t0) - 1.0; k <= t1 + 1e-12; k += 1.0) {
    if (k < t0 - 1e-12) continue;
    const bool even = std::fmod(std::abs(k), 2.0) < 0.5;
    if (even) cmax = 1.0;
    else cmin = -1.0;
  }
  return {cmin, cmax};
}

double trig_exact_sup(double a0, double a_cos, double a_sin, double omega,
                      double T) {
  const double r = std::hypot(a_cos, a_sin);
  if (r == 0.0 || omega == 0.0) return std::abs(a0 + a_cos);
  const double phi = std::atan2(a_sin, a_cos);
  const auto [cmin, cmax] = cos_range(-phi, omega * T - phi);
  return std::max(std::abs(a0 + r * cmax), std::abs(a0 + r * cmin));
}

double wavelet_exact_sup(const WaveletPrimitiveTerm& w, double T) {
  // Psi rises on [0,1/2], falls on [1/2,1]; its max over an interval sits at
  // the point closest to 1/2.
  const double scale = std::ldexp(1.0, w.level);
  const double lo = -double(w.shift);
  const double hi = scale * T - double(w.shift);
  const double at = std::clamp(0.5, lo, hi);
  const double base = tent(-double(w.shift));
  const double psi_max = tent(at);
  const double psi_min = std::min(tent(lo), tent(hi));
  const double amp = std::exp2(-0.5 * w.level) * std::abs(w.amplitude);
  return amp * std::max(std::abs(psi_max - base), std::abs(psi_min - base));
}

// Certified upper bound for sup_{[0,T]} |f|: exact closed forms where the
// kind allows, otherwise an analytic bound tightened on a dense grid with a
// Lipschitz covering margin.
double certified_sup_bound(const TermKind& kind, double T) {
  if (const auto* c = std::get_if<ConstTerm>(&kind)) return std::abs(c->a);
  if (const auto* r = std::get_if<RampTerm>(&kind)) return std::abs(r->slope) * T;
  if (const auto* tr = std::get_if<TrigTerm>(&kind)) {
    return trig_exact_sup(0.0, tr->a_cos, tr->a_sin, tr->omega, T) *
           (1.0 + 1e-13);
  }
  if (const auto* ta = std::get_if<TrigAffineTerm>(&kind)) {
    return trig_exact_sup(ta->a0, ta->a_cos, ta->a_sin, ta->omega, T) *
           (1.0 + 1e-13);
  }
  if (const auto* w = std::get_if<WaveletPrimitiveTerm>(&kind)) {
    return wavelet_exact_sup(*w, T) * (1.0 + 1e-13);
  }
  const BoundInfo info = analytic_bound(kind, T);
  constexpr std::size_t kGridN = 4097;
  const double h = T / double(kGridN - 1);
  double grid_max = 0.0;
  for (std::size_t i = 0; i < kGridN; ++i) {
    grid_max = std::max(grid_max, std::abs(eval_kind(kind, double(i) * h)));
  }
  const double tightened = grid_max + 0.5 * info.lipschitz * h;
  return std::min(info.analytic, tightened) * (1.0 + 1e-13);
}

void validate_kind(const TermKind& kind) {
  std::visit(
      [](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ConstTerm>) {
          require_finite(k.a, "a");
        } else if constexpr (std::is_same_v<K, RampTerm>) {
          require_finite(k.slope, "slope");
        } else if constexpr (std::is_same_v<K, TrigTerm>) {
          require_finite(k.a_cos, "a_cos");
          require_finite(k.a_sin, "a_sin");
          require_finite(k.omega, "omega");
          if (k.omega < 0.0) throw std::invalid_argument("omega must be >= 0");
        } else if constexpr (std::is_same_v<K, TrigAffineTerm>) {
          require_finite(k.a0, "a0");
          require_finite(k.a_cos, "a_cos");
          require_finite(k.a_sin, "a_sin");
          require_finite(k.omega, "omega");
          if (k.omega < 0.0) throw std::invalid_argument("omega must be >= 0");
        } else if constexpr (std::is_same_v<K, DampedMixTerm>) {
          require_finite(k.a_exp, "a_exp");
          require_finite(k.alpha, "alpha");
          require_finite(k.a_cos, "a_cos");
          require_finite(k.a_sin, "a_sin");
          require_finite(k.omega, "omega");
          require_finite(k.a0, "a0");
          if (k.alpha <= 0.0) throw std::invalid_argument("alpha must be > 0");
          if (k.omega < 0.0) throw std::invalid_argument("omega must be >= 0");
        } else if constexpr (std::is_same_v<K, WaveletPrimitiveTerm>) {
          require_finite(k.amplitude, "amplitude");
          if (k.level < -60 || k.level > 60) {
            throw std::invalid_argument("wavelet level out of range");
          }
        } else if constexpr (std::is_same_v<K, LampertiWarpTerm>) {
          require_finite(k.a, "a");
          require_finite(k.alpha, "alpha");
          require_finite(k.horizon, "horizon");
          require_finite(k.b, "b");
          if (k.alpha <= 0.0) throw std::invalid_argument("alpha must be > 0");
          if (k.horizon <= 0.0) throw std::invalid_argument("horizon must be > 0");
        } else {
          static_assert(std::is_same_v<K, TensorProductTerm>);
          if (k.factors.empty()) {
            throw std::invalid_argument("tensor product needs >= 1 factor");
          }
          for (const auto& f : k.factors) {
            if (f.dim() != 1) {
              throw std::invalid_argument("tensor factors must be 1-D");
            }
          }
        }
      },
      kind);
}

}  // namespace

AnalyticTerm::AnalyticTerm(TermKind kind, double horizon)
    : kind_(std::move(kind)), horizon_(horizon) {
  require_finite(horizon, "horizon");
  if (horizon <= 0.0) throw std::invalid_argument("horizon must be > 0");
  validate_kind(kind_);
  if (const auto* tp = std::get_if<TensorProductTerm>(&kind_)) {
    dim_ = int(tp->factors.size());
    double prod = 1.0;
    for (const auto& f : tp->factors) prod *= f.sup_bound();
    sup_bound_ = prod;
  } else {
    dim_ = 1;
    sup_bound_ = certified_sup_bound(kind_, horizon_);
  }
}

double AnalyticTerm::evaluate(double t) const {
  if (dim_ != 1) {
    throw std::invalid_argument("scalar evaluation of a multi-axis term");
  }
  return eval_kind(kind_, t);
}

double AnalyticTerm::evaluate(std::span<const double> t) const {
  if (int(t.size()) != dim_) {
    throw std::invalid_argument("evaluation point dimension mismatch");
  }
  if (const auto* tp = std::get_if<TensorProductTerm>(&kind_)) {
    return eval_tensor(*tp, t);
  }
  return eval_kind(kind_, t[0]);
}

AnalyticTerm AnalyticTerm::scaled(double c) const {
  TermKind k = kind_;
  std::visit(
      [c](auto& kk) {
        using K = std::decay_t<decltype(kk)>;
        if constexpr (std::is_same_v<K, ConstTerm>) {
          kk.a *= c;
        } else if constexpr (std::is_same_v<K, RampTerm>) {
          kk.slope *= c;
        } else if constexpr (std::is_same_v<K, TrigTerm>) {
          kk.a_cos *= c;
          kk.a_sin *= c;
        } else if constexpr (std::is_same_v<K, TrigAffineTerm>) {
          kk.a0 *= c;
          kk.a_cos *= c;
          kk.a_sin *= c;
        } else if constexpr (std::is_same_v<K, DampedMixTerm>) {
          kk.a_exp *= c;
          kk.a_cos *= c;
          kk.a_sin *= c;
          kk.a0 *= c;
        } else if constexpr (std::is_same_v<K, WaveletPrimitiveTerm>) {
          kk.amplitude *= c;
        } else if constexpr (std::is_same_v<K, LampertiWarpTerm>) {
          kk.a *= c;
        } else {
          static_assert(std::is_same_v<K, TensorProductTerm>);
          if (!kk.factors.empty()) kk.factors[0] = kk.factors[0].scaled(c);
        }
      },
      k);
  return AnalyticTerm(std::move(k), horizon_);
}

Grid::Grid(double horizon, std::size_t points_per_axis, int dim)
    : horizon_(horizon), n_(points_per_axis), dim_(dim) {
  require_finite(horizon, "horizon");
  if (horizon <= 0.0) throw std::invalid_argument("grid horizon must be > 0");
  if (n_ < 2) throw std::invalid_argument("grid needs >= 2 points per axis");
  if (dim_ < 1) throw std::invalid_argument("grid dim must be >= 1");
}

double Grid::point(std::size_t i) const {
  if (i >= n_) throw std::out_of_range("grid index");
  if (i == n_ - 1) return horizon_;  // hit the endpoint exactly
  return horizon_ * double(i) / double(n_ - 1);
}

std::size_t Grid::total_points() const {
  std::size_t total = 1;
  for (int d = 0; d < dim_; ++d) total *= n_;
  return total;
}

std::vector<double> Grid::point_at(std::size_t flat) const {
  std::vector<double> p(static_cast<std::size_t>(dim_), 0.0);
  for (int d = dim_ - 1; d >= 0; --d) {
    p[std::size_t(d)] = point(flat % n_);
    flat /= n_;
  }
  if (flat != 0) throw std::out_of_range("grid flat index");
  return p;
}

std::vector<double> Grid::axis_points() const {
  std::vector<double> p(n_);
  for (std::size_t i = 0; i < n_; ++i) p[i] = point(i);
  return p;
}

double evaluate(const AnalyticTerm& term, double t) { return term.evaluate(t); }

double evaluate(const AnalyticTerm& term, std::span<const double> t) {
  return term.evaluate(t);
}

std::vector<double> evaluate_on_grid(const AnalyticTerm& term, const Grid& grid) {
  if (term.dim() != grid.dim()) {
    throw std::invalid_argument("term/grid dimension mismatch");
  }
  std::vector<double> out;
  out.reserve(grid.total_points());
  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < grid.points_per_axis(); ++i) {
      out.push_back(term.evaluate(grid.point(i)));
    }
  } else {
    const std::size_t total = grid.total_points();
    for (std::size_t i = 0; i < total; ++i) {
      const auto p = grid.point_at(i);
      out.push_back(term.evaluate(std::span<const double>(p)));
    }
  }
  return out;
}

double haar_primitive(double x) { return tent(x); }

}  // namespace gpseries
