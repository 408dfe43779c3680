#include "gpseries/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace gpseries {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("non-finite parameter: ") + what);
  }
}

void check_domain(double s, double t, double T) {
  if (!(s >= 0.0 && s <= T && t >= 0.0 && t <= T)) {
    throw std::domain_error("kernel arguments outside [0, horizon]");
  }
}

double ou_sigma(const OrnsteinUhlenbeckKernel& k) {
  return k.sigma > 0.0 ? k.sigma : std::sqrt(2.0 * k.alpha);
}

}  // namespace

StationaryConvexKernel::StationaryConvexKernel(std::function<double(double)> gamma,
                                               double horizon)
    : fn_(std::move(gamma)), horizon_(horizon) {
  if (!fn_) throw std::invalid_argument("gamma callable required");
  require_finite(horizon, "horizon");
  if (horizon <= 0.0) throw std::invalid_argument("horizon must be > 0");
}

StationaryConvexKernel::StationaryConvexKernel(std::vector<double> table,
                                               double step, double max_step,
                                               double horizon)
    : table_(std::move(table)), step_(step), horizon_(horizon) {
  require_finite(step, "step");
  require_finite(max_step, "max_step");
  require_finite(horizon, "horizon");
  if (horizon <= 0.0) throw std::invalid_argument("horizon must be > 0");
  if (table_.size() < 2) throw std::invalid_argument("tabulation needs >= 2 samples");
  if (step <= 0.0 || step > max_step) {
    throw std::invalid_argument("tabulation step violates the resolution bound");
  }
  if (step * double(table_.size() - 1) < horizon) {
    throw std::invalid_argument("tabulation must cover [0, horizon]");
  }
  for (double v : table_) require_finite(v, "table value");
}

double StationaryConvexKernel::gamma(double tau) const {
  tau = std::abs(tau);
  if (fn_) return fn_(tau);
  const double pos = tau / step_;
  const auto i = std::size_t(pos);
  if (i + 1 >= table_.size()) return table_.back();
  const double w = pos - double(i);
  return table_[i] * (1.0 - w) + table_[i + 1] * w;
}

std::vector<double> StationaryConvexKernel::convexity_violations() const {
  std::vector<double> bad;
  // Sample the closed form at the same resolution a tabulation would use.
  const std::size_t n = table_.empty() ? 257 : table_.size();
  const double h = table_.empty() ? horizon_ / double(n - 1) : step_;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double g0 = gamma(double(i - 1) * h);
    const double g1 = gamma(double(i) * h);
    const double g2 = gamma(double(i + 1) * h);
    const double second = g0 - 2.0 * g1 + g2;
    if (second < -1e-12 * (std::abs(g0) + std::abs(g2) + 1.0)) {
      bad.push_back(double(i) * h);
    }
  }
  return bad;
}

Kernel::Kernel(KernelKind kind) : kind_(std::move(kind)) {
  std::visit(
      [this](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, BrownianMotionKernel> ||
                      std::is_same_v<K, BrownianBridgeKernel>) {
          require_finite(k.horizon, "horizon");
          if (k.horizon <= 0.0) throw std::invalid_argument("horizon must be > 0");
          horizon_ = k.horizon;
        } else if constexpr (std::is_same_v<K, FractionalBMKernel>) {
          require_finite(k.rho, "rho");
          require_finite(k.horizon, "horizon");
          if (!(k.rho > 0.0 && k.rho < 1.0)) {
            throw std::invalid_argument("fBm index must lie in (0,1)");
          }
          if (k.horizon <= 0.0) throw std::invalid_argument("horizon must be > 0");
          horizon_ = k.horizon;
        } else if constexpr (std::is_same_v<K, OrnsteinUhlenbeckKernel>) {
          require_finite(k.alpha, "alpha");
          require_finite(k.sigma, "sigma");
          require_finite(k.horizon, "horizon");
          if (k.alpha <= 0.0) throw std::invalid_argument("alpha must be > 0");
          if (k.sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
          if (k.horizon <= 0.0) throw std::invalid_argument("horizon must be > 0");
          horizon_ = k.horizon;
        } else if constexpr (std::is_same_v<K, FractionalOUKernel>) {
          require_finite(k.rho, "rho");
          require_finite(k.alpha, "alpha");
          require_finite(k.horizon, "horizon");
          if (!(k.rho > 0.0 && k.rho < 2.0)) {
            throw std::invalid_argument("fractional OU index must lie in (0,2)");
          }
          if (k.alpha <= 0.0) throw std::invalid_argument("alpha must be > 0");
          if (k.horizon <= 0.0) throw std::invalid_argument("horizon must be > 0");
          horizon_ = k.horizon;
        } else if constexpr (std::is_same_v<K, StationaryConvexKernel>) {
          horizon_ = k.horizon();
        } else if constexpr (std::is_same_v<K, TriangleKernelSpec>) {
          require_finite(k.support, "support");
          require_finite(k.horizon, "horizon");
          if (k.support <= 0.0) throw std::invalid_argument("support must be > 0");
          if (k.horizon <= 0.0) throw std::invalid_argument("horizon must be > 0");
          horizon_ = k.horizon;
        } else {
          static_assert(std::is_same_v<K, TensorKernelSpec>);
          if (k.axes.size() < 1) {
            throw std::invalid_argument("tensor kernel needs >= 1 axis");
          }
          for (const auto& axis : k.axes) {
            if (axis.dim() != 1) {
              throw std::invalid_argument("tensor axes must be 1-D kernels");
            }
          }
          dim_ = int(k.axes.size());
          horizon_ = k.axes.front().horizon();
        }
      },
      kind_);
}

double Kernel::cov(double s, double t) const {
  if (dim_ != 1) throw std::invalid_argument("scalar cov on a multi-axis kernel");
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, BrownianMotionKernel>) {
          check_domain(s, t, k.horizon);
          return std::min(s, t);
        } else if constexpr (std::is_same_v<K, BrownianBridgeKernel>) {
          check_domain(s, t, k.horizon);
          return std::min(s, t) - s * t / k.horizon;
        } else if constexpr (std::is_same_v<K, FractionalBMKernel>) {
          check_domain(s, t, k.horizon);
          const double p = 2.0 * k.rho;
          return 0.5 * (std::pow(s, p) + std::pow(t, p) -
                        std::pow(std::abs(s - t), p));
        } else if constexpr (std::is_same_v<K, OrnsteinUhlenbeckKernel>) {
          check_domain(s, t, k.horizon);
          const double sig = ou_sigma(k);
          return sig * sig / (2.0 * k.alpha) *
                 std::exp(-k.alpha * std::abs(s - t));
        } else if constexpr (std::is_same_v<K, FractionalOUKernel>) {
          check_domain(s, t, k.horizon);
          return std::exp(-k.alpha * std::pow(std::abs(s - t), k.rho));
        } else if constexpr (std::is_same_v<K, StationaryConvexKernel>) {
          check_domain(s, t, k.horizon());
          return k.gamma(std::abs(s - t));
        } else if constexpr (std::is_same_v<K, TriangleKernelSpec>) {
          check_domain(s, t, k.horizon);
          return std::max(0.0, 1.0 - std::abs(s - t) / k.support);
        } else {
          static_assert(std::is_same_v<K, TensorKernelSpec>);
          return 0.0;  // unreachable, dim_ > 1
        }
      },
      kind_);
}

double Kernel::cov(std::span<const double> s, std::span<const double> t) const {
  if (int(s.size()) != dim_ || int(t.size()) != dim_) {
    throw std::invalid_argument("cov argument dimension mismatch");
  }
  if (const auto* tk = std::get_if<TensorKernelSpec>(&kind_)) {
    double prod = 1.0;
    for (std::size_t i = 0; i < tk->axes.size(); ++i) {
      prod *= tk->axes[i].cov(s[i], t[i]);
    }
    return prod;
  }
  return cov(s[0], t[0]);
}

std::optional<std::function<double(double)>> Kernel::stationary_gamma() const {
  return std::visit(
      [](const auto& k) -> std::optional<std::function<double(double)>> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, OrnsteinUhlenbeckKernel>) {
          const double a = k.alpha;
          const double v = ou_sigma(k) * ou_sigma(k) / (2.0 * k.alpha);
          return [a, v](double tau) { return v * std::exp(-a * std::abs(tau)); };
        } else if constexpr (std::is_same_v<K, FractionalOUKernel>) {
          const double a = k.alpha;
          const double r = k.rho;
          return [a, r](double tau) {
            return std::exp(-a * std::pow(std::abs(tau), r));
          };
        } else if constexpr (std::is_same_v<K, StationaryConvexKernel>) {
          return [k](double tau) { return k.gamma(tau); };
        } else if constexpr (std::is_same_v<K, TriangleKernelSpec>) {
          const double s0 = k.support;
          return [s0](double tau) {
            return std::max(0.0, 1.0 - std::abs(tau) / s0);
          };
        } else {
          return std::nullopt;
        }
      },
      kind_);
}

double Kernel::max_diagonal() const {
  return std::visit(
      [](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, BrownianMotionKernel>) {
          return k.horizon;
        } else if constexpr (std::is_same_v<K, BrownianBridgeKernel>) {
          return 0.25 * k.horizon;  // t(1 - t/T) peaks at T/2
        } else if constexpr (std::is_same_v<K, FractionalBMKernel>) {
          return std::pow(k.horizon, 2.0 * k.rho);
        } else if constexpr (std::is_same_v<K, OrnsteinUhlenbeckKernel>) {
          const double sig = ou_sigma(k);
          return sig * sig / (2.0 * k.alpha);
        } else if constexpr (std::is_same_v<K, FractionalOUKernel>) {
          return 1.0;
        } else if constexpr (std::is_same_v<K, StationaryConvexKernel>) {
          return k.gamma(0.0);
        } else if constexpr (std::is_same_v<K, TriangleKernelSpec>) {
          return 1.0;
        } else {
          static_assert(std::is_same_v<K, TensorKernelSpec>);
          double prod = 1.0;
          for (const auto& axis : k.axes) prod *= axis.max_diagonal();
          return prod;
        }
      },
      kind_);
}

double cov(const Kernel& kernel, double s, double t) { return kernel.cov(s, t); }

double cov(const Kernel& kernel, std::span<const double> s,
           std::span<const double> t) {
  return kernel.cov(s, t);
}

Eigen::MatrixXd gram_matrix(const Kernel& kernel, std::span<const double> points) {
  if (kernel.dim() != 1) {
    throw std::invalid_argument("1-D gram on a multi-axis kernel");
  }
  const auto n = Eigen::Index(points.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = kernel.cov(points[std::size_t(i)], points[std::size_t(j)]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

Eigen::MatrixXd gram_matrix(const Kernel& kernel,
                            std::span<const std::vector<double>> points) {
  const auto n = Eigen::Index(points.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = kernel.cov(points[std::size_t(i)], points[std::size_t(j)]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

Eigen::MatrixXd gram_matrix(const Kernel& kernel, const Grid& grid) {
  if (kernel.dim() != grid.dim()) {
    throw std::invalid_argument("kernel/grid dimension mismatch");
  }
  if (grid.dim() == 1) {
    const auto pts = grid.axis_points();
    return gram_matrix(kernel, std::span<const double>(pts));
  }
  std::vector<std::vector<double>> pts;
  pts.reserve(grid.total_points());
  for (std::size_t i = 0; i < grid.total_points(); ++i) {
    pts.push_back(grid.point_at(i));
  }
  return gram_matrix(kernel, std::span<const std::vector<double>>(pts));
}

}  // namespace gpseries
