#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "gpseries/terms.hpp"

namespace gpseries {

// Closed-form covariance kernels; ground truth for every diagnostic.

struct BrownianMotionKernel {
  double horizon = 1.0;  // C(s,t) = min(s,t)
};

struct BrownianBridgeKernel {
  double horizon = 1.0;  // C(s,t) = min(s,t) - s t / T
};

struct FractionalBMKernel {
  double rho = 0.5;  // Hurst-type index in (0,1)
  double horizon = 1.0;
};

struct OrnsteinUhlenbeckKernel {
  double alpha = 1.0;
  double sigma = 0.0;  // 0 selects the unit-variance default sqrt(2 alpha)
  double horizon = 1.0;
};

struct FractionalOUKernel {
  double rho = 1.0;  // index in (0,2)
  double alpha = 1.0;
  double horizon = 1.0;  // C(s,t) = exp(-alpha |s-t|^rho)
};

// gamma(t) = (1 - |t|/support)^+
struct TriangleKernelSpec {
  double support = 1.0;
  double horizon = 1.0;
};

// Stationary kernel with even, user-supplied gamma. Either a closed form or a
// uniform tabulation on [0, table_span] with linear interpolation.
class StationaryConvexKernel {
 public:
  StationaryConvexKernel(std::function<double(double)> gamma, double horizon);
  // Tabulated values at 0, step, 2 step, ... Step must not exceed max_step.
  StationaryConvexKernel(std::vector<double> table, double step,
                         double max_step, double horizon);

  double gamma(double tau) const;
  double horizon() const { return horizon_; }
  bool tabulated() const { return !table_.empty(); }
  const std::vector<double>& table() const { return table_; }
  double step() const { return step_; }
  // Looks for sign changes of the discrete second difference; empty when the
  // tabulation (or a dense sampling of the closed form) looks convex.
  std::vector<double> convexity_violations() const;

 private:
  std::function<double(double)> fn_;
  std::vector<double> table_;
  double step_ = 0.0;
  double horizon_;
};

class Kernel;

struct TensorKernelSpec {
  std::vector<Kernel> axes;
};

using KernelKind =
    std::variant<BrownianMotionKernel, BrownianBridgeKernel, FractionalBMKernel,
                 OrnsteinUhlenbeckKernel, FractionalOUKernel,
                 StationaryConvexKernel, TriangleKernelSpec, TensorKernelSpec>;

class Kernel {
 public:
  explicit Kernel(KernelKind kind);

  double cov(double s, double t) const;
  double cov(std::span<const double> s, std::span<const double> t) const;

  int dim() const { return dim_; }
  double horizon() const { return horizon_; }  // per axis
  const KernelKind& kind() const { return kind_; }

  // gamma with C(s,t) = gamma(|s-t|) for stationary kinds, nullopt otherwise.
  std::optional<std::function<double(double)>> stationary_gamma() const;

  // max_t C(t,t) over [0,horizon]^dim, exact per kind.
  double max_diagonal() const;

 private:
  KernelKind kind_;
  int dim_ = 1;
  double horizon_ = 1.0;
};

double cov(const Kernel& kernel, double s, double t);
double cov(const Kernel& kernel, std::span<const double> s,
           std::span<const double> t);

// Entry (i,j) = cov(p_i, p_j); upper triangle computed, mirrored, so the
// result is exactly symmetric.
Eigen::MatrixXd gram_matrix(const Kernel& kernel, std::span<const double> points);
Eigen::MatrixXd gram_matrix(const Kernel& kernel,
                            std::span<const std::vector<double>> points);
Eigen::MatrixXd gram_matrix(const Kernel& kernel, const Grid& grid);

}  // namespace gpseries
