#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <vector>

#include "gpseries/expansions.hpp"
#include "gpseries/terms.hpp"

namespace gpseries {

// Counter-based generator (Philox 4x32, 10 rounds). A block is a pure
// function of (key, counter), so replicate streams never need coordination.
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(
      const std::array<std::uint32_t, 4>& counter,
      const std::array<std::uint32_t, 2>& key);
};

// Standard normal inverse CDF, accurate to full double precision (rational
// initializer polished by one Halley step on erfc).
double normal_quantile(double p);

// Deterministic N(0,1) stream for one (seed, stream) pair; two draws per
// Philox block via the inverse CDF, so consumption is fixed per index.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);
  double next();

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  unsigned lane_ = 2;  // 2 = block exhausted
};

struct SamplerConfig {
  std::uint64_t seed = 0;
  std::size_t n_replicates = 1;
  Grid grid{1.0, 1025};

  void validate() const;
};

// Row r holds replicate r on the grid: path(r, i) = sum_{j<n_terms}
// xi_j^{(r)} f_j(t_i). Bitwise reproducible for fixed (seed, grid, n_terms)
// whatever the thread count.
Eigen::MatrixXd sample_paths(const ExpansionFamily& family,
                             const SamplerConfig& cfg, std::size_t n_terms,
                             unsigned threads = 1);

struct RemainderCurve {
  std::vector<std::size_t> truncations;
  std::vector<double> estimates;   // mean over replicates of sup |tail|
  std::vector<double> std_errors;
  double fitted_exponent = 0.0;    // slope of the log-log fit, set by fit_rate
  double log_exponent = 0.0;       // (gamma + 1/2) used when detrending
  double ci_halfwidth = 0.0;
};

// Tail proxy: for each truncation n, mean over replicates of
// max_grid |sum_{n <= j < size} xi_j f_j(t)|. The proxy uses the finite rest
// of the family, so keep size >= 4 * max(truncations) for small bias.
RemainderCurve estimate_remainder(const ExpansionFamily& family,
                                  const SamplerConfig& cfg,
                                  const std::vector<std::size_t>& truncations,
                                  unsigned threads = 1);

// OLS of log(estimate) - log_exponent * log log n against log n.
// Returns (slope, half-width) and stores both in the curve.
std::pair<double, double> fit_rate(RemainderCurve& curve,
                                   double log_exponent = 0.5);

}  // namespace gpseries
