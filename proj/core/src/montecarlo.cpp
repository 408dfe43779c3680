#include "gpseries/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "gpseries/errors.hpp"

namespace gpseries {

namespace {

inline void philox_round(std::array<std::uint32_t, 4>& c,
                         const std::array<std::uint32_t, 2>& k) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  const std::uint64_t p0 = std::uint64_t(kM0) * c[0];
  const std::uint64_t p1 = std::uint64_t(kM1) * c[2];
  c = {std::uint32_t(p1 >> 32) ^ c[1] ^ k[0], std::uint32_t(p1),
       std::uint32_t(p0 >> 32) ^ c[3] ^ k[1], std::uint32_t(p0)};
}

inline double uniform_from_bits(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t(hi) << 32) | lo;
  // (0,1) strictly; 53-bit resolution centered in each cell
  return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Wichura's AS 241 (PPND16) rational approximation.
double normal_quantile_estimate(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
            1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
          1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

constexpr double kSqrt2 = 1.4142135623730950488016887242096981;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(
    const std::array<std::uint32_t, 4>& counter,
    const std::array<std::uint32_t, 2>& key) {
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  std::array<std::uint32_t, 4> c = counter;
  std::array<std::uint32_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    philox_round(c, k);
  }
  return c;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile requires p in (0,1)");
  }
  double x = normal_quantile_estimate(p);
  // One Halley step against Phi(x) computed from erfc.
  const double phi_x = 0.5 * std::erfc(-x / kSqrt2);
  const double density = kInvSqrt2Pi * std::exp(-0.5 * x * x);
  if (density > 0.0) {
    const double diff = (phi_x - p) / density;
    x -= diff / (1.0 + 0.5 * x * diff);
  }
  return x;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream)
    : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
      counter_{0, 0, std::uint32_t(stream), std::uint32_t(stream >> 32)} {}

double NormalStream::next() {
  if (lane_ >= 2) {
    block_ = Philox4x32::block(counter_, key_);
    if (++counter_[0] == 0) ++counter_[1];  // 64-bit block index
    lane_ = 0;
  }
  const double u = lane_ == 0 ? uniform_from_bits(block_[0], block_[1])
                              : uniform_from_bits(block_[2], block_[3]);
  ++lane_;
  return normal_quantile(u);
}

void SamplerConfig::validate() const {
  if (n_replicates < 1) throw std::invalid_argument("need n_replicates >= 1");
}

namespace {

// Runs fn(r) for r in [0, n) across a deterministic partition of replicates.
template <typename Fn>
void parallel_replicates(std::size_t n, unsigned threads, const Fn& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, 64);
  if (threads <= 1 || n < 2) {
    for (std::size_t r = 0; r < n; ++r) fn(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    try {
      for (;;) {
        const std::size_t r = next.fetch_add(1);
        if (r >= n) return;
        fn(r);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

Eigen::MatrixXd family_values_on_grid(const ExpansionFamily& family,
                                      const Grid& grid, std::size_t n_terms) {
  if (grid.dim() != family.kernel().dim()) {
    throw std::invalid_argument("family/grid dimension mismatch");
  }
  const std::size_t n_points = grid.total_points();
  Eigen::MatrixXd values{static_cast<Eigen::Index>(n_terms),
                         static_cast<Eigen::Index>(n_points)};
  for (std::size_t j = 0; j < n_terms; ++j) {
    const auto row = evaluate_on_grid(family.term(j), grid);
    for (std::size_t i = 0; i < n_points; ++i) {
      values(Eigen::Index(j), Eigen::Index(i)) = row[i];
    }
  }
  return values;
}

}  // namespace

Eigen::MatrixXd sample_paths(const ExpansionFamily& family,
                             const SamplerConfig& cfg, std::size_t n_terms,
                             unsigned threads) {
  cfg.validate();
  if (n_terms > family.size()) {
    throw std::invalid_argument("n_terms exceeds the family size");
  }
  const Eigen::MatrixXd values = family_values_on_grid(family, cfg.grid, n_terms);
  const auto n_points = values.cols();
  Eigen::MatrixXd paths =
      Eigen::MatrixXd::Zero(Eigen::Index(cfg.n_replicates), n_points);
  parallel_replicates(cfg.n_replicates, threads, [&](std::size_t r) {
    NormalStream stream(cfg.seed, r);
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(n_points);
    for (std::size_t j = 0; j < n_terms; ++j) {
      acc += stream.next() * values.row(Eigen::Index(j));
    }
    paths.row(Eigen::Index(r)) = acc;
  });
  return paths;
}

RemainderCurve estimate_remainder(const ExpansionFamily& family,
                                  const SamplerConfig& cfg,
                                  const std::vector<std::size_t>& truncations,
                                  unsigned threads) {
  cfg.validate();
  if (truncations.empty()) throw std::invalid_argument("need truncations");
  for (std::size_t i = 1; i < truncations.size(); ++i) {
    if (truncations[i] <= truncations[i - 1]) {
      throw std::invalid_argument("truncations must be strictly increasing");
    }
  }
  if (truncations.back() > family.size()) {
    throw std::invalid_argument("truncation exceeds the family size");
  }

  const std::size_t size = family.size();
  const Eigen::MatrixXd values = family_values_on_grid(family, cfg.grid, size);
  const auto n_points = values.cols();
  const std::size_t n_curves = truncations.size();
  const std::size_t n_min = truncations.front();

  // Per replicate, accumulate the suffix sum from the top term downward and
  // snapshot the sup at every truncation boundary.
  Eigen::MatrixXd sups(Eigen::Index(cfg.n_replicates), Eigen::Index(n_curves));
  parallel_replicates(cfg.n_replicates, threads, [&](std::size_t r) {
    NormalStream stream(cfg.seed, r);
    std::vector<double> xi(size);
    for (std::size_t j = 0; j < size; ++j) xi[j] = stream.next();
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(n_points);
    std::size_t cursor = n_curves;  // walks backwards over truncations
    while (cursor > 0 && truncations[cursor - 1] == size) {
      --cursor;  // truncating at the full size leaves an empty sum
      sups(Eigen::Index(r), Eigen::Index(cursor)) = 0.0;
    }
    for (std::size_t j = size; j-- > n_min;) {
      acc += xi[j] * values.row(Eigen::Index(j));
      while (cursor > 0 && truncations[cursor - 1] == j) {
        --cursor;
        sups(Eigen::Index(r), Eigen::Index(cursor)) =
            acc.cwiseAbs().maxCoeff();
      }
    }
    if (cursor != 0) throw std::logic_error("truncation walk out of sync");
  });

  RemainderCurve curve;
  curve.truncations = truncations;
  curve.estimates.resize(n_curves);
  curve.std_errors.resize(n_curves);
  const double n_rep = double(cfg.n_replicates);
  for (std::size_t k = 0; k < n_curves; ++k) {
    const auto col = sups.col(Eigen::Index(k));
    const double mean = col.mean();
    curve.estimates[k] = mean;
    if (cfg.n_replicates > 1) {
      const double var =
          (col.array() - mean).square().sum() / (n_rep - 1.0);
      curve.std_errors[k] = std::sqrt(var / n_rep);
    } else {
      curve.std_errors[k] = 0.0;
    }
  }
  return curve;
}

std::pair<double, double> fit_rate(RemainderCurve& curve, double log_exponent) {
  const std::size_t m = curve.truncations.size();
  if (m < 4) throw std::invalid_argument("rate fit needs >= 4 points");
  const double span = double(curve.truncations.back()) /
                      double(curve.truncations.front());
  if (span < 4.0) throw std::invalid_argument("rate fit needs >= 2 octaves");

  std::vector<double> xs(m), ys(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (!(curve.estimates[k] > 0.0)) {
      throw std::invalid_argument("rate fit needs positive estimates");
    }
    const double n = double(curve.truncations[k]);
    xs[k] = std::log(n);
    ys[k] = std::log(curve.estimates[k]) - log_exponent * std::log(std::log(n));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= double(m);
  my /= double(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double resid = ys[k] - (intercept + slope * xs[k]);
    ssr += resid * resid;
  }
  const double se = std::sqrt(ssr / double(m - 2) / sxx);
  curve.fitted_exponent = slope;
  curve.log_exponent = log_exponent;
  curve.ci_halfwidth = 2.0 * se;
  return {slope, curve.ci_halfwidth};
}

}  // namespace gpseries
