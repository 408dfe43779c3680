#include "gpseries/expansions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "gpseries/errors.hpp"

namespace gpseries {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw std::invalid_argument(std::string(what) + " must be positive");
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

const char* provenance_tag(Provenance p) {
  switch (p) {
    case Provenance::BrownianKL: return "bm_kl";
    case Provenance::BrownianSplitFrame: return "bm_split_frame";
    case Provenance::BrownianPaleyWiener: return "bm_paley_wiener";
    case Provenance::BrownianWavelet: return "bm_wavelet";
    case Provenance::FractionalBMDvZ: return "fbm_dvz";
    case Provenance::BridgeKL: return "bridge_kl";
    case Provenance::OUConvolution: return "ou_conv";
    case Provenance::OULamperti: return "ou_lamperti";
    case Provenance::FOUTrigFrame: return "fou_trig";
    case Provenance::ConvexStationaryTrigFrame: return "convex_trig";
    case Provenance::TensorSheet: return "tensor_sheet";
  }
  throw std::logic_error("unknown provenance");
}

Provenance provenance_from_tag(const std::string& tag) {
  static const std::map<std::string, Provenance> lut = {
      {"bm_kl", Provenance::BrownianKL},
      {"bm_split_frame", Provenance::BrownianSplitFrame},
      {"bm_paley_wiener", Provenance::BrownianPaleyWiener},
      {"bm_wavelet", Provenance::BrownianWavelet},
      {"fbm_dvz", Provenance::FractionalBMDvZ},
      {"bridge_kl", Provenance::BridgeKL},
      {"ou_conv", Provenance::OUConvolution},
      {"ou_lamperti", Provenance::OULamperti},
      {"fou_trig", Provenance::FOUTrigFrame},
      {"convex_trig", Provenance::ConvexStationaryTrigFrame},
      {"tensor_sheet", Provenance::TensorSheet},
  };
  const auto it = lut.find(tag);
  if (it == lut.end()) throw SpecError("unknown provenance tag: " + tag);
  return it->second;
}

ExpansionFamily::ExpansionFamily(std::vector<AnalyticTerm> terms, Kernel kernel,
                                 Provenance provenance,
                                 std::optional<RateParams> rate_params,
                                 std::vector<std::string> notes)
    : terms_(std::move(terms)),
      kernel_(std::move(kernel)),
      provenance_(provenance),
      rate_params_(rate_params),
      notes_(std::move(notes)) {
  const double cap = std::sqrt(kernel_.max_diagonal()) + 1e-9;
  for (std::size_t j = 0; j < terms_.size(); ++j) {
    const auto& t = terms_[j];
    if (!std::isfinite(t.sup_bound())) {
      throw std::invalid_argument("term sup bound must be finite");
    }
    if (t.dim() != kernel_.dim()) {
      throw std::invalid_argument("term/kernel dimension mismatch");
    }
    if (t.sup_bound() > cap) {
      throw std::invalid_argument(
          "term " + std::to_string(j) + " sup bound " +
          format_double(t.sup_bound()) + " exceeds the frame cap " +
          format_double(cap));
    }
  }
}

ExpansionFamily build_bm_kl(double T, std::size_t n) {
  require_positive(T, "T");
  if (n < 1) throw std::invalid_argument("need n >= 1");
  std::vector<AnalyticTerm> terms;
  terms.reserve(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const double half = double(j) - 0.5;
    const double amp = std::sqrt(2.0 * T) / (kPi * half);
    terms.emplace_back(TrigTerm{0.0, amp, kPi * half / T}, T);
  }
  return {std::move(terms), Kernel(BrownianMotionKernel{T}),
          Provenance::BrownianKL, RateParams{1.0, 0.0}};
}

ExpansionFamily build_bm_split_frame(double T, std::size_t n_pairs) {
  require_positive(T, "T");
  if (n_pairs < 1) throw std::invalid_argument("need n_pairs >= 1");
  std::vector<AnalyticTerm> terms;
  terms.reserve(2 * n_pairs);
  const double root_t = std::sqrt(T);
  for (std::size_t j = 1; j <= n_pairs; ++j) {
    // Second kind (1 - cos) leads within each pair.
    const double amp2 = root_t / (kPi * double(j));
    terms.emplace_back(TrigAffineTerm{amp2, -amp2, 0.0, kPi * double(j) / T}, T);
    const double half = double(j) - 0.5;
    const double amp1 = root_t / (kPi * half);
    terms.emplace_back(TrigTerm{0.0, amp1, kPi * half / T}, T);
  }
  return {std::move(terms), Kernel(BrownianMotionKernel{T}),
          Provenance::BrownianSplitFrame, RateParams{1.0, 0.0}};
}

ExpansionFamily build_bm_paley_wiener(double T, std::size_t n) {
  require_positive(T, "T");
  if (n < 1) throw std::invalid_argument("need n >= 1");
  std::vector<AnalyticTerm> terms;
  terms.reserve(n);
  terms.emplace_back(RampTerm{1.0 / std::sqrt(T)}, T);
  for (std::size_t j = 1; terms.size() < n; ++j) {
    const double amp = std::sqrt(T) / (std::sqrt(2.0) * kPi * double(j));
    const double omega = 2.0 * kPi * double(j) / T;
    terms.emplace_back(TrigAffineTerm{amp, -amp, 0.0, omega}, T);
    if (terms.size() < n) {
      terms.emplace_back(TrigTerm{0.0, amp, omega}, T);
    }
  }
  return {std::move(terms), Kernel(BrownianMotionKernel{T}),
          Provenance::BrownianPaleyWiener, RateParams{1.0, 0.0}};
}

ExpansionFamily build_bm_wavelet(double T, int level_min, int level_max,
                                 std::size_t max_shifts_per_level,
                                 WaveletPrimitiveId primitive) {
  require_positive(T, "T");
  if (level_min > level_max) throw std::invalid_argument("empty level window");
  std::vector<AnalyticTerm> terms;
  for (int level = level_min; level <= level_max; ++level) {
    // Support of shift k is (k 2^-level, (k+1) 2^-level): it meets (0,T) for
    // k = 0 .. ceil(2^level T) - 1.
    const double scale = std::ldexp(1.0, level);
    const long k_end = std::max<long>(1, long(std::ceil(scale * T)));
    long emitted = 0;
    for (long k = 0; k < k_end; ++k) {
      if (max_shifts_per_level > 0 &&
          emitted >= long(max_shifts_per_level)) {
        break;
      }
      terms.emplace_back(WaveletPrimitiveTerm{level, k, 1.0, primitive}, T);
      ++emitted;
    }
  }
  if (terms.empty()) throw std::invalid_argument("empty wavelet window");
  return {std::move(terms), Kernel(BrownianMotionKernel{T}),
          Provenance::BrownianWavelet, std::nullopt};
}

ExpansionFamily build_fbm_dvz(double rho, double T, std::size_t n_pairs) {
  require_positive(T, "T");
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("DvZ family requires rho in (0,1)");
  }
  if (n_pairs < 1) throw std::invalid_argument("need n_pairs >= 1");
  const auto x = bessel_positive_zeros(BesselOrder(-rho), n_pairs);
  const auto y = bessel_positive_zeros(BesselOrder(1.0 - rho), n_pairs);
  const double c_rho =
      std::sqrt(std::tgamma(1.0 + 2.0 * rho) * std::sin(kPi * rho) / kPi);
  const double scale = std::pow(T, rho) * c_rho * std::sqrt(2.0);
  std::vector<AnalyticTerm> terms;
  terms.reserve(2 * n_pairs);
  for (std::size_t j = 0; j < n_pairs; ++j) {
    // Second kind (1 - cos at zeros of J_{1-rho}) leads within each pair.
    const double amp2 =
        scale / (std::abs(bessel_j(-rho, y[j])) * std::pow(y[j], rho + 1.0));
    terms.emplace_back(TrigAffineTerm{amp2, -amp2, 0.0, y[j] / T}, T);
    const double amp1 = scale / (std::abs(bessel_j(1.0 - rho, x[j])) *
                                 std::pow(x[j], rho + 1.0));
    terms.emplace_back(TrigTerm{0.0, amp1, x[j] / T}, T);
  }
  return {std::move(terms), Kernel(FractionalBMKernel{rho, T}),
          Provenance::FractionalBMDvZ, RateParams{rho + 0.5, 0.0}};
}

ExpansionFamily build_bridge_kl(double T, std::size_t n) {
  require_positive(T, "T");
  if (n < 1) throw std::invalid_argument("need n >= 1");
  std::vector<AnalyticTerm> terms;
  terms.reserve(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const double amp = std::sqrt(2.0 * T) / (kPi * double(j));
    terms.emplace_back(TrigTerm{0.0, amp, kPi * double(j) / T}, T);
  }
  return {std::move(terms), Kernel(BrownianBridgeKernel{T}),
          Provenance::BridgeKL, RateParams{1.0, 0.0}};
}

ExpansionFamily build_ou_conv(double alpha, double sigma, double T,
                              std::size_t n) {
  require_positive(alpha, "alpha");
  require_positive(T, "T");
  if (n < 1) throw std::invalid_argument("need n >= 1");
  if (sigma <= 0.0) sigma = std::sqrt(2.0 * alpha);
  std::vector<AnalyticTerm> terms;
  terms.reserve(n);
  terms.emplace_back(
      DampedMixTerm{sigma / std::sqrt(2.0 * alpha), alpha, 0.0, 0.0, 0.0, 0.0},
      T);
  const double base = sigma * std::sqrt(2.0 / T);
  for (std::size_t j = 1; terms.size() < n; ++j) {
    const double omega = kPi * (double(j) - 0.5) / T;
    const double denom = alpha * alpha + omega * omega;
    terms.emplace_back(DampedMixTerm{-base * alpha / denom, alpha,
                                     base * alpha / denom, base * omega / denom,
                                     omega, 0.0},
                       T);
  }
  return {std::move(terms), Kernel(OrnsteinUhlenbeckKernel{alpha, sigma, T}),
          Provenance::OUConvolution, RateParams{1.0, 0.0}};
}

ExpansionFamily build_ou_lamperti(double alpha, double sigma, double T,
                                  std::size_t n) {
  require_positive(alpha, "alpha");
  require_positive(T, "T");
  if (n < 1) throw std::invalid_argument("need n >= 1");
  if (sigma <= 0.0) sigma = std::sqrt(2.0 * alpha);
  std::vector<AnalyticTerm> terms;
  terms.reserve(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const double half = double(j) - 0.5;
    terms.emplace_back(
        LampertiWarpTerm{sigma / (std::sqrt(alpha) * kPi * half), alpha, T,
                         kPi * half},
        T);
  }
  return {std::move(terms), Kernel(OrnsteinUhlenbeckKernel{alpha, sigma, T}),
          Provenance::OULamperti, RateParams{1.0, 0.0}};
}

namespace {

// Shared assembly for the two trigonometric-frame builders.
ExpansionFamily build_trig_frame(const std::function<double(double)>& gamma,
                                 Kernel kernel, double T, std::size_t n_coeffs,
                                 const QuadratureConfig& cfg, unsigned threads,
                                 Provenance provenance,
                                 std::optional<RateParams> rate,
                                 std::vector<std::string> notes) {
  auto beta = fourier_cosine_coefficients(gamma, T, n_coeffs + 1, cfg, threads);
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (beta[j] < -cfg.abs_tol) {
      throw NumericalError("negative frame coefficient beta[" +
                           std::to_string(j) + "] = " + format_double(beta[j]) +
                           "; the trigonometric frame does not exist here");
    }
    if (beta[j] < 0.0) {
      notes.push_back("beta[" + std::to_string(j) + "] clamped to zero (was " +
                      format_double(beta[j]) + ")");
      beta[j] = 0.0;
    }
  }
  std::vector<AnalyticTerm> terms;
  terms.reserve(2 * n_coeffs + 1);
  terms.emplace_back(ConstTerm{std::sqrt(beta[0])}, T);
  for (std::size_t j = 1; j <= n_coeffs; ++j) {
    const double amp = std::sqrt(beta[j]);
    const double omega = kPi * double(j) / T;
    terms.emplace_back(TrigTerm{0.0, amp, omega}, T);  // f_{2j-1} = sin
    terms.emplace_back(TrigTerm{amp, 0.0, omega}, T);  // f_{2j}   = cos
  }
  return {std::move(terms), std::move(kernel), provenance, rate,
          std::move(notes)};
}

}  // namespace

ExpansionFamily build_fou_trig(double rho, double alpha, double T,
                               std::size_t n_coeffs, const QuadratureConfig& cfg,
                               unsigned threads) {
  require_positive(alpha, "alpha");
  require_positive(T, "T");
  if (!(rho > 0.0 && rho < 2.0)) {
    throw std::invalid_argument("fractional OU index must lie in (0,2)");
  }
  if (n_coeffs < 1) throw std::invalid_argument("need n_coeffs >= 1");
  const auto gamma = [alpha, rho](double t) {
    return std::exp(-alpha * std::pow(std::abs(t), rho));
  };
  std::optional<RateParams> rate;
  if (rho <= 1.0) rate = RateParams{0.5 * (1.0 + rho), 0.0};
  return build_trig_frame(gamma, Kernel(FractionalOUKernel{rho, alpha, T}), T,
                          n_coeffs, cfg, threads, Provenance::FOUTrigFrame,
                          rate, {});
}

ExpansionFamily build_convex_stationary_trig(const Kernel& kernel, double T,
                                             std::size_t n_coeffs,
                                             const QuadratureConfig& cfg,
                                             unsigned threads) {
  require_positive(T, "T");
  if (n_coeffs < 1) throw std::invalid_argument("need n_coeffs >= 1");
  if (T > kernel.horizon()) {
    throw std::invalid_argument("T exceeds the kernel horizon");
  }
  const auto gamma = kernel.stationary_gamma();
  if (!gamma) {
    throw std::invalid_argument("trigonometric frame needs a stationary kernel");
  }
  std::vector<std::string> notes;
  // Discrete convexity spot check; violations downgrade to notes.
  {
    const std::size_t n = 257;
    const double h = T / double(n - 1);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double second = (*gamma)(double(i - 1) * h) -
                            2.0 * (*gamma)(double(i) * h) +
                            (*gamma)(double(i + 1) * h);
      if (second < -1e-10 * ((*gamma)(0.0) + 1.0)) {
        notes.push_back("discrete convexity violated near tau = " +
                        format_double(double(i) * h));
        break;
      }
    }
  }
  return build_trig_frame(*gamma, kernel, T, n_coeffs, cfg, threads,
                          Provenance::ConvexStationaryTrigFrame, std::nullopt,
                          std::move(notes));
}

ExpansionFamily build_tensor_sheet(const std::vector<ExpansionFamily>& families,
                                   std::size_t max_terms) {
  if (families.size() < 2) {
    throw std::invalid_argument("tensor sheet needs >= 2 families");
  }
  if (max_terms < 1) throw std::invalid_argument("need max_terms >= 1");
  const std::size_t d = families.size();
  const double T = families.front().kernel().horizon();
  for (const auto& fam : families) {
    if (fam.size() == 0) throw std::invalid_argument("empty axis family");
    if (fam.kernel().dim() != 1) {
      throw std::invalid_argument("axis families must be 1-D");
    }
    if (fam.kernel().horizon() != T) {
      throw std::invalid_argument("axis horizons must agree");
    }
  }

  // Per axis, positions sorted by decreasing sup bound (ties: original order).
  std::vector<std::vector<std::size_t>> order(d);
  for (std::size_t i = 0; i < d; ++i) {
    order[i].resize(families[i].size());
    for (std::size_t j = 0; j < order[i].size(); ++j) order[i][j] = j;
    std::stable_sort(order[i].begin(), order[i].end(),
                     [&](std::size_t a, std::size_t b) {
                       return families[i].term(a).sup_bound() >
                              families[i].term(b).sup_bound();
                     });
  }

  struct Candidate {
    double product;
    std::vector<std::size_t> ranks;     // per-axis rank in sorted order
    std::vector<std::size_t> original;  // per-axis original index
  };
  const auto worse = [](const Candidate& a, const Candidate& b) {
    if (a.product != b.product) return a.product < b.product;
    return a.original > b.original;  // lexicographically smaller index first
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> heap(
      worse);
  std::set<std::vector<std::size_t>> seen;

  const auto make_candidate = [&](std::vector<std::size_t> ranks) {
    Candidate c;
    c.product = 1.0;
    c.original.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      c.original[i] = order[i][ranks[i]];
      c.product *= families[i].term(c.original[i]).sup_bound();
    }
    c.ranks = std::move(ranks);
    return c;
  };

  heap.push(make_candidate(std::vector<std::size_t>(d, 0)));
  seen.insert(std::vector<std::size_t>(d, 0));

  std::vector<AnalyticTerm> terms;
  std::vector<Kernel> axis_kernels;
  for (const auto& fam : families) axis_kernels.push_back(fam.kernel());

  while (!heap.empty() && terms.size() < max_terms) {
    const Candidate top = heap.top();
    heap.pop();
    std::vector<AnalyticTerm> factors;
    factors.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
      factors.push_back(families[i].term(top.original[i]));
    }
    terms.emplace_back(TensorProductTerm{std::move(factors)}, T);
    for (std::size_t i = 0; i < d; ++i) {
      if (top.ranks[i] + 1 >= families[i].size()) continue;
      auto next = top.ranks;
      ++next[i];
      if (seen.insert(next).second) heap.push(make_candidate(std::move(next)));
    }
  }

  // Rate parameters per the sheet corollary when every axis has gamma = 0.
  std::optional<RateParams> rate;
  {
    bool all = true;
    double theta = std::numeric_limits<double>::infinity();
    for (const auto& fam : families) {
      if (!fam.rate_params() || fam.rate_params()->log_exponent != 0.0) {
        all = false;
        break;
      }
      theta = std::min(theta, fam.rate_params()->theta);
    }
    if (all) {
      std::size_t m = 0;
      for (const auto& fam : families) {
        if (fam.rate_params()->theta == theta) ++m;
      }
      rate = RateParams{theta, theta * double(m - 1)};
    }
  }

  return {std::move(terms), Kernel(TensorKernelSpec{std::move(axis_kernels)}),
          Provenance::TensorSheet, rate};
}

Eigen::MatrixXd term_matrix(const ExpansionFamily& family,
                            std::span<const double> points,
                            std::size_t n_terms) {
  if (n_terms > family.size()) {
    throw std::invalid_argument("n_terms exceeds the family size");
  }
  Eigen::MatrixXd m(Eigen::Index(n_terms), Eigen::Index(points.size()));
  for (std::size_t j = 0; j < n_terms; ++j) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      m(Eigen::Index(j), Eigen::Index(i)) = family.term(j).evaluate(points[i]);
    }
  }
  return m;
}

}  // namespace gpseries
