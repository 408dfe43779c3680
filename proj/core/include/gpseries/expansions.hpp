#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpseries/kernels.hpp"
#include "gpseries/specialfn.hpp"
#include "gpseries/terms.hpp"

namespace gpseries {

// Which printed expansion a family realizes.
enum class Provenance {
  BrownianKL,            // sqrt(2T)/(pi(j-1/2)) sin(pi(j-1/2)t/T)
  BrownianSplitFrame,    // 1/sqrt(2) split of the KL and 1-cos sequences
  BrownianPaleyWiener,   // ramp + sin/1-cos pairs at integer frequencies
  BrownianWavelet,       // primitive-of-wavelet terms
  FractionalBMDvZ,       // Bessel-zero frequencies, Dzhaparidze-van Zanten
  BridgeKL,              // sqrt(2T)/(pi j) sin(pi j t/T)
  OUConvolution,         // exp kernel convolved cosine basis
  OULamperti,            // time-warped Brownian KL terms
  FOUTrigFrame,          // sqrt(beta_j) cos/sin trigonometric frame
  ConvexStationaryTrigFrame,
  TensorSheet,
};

const char* provenance_tag(Provenance p);
Provenance provenance_from_tag(const std::string& tag);

// (theta, gamma) of the truncation-rate model n^{-(theta-1/2)} (log n)^{gamma+1/2}.
struct RateParams {
  double theta = 0.0;
  double log_exponent = 0.0;
};

// Ordered terms plus the kernel they expand. Construction enforces that every
// sup bound fits under sqrt(max_t C(t,t)) + 1e-9, the slack frame members are
// entitled to.
class ExpansionFamily {
 public:
  ExpansionFamily(std::vector<AnalyticTerm> terms, Kernel kernel,
                  Provenance provenance,
                  std::optional<RateParams> rate_params = std::nullopt,
                  std::vector<std::string> notes = {});

  std::size_t size() const { return terms_.size(); }
  const AnalyticTerm& term(std::size_t j) const { return terms_.at(j); }
  const std::vector<AnalyticTerm>& terms() const { return terms_; }
  const Kernel& kernel() const { return kernel_; }
  Provenance provenance() const { return provenance_; }
  const std::optional<RateParams>& rate_params() const { return rate_params_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::vector<AnalyticTerm> terms_;
  Kernel kernel_;
  Provenance provenance_;
  std::optional<RateParams> rate_params_;
  std::vector<std::string> notes_;
};

// Karhunen-Loeve family of Brownian motion; n terms.
ExpansionFamily build_bm_kl(double T, std::size_t n);

// Parseval frame interleaving 1/sqrt(2)-scaled sin and 1-cos sequences;
// second-kind first within each pair, 2*n_pairs terms.
ExpansionFamily build_bm_split_frame(double T, std::size_t n_pairs);

// Paley-Wiener family: ramp first, then (1-cos, sin) pairs; n terms total.
ExpansionFamily build_bm_paley_wiener(double T, std::size_t n);

// Primitive-of-wavelet family on levels [level_min, level_max], all shifts
// whose support meets [0,T] (optionally capped per level), ordered by level
// then shift.
ExpansionFamily build_bm_wavelet(double T, int level_min, int level_max,
                                 std::size_t max_shifts_per_level = 0,
                                 WaveletPrimitiveId primitive =
                                     WaveletPrimitiveId::Haar);

// Dzhaparidze-van Zanten family for fractional Brownian motion with index
// rho in (0,1); 2*n_pairs terms, second-kind first within each pair.
ExpansionFamily build_fbm_dvz(double rho, double T, std::size_t n_pairs);

// Karhunen-Loeve family of the Brownian bridge; n terms.
ExpansionFamily build_bridge_kl(double T, std::size_t n);

// Stationary Ornstein-Uhlenbeck via the convolution representation;
// n terms counting the leading exponential. sigma <= 0 selects sqrt(2 alpha).
ExpansionFamily build_ou_conv(double alpha, double sigma, double T,
                              std::size_t n);

// Stationary Ornstein-Uhlenbeck via the Lamperti time change; n terms.
ExpansionFamily build_ou_lamperti(double alpha, double sigma, double T,
                                  std::size_t n);

// Trigonometric frame for the fractional OU process, 2*n_coeffs + 1 terms.
// Coefficients beta_j come from quadrature; a beta_j below -cfg.abs_tol
// aborts loudly (NumericalError), one in [-cfg.abs_tol, 0) is clamped to zero
// with a provenance note. rho in (0,2) is accepted; positivity is only
// guaranteed for rho <= 1.
ExpansionFamily build_fou_trig(double rho, double alpha, double T,
                               std::size_t n_coeffs,
                               const QuadratureConfig& cfg = {},
                               unsigned threads = 1);

// Same construction driven by a user-supplied stationary kernel; discrete
// convexity is spot-checked and violations become provenance notes.
ExpansionFamily build_convex_stationary_trig(const Kernel& kernel, double T,
                                             std::size_t n_coeffs,
                                             const QuadratureConfig& cfg = {},
                                             unsigned threads = 1);

// Tensor products of 1-D families enumerated in decreasing order of the
// product of sup bounds (ties: lexicographic multi-index), truncated to
// max_terms.
ExpansionFamily build_tensor_sheet(const std::vector<ExpansionFamily>& families,
                                   std::size_t max_terms);

// Term values at the given 1-D points, one row per term.
Eigen::MatrixXd term_matrix(const ExpansionFamily& family,
                            std::span<const double> points,
                            std::size_t n_terms);

}  // namespace gpseries
