#include "gpseries/specialfn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "gpseries/errors.hpp"

namespace gpseries {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// Bessel J
// ---------------------------------------------------------------------------

bool is_half_integer(double nu, double target) {
  return nu == target;  // exact; these arise from rho = 1/2 short-circuits
}

double bessel_half_integer(double nu, double x) {
  const double f = std::sqrt(2.0 / (kPi * x));
  if (is_half_integer(nu, 0.5)) return f * std::sin(x);
  if (is_half_integer(nu, -0.5)) return f * std::cos(x);
  if (is_half_integer(nu, 1.5)) return f * (std::sin(x) / x - std::cos(x));
  // nu == -1.5
  return f * (-std::cos(x) / x - std::sin(x));
}

// Ascending series, adequate below the midrange crossover.
double bessel_series(double nu, double x) {
  const double q = 0.25 * x * x;
  double term = std::pow(0.5 * x, nu) / std::tgamma(nu + 1.0);
  double sum = term;
  double comp = 0.0;  // Kahan
  for (int m = 0; m < 300; ++m) {
    term *= -q / ((double(m) + 1.0) * (nu + double(m) + 1.0));
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-30) && m > 4) break;
  }
  return sum;
}

// Gauss-Legendre 20-point nodes/weights on [-1,1] (positive half; symmetric).
constexpr double kGL20X[10] = {
    0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
    0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
    0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
    0.9931285991850949};
constexpr double kGL20W[10] = {
    0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
    0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
    0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
    0.0176140071391521};

template <typename F>
double gl20(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double d = h * kGL20X[i];
    s += kGL20W[i] * (f(c - d) + f(c + d));
  }
  return s * h;
}

// Schlaefli representation (valid for real order, x > 0):
//   J_nu(x) = (1/pi) Int_0^pi cos(x sin th - nu th) dth
//           - (sin(nu pi)/pi) Int_0^inf exp(-x sinh t - nu t) dt
double bessel_integral_rep(double nu, double x) {
  const auto osc = [nu, x](double th) {
    return std::cos(x * std::sin(th) - nu * th);
  };
  const int panels = 8 + int(x / 2.0);
  double first = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = kPi * double(p) / double(panels);
    const double b = kPi * double(p + 1) / double(panels);
    first += gl20(osc, a, b);
  }
  first /= kPi;

  const double snp = std::sin(nu * kPi);
  if (snp == 0.0) return first;

  const auto damp = [nu, x](double t) {
    return std::exp(-x * std::sinh(t) - nu * t);
  };
  const double t_max = std::asinh(80.0 / x);
  double second = 0.0;
  double lo = 0.0;
  for (double hi : {4.0 / x, 16.0 / x, 64.0 / x, t_max}) {
    hi = std::min(hi, t_max);
    if (hi > lo) second += gl20(damp, lo, hi);
    lo = hi;
  }
  return first - snp / kPi * second;
}

// Hankel asymptotic expansion with five terms in each of P and Q.
double bessel_hankel(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  const double inv8x = 1.0 / (8.0 * x);
  double term = 1.0;
  double p = 1.0, q = 0.0;
  int sign_p = -1, sign_q = 1;
  for (int k = 1; k <= 9; ++k) {
    const double odd = double(2 * k - 1);
    term *= (mu - odd * odd) * inv8x / double(k);
    if (k % 2 == 1) {
      q += double(sign_q) * term;
      sign_q = -sign_q;
    } else {
      p += double(sign_p) * term;
      sign_p = -sign_p;
    }
  }
  const double chi = x - (0.5 * nu + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (std::cos(chi) * p - std::sin(chi) * q);
}

constexpr double kSeriesCrossover = 10.0;
constexpr double kAsymptoticCrossover = 30.0;

}  // namespace

BesselOrder::BesselOrder(double order) : nu(order) {
  if (!std::isfinite(order) || order <= -1.0 || order >= 1.0) {
    throw std::invalid_argument("Bessel order must lie in (-1, 1)");
  }
}

double bessel_j(double nu, double x) {
  if (!std::isfinite(nu) || std::abs(nu) >= 2.0) {
    throw std::invalid_argument("bessel_j supports orders in (-2, 2)");
  }
  if (!(x >= 0.0)) throw std::domain_error("bessel_j requires x >= 0");
  if (nu == 0.5 || nu == -0.5 || nu == 1.5 || nu == -1.5) {
    if (x == 0.0) return nu > 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return bessel_half_integer(nu, x);
  }
  if (nu == -1.0) {  // J_{-1} = -J_1; keeps the series recurrence pole-free
    return -bessel_j(1.0, x);
  }
  if (x < kSeriesCrossover) return bessel_series(nu, x);
  if (x < kAsymptoticCrossover) return bessel_integral_rep(nu, x);
  return bessel_hankel(nu, x);
}

double bessel_j(BesselOrder nu, double x) { return bessel_j(nu.nu, x); }

namespace {

double bessel_j_derivative(double nu, double x) {
  return 0.5 * (bessel_j(nu - 1.0, x) - bessel_j(nu + 1.0, x));
}

// McMahon expansion for the k-th positive zero.
double mcmahon_guess(double nu, std::size_t k) {
  const double mu = 4.0 * nu * nu;
  const double beta = (double(k) + 0.5 * nu - 0.25) * kPi;
  const double b8 = 8.0 * beta;
  const double c1 = (mu - 1.0) / b8;
  const double c2 = 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 * b8 * b8);
  const double c3 = 32.0 * (mu - 1.0) *
                    (83.0 * mu * mu - 982.0 * mu + 3779.0) /
                    (15.0 * std::pow(b8, 5));
  return beta - c1 - c2 - c3;
}

}  // namespace

std::vector<double> bessel_positive_zeros(BesselOrder order, std::size_t count) {
  if (count < 1) throw std::invalid_argument("zero count must be >= 1");
  const double nu = order.nu;
  std::vector<double> zeros;
  zeros.reserve(count);
  double prev = 0.0;
  for (std::size_t k = 1; k <= count; ++k) {
    // Bracket the k-th zero by walking forward from just above the previous.
    // Consecutive zeros are at least ~2.4 apart for these orders, so a start
    // capped at prev + 2.2 cannot step past the zero being sought.
    double lo, hi, step;
    if (k == 1) {
      lo = 1e-6;
      step = 0.05;
    } else {
      const double guess = mcmahon_guess(nu, k);
      lo = std::clamp(guess - 1.6, prev + 1e-3, prev + 2.2);
      step = 0.2;
    }
    double flo = bessel_j(nu, lo);
    bool bracketed = false;
    for (int i = 0; i < 400; ++i) {
      hi = lo + step;
      const double fhi = bessel_j(nu, hi);
      if ((flo > 0.0) != (fhi > 0.0)) {
        bracketed = true;
        break;
      }
      lo = hi;
      flo = fhi;
    }
    if (!bracketed) {
      throw NumericalError("bessel_positive_zeros: no bracket for zero " +
                           std::to_string(k));
    }

    // Safeguarded Newton inside [lo, hi].
    double x = std::clamp(mcmahon_guess(nu, k), lo, hi);
    double fx = bessel_j(nu, x);
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
      if (std::abs(fx) <= 1e-12) {
        converged = true;
        break;
      }
      if ((flo > 0.0) != (fx > 0.0)) {
        hi = x;
      } else {
        lo = x;
        flo = fx;
      }
      const double dfx = bessel_j_derivative(nu, x);
      double next = x - fx / dfx;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisect fallback
      if (std::abs(next - x) < 1e-15 * std::abs(x)) {
        x = next;
        fx = bessel_j(nu, x);
        converged = std::abs(fx) <= 1e-10;
        break;
      }
      x = next;
      fx = bessel_j(nu, x);
    }
    if (!converged && std::abs(fx) > 1e-10) {
      throw NumericalError("bessel_positive_zeros: Newton failed for zero " +
                           std::to_string(k));
    }
    if (x <= prev) {
      throw NumericalError("bessel_positive_zeros: zeros not increasing");
    }
    zeros.push_back(x);
    prev = x;
  }
  return zeros;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature
// ---------------------------------------------------------------------------

namespace {

constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224, 0.06309209262997855, 0.10479001032225018,
    0.14065325971552592,  0.1690047266392679,  0.19035057806478541,
    0.20443294007529889,  0.20948214108472783};
constexpr double kWg[4] = {0.12948496616886969, 0.27970539148927664,
                           0.38183005050511894, 0.4179591836734694};

struct PanelResult {
  double integral = 0.0;
  double error = 0.0;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double fv_lo[7], fv_hi[7];
  for (int i = 0; i < 7; ++i) {
    fv_lo[i] = f(c - h * kXgk[i]);
    fv_hi[i] = f(c + h * kXgk[i]);
  }
  double res_k = kWgk[7] * fc;
  double res_g = kWg[3] * fc;
  double res_abs = kWgk[7] * std::abs(fc);
  for (int i = 0; i < 7; ++i) {
    res_k += kWgk[i] * (fv_lo[i] + fv_hi[i]);
    res_abs += kWgk[i] * (std::abs(fv_lo[i]) + std::abs(fv_hi[i]));
    if (i % 2 == 1) {
      res_g += kWg[i / 2] * (fv_lo[i] + fv_hi[i]);
    }
  }
  const double mean = 0.5 * res_k;
  double res_asc = kWgk[7] * std::abs(fc - mean);
  for (int i = 0; i < 7; ++i) {
    res_asc += kWgk[i] * (std::abs(fv_lo[i] - mean) + std::abs(fv_hi[i] - mean));
  }
  const double habs = std::abs(h);
  const double integral = res_k * h;
  double err = std::abs((res_k - res_g) * h);
  res_asc *= habs;
  if (res_asc != 0.0 && err != 0.0) {
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  }
  if (!std::isfinite(integral)) {
    throw NumericalError("quadrature integrand evaluated to a non-finite value");
  }
  return {integral, err};
}

struct AdaptiveBudget {
  std::size_t used = 0;
  std::size_t max_panels = 0;
};

// Depth-first refinement of one panel to the requested absolute/relative goal.
PanelResult refine_panel(const std::function<double(double)>& f, double a,
                         double b, double abs_goal, double rel_goal,
                         AdaptiveBudget& budget, int depth) {
  if (++budget.used > budget.max_panels) {
    throw NumericalError("adaptive quadrature exceeded max_panels");
  }
  const PanelResult r = gk15(f, a, b);
  if (r.error <= std::max(abs_goal, rel_goal * std::abs(r.integral)) ||
      depth >= 60 || (b - a) < 1e-15 * (std::abs(a) + std::abs(b))) {
    return r;
  }
  const double mid = 0.5 * (a + b);
  const PanelResult left =
      refine_panel(f, a, mid, 0.5 * abs_goal, rel_goal, budget, depth + 1);
  const PanelResult right =
      refine_panel(f, mid, b, 0.5 * abs_goal, rel_goal, budget, depth + 1);
  return {left.integral + right.integral, left.error + right.error};
}

double integrate_with_breakpoints(const std::function<double(double)>& f,
                                  const std::vector<double>& breaks,
                                  const QuadratureConfig& cfg, double* err_out) {
  AdaptiveBudget budget{0, cfg.max_panels};
  const std::size_t n_panels = breaks.size() - 1;
  const double panel_goal = cfg.abs_tol / double(n_panels);
  double sum = 0.0, comp = 0.0, err = 0.0, total_abs = 0.0;
  for (std::size_t i = 0; i < n_panels; ++i) {
    const PanelResult r = refine_panel(f, breaks[i], breaks[i + 1], panel_goal,
                                       cfg.rel_tol, budget, 0);
    const double y = r.integral - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    err += r.error;
    total_abs += std::abs(r.integral);
  }
  // total_abs is the right scale for the relative part when panels cancel.
  if (err > cfg.abs_tol + cfg.rel_tol * std::max(std::abs(sum), total_abs)) {
    throw NumericalError("adaptive quadrature did not reach requested accuracy");
  }
  if (err_out) *err_out = err;
  return sum;
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw std::invalid_argument("quadrature tolerances must be positive");
  }
  if (max_panels < 1) throw std::invalid_argument("max_panels must be >= 1");
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, const QuadratureConfig& cfg, double* err_out) {
  cfg.validate();
  if (!(b >= a)) throw std::invalid_argument("integration bounds reversed");
  if (a == b) {
    if (err_out) *err_out = 0.0;
    return 0.0;
  }
  return integrate_with_breakpoints(f, {a, b}, cfg, err_out);
}

double fourier_cosine_coefficient(const std::function<double(double)>& gamma,
                                  double T, std::size_t j,
                                  const QuadratureConfig& cfg) {
  cfg.validate();
  if (!gamma) throw std::invalid_argument("gamma callable required");
  if (!(T > 0.0)) throw std::invalid_argument("horizon must be > 0");

  if (j == 0) {
    const auto f = [&gamma, T](double t) { return gamma(t) / T; };
    return integrate_with_breakpoints(f, {0.0, T}, cfg, nullptr);
  }

  const double w = kPi * double(j) / T;
  const auto f = [&gamma, T, w](double t) {
    return 2.0 / T * gamma(t) * std::cos(w * t);
  };
  // Boundaries at every zero of cos(w t): t = (k + 1/2) T / j.
  std::vector<double> breaks;
  breaks.reserve(j + 2);
  breaks.push_back(0.0);
  for (std::size_t k = 0; k < j; ++k) {
    breaks.push_back((double(k) + 0.5) * T / double(j));
  }
  breaks.push_back(T);
  return integrate_with_breakpoints(f, breaks, cfg, nullptr);
}

std::vector<double> fourier_cosine_coefficients(
    const std::function<double(double)>& gamma, double T, std::size_t count,
    const QuadratureConfig& cfg, unsigned threads) {
  if (count == 0) return {};
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, 64);
  std::vector<double> out(count);
  if (threads <= 1 || count < 4) {
    for (std::size_t j = 0; j < count; ++j) {
      out[j] = fourier_cosine_coefficient(gamma, T, j, cfg);
    }
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    try {
      for (;;) {
        const std::size_t j = next.fetch_add(1);
        if (j >= count) return;
        out[j] = fourier_cosine_coefficient(gamma, T, j, cfg);
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
  return out;
}

}  // namespace gpseries
