#include "planefield/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "planefield/kernels.hpp"
#include "planefield/quad.hpp"

namespace planefield::specfun {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr long double kPiL = 3.141592653589793238462643383279502884L;

// sin(pi x) with exact argument reduction: x - remainder(x, 2) is an even
// integer, so the identity is exact and the reduced argument is in [-1, 1].
double sinpi(double x) { return std::sin(kPi * std::remainder(x, 2.0)); }
long double sinpil(long double x) { return std::sin(kPiL * std::remainder(x, 2.0L)); }

bool is_nonpositive_integer(double x) {
  return x <= 0.0 && x == std::floor(x);
}

// Lanczos g = 7, 9-term coefficient set (Godfrey).
constexpr double kLanczos[9] = {
    0.99999999999980993,   676.5203681218851,     -1259.1392167224028,
    771.32342877765313,    -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,  9.9843695780195716e-6, 1.5056327351493116e-7};

double log_gamma_lanczos(double x) {
  // valid for x >= 0.5
  double a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x - 1 + i);
  double t = x + 6.5;
  return 0.5 * std::log(2.0 * kPi) + (x - 0.5) * std::log(t) - t + std::log(a);
}

}  // namespace

void validate(const SeriesControl& ctrl) {
  if (!(ctrl.tol > 0)) throw std::invalid_argument("SeriesControl: tol must be > 0");
  if (ctrl.max_terms < 1) throw std::invalid_argument("SeriesControl: max_terms must be >= 1");
}

double log_gamma(double x) {
  if (!(x > 0)) throw std::invalid_argument("log_gamma: requires x > 0");
  if (x < 0.5) return log_gamma_lanczos(x + 1.0) - std::log(x);
  return log_gamma_lanczos(x);
}

SignedLogGamma signed_log_gamma(double x) {
  if (x > 0) return {log_gamma(x), 1, false};
  if (is_nonpositive_integer(x)) return {std::numeric_limits<double>::infinity(), 0, true};
  // reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
  double s = sinpi(x);
  return {std::log(kPi) - std::log(std::fabs(s)) - log_gamma(1.0 - x), s > 0 ? 1 : -1, false};
}

double gamma_recip(double x) {
  SignedLogGamma g = signed_log_gamma(x);
  if (g.pole) return 0.0;
  return g.sign * std::exp(-g.log);
}

namespace detail {

SignedLogGammaL signed_log_gamma_l(double x) {
  if (x > 0) return {std::lgamma(static_cast<long double>(x)), 1, false};
  if (is_nonpositive_integer(x)) return {std::numeric_limits<long double>::infinity(), 0, true};
  long double s = sinpil(x);
  long double lg = std::log(kPiL) - std::log(s < 0 ? -s : s) -
                   std::lgamma(1.0L - static_cast<long double>(x));
  return {lg, s > 0 ? 1 : -1, false};
}

}  // namespace detail

namespace detail {

double guarded_value(const char* op, const GuardedSum& acc, bool guard, double tol) {
  const double abs_est = static_cast<double>(acc.abs_total()) * 1e-17;
  if (guard && acc.cancellation() > kCancellationLimit && abs_est > tol)
    throw SeriesError(op,
                      "cancellation guard: estimated relative error " +
                          format_double(acc.cancellation()) +
                          " exceeds 1e-4; argument outside the supported domain");
  double v = static_cast<double>(acc.value());
  if (!std::isfinite(v)) throw SeriesError(op, "series overflow");
  return v;
}

}  // namespace detail

namespace {
using detail::StopRule;
using detail::guarded_value;
}  // namespace

double ml3(double alpha, double beta, double gamma, double x, const SeriesControl& ctrl) {
  if (!(alpha > 0)) throw std::invalid_argument("ml3: requires alpha > 0");
  validate(ctrl);

  // first k with all Gamma(alpha k + beta) arguments past the pole region
  int min_k = beta < 0 ? static_cast<int>(std::ceil(-beta / alpha)) + 1 : 0;

  detail::GuardedSum acc;
  StopRule stop{ctrl.tol};
  long double m = 1.0L;  // gamma^(k) x^k / k!
  const long double xl = x;
  for (int k = 0; k < ctrl.max_terms; ++k) {
    double arg = alpha * k + beta;
    long double term = 0.0L;
    if (!is_nonpositive_integer(arg)) {
      auto g = detail::signed_log_gamma_l(arg);
      term = m * g.sign * std::exp(-g.log);
    }
    acc.add(term);
    if (stop.update(term < 0 ? -term : term, k, min_k))
      return guarded_value("ml3", acc, ctrl.alternating_guard, ctrl.tol);
    m *= (gamma + k) * xl / (k + 1);
    if (std::abs(m) > 1e4000L) throw SeriesError("ml3", "term overflow");
  }
  throw SeriesError("ml3", "did not converge within max_terms");
}

double ml1(double alpha, double x, const SeriesControl& ctrl) {
  return ml3(alpha, 1.0, 1.0, x, ctrl);
}

double wright(const WrightSpec& spec, double x, const SeriesControl& ctrl) {
  validate(ctrl);
  for (const auto& [a, al] : spec.upper) {
    (void)a;
    if (al == 0.0) throw std::invalid_argument("wright: alpha_i must be nonzero");
  }
  for (const auto& [b, be] : spec.lower) {
    (void)b;
    if (be == 0.0) throw std::invalid_argument("wright: beta_j must be nonzero");
  }

  // Convergence domain (monitored empirically beyond this necessary check):
  // delta < -1 diverges for all x != 0; delta == -1 has a finite radius.
  double delta = 0.0;
  for (const auto& [a, al] : spec.upper) {
    (void)a;
    delta -= al;
  }
  for (const auto& [b, be] : spec.lower) {
    (void)b;
    delta += be;
  }
  if (x != 0.0) {
    if (delta < -1.0 - 1e-12)
      throw SeriesError("wright", "series diverges for all x != 0 (delta < -1)");
    if (std::fabs(delta + 1.0) <= 1e-12) {
      double log_radius = 0.0;
      for (const auto& [a, al] : spec.upper) {
        (void)a;
        log_radius -= al * std::log(std::fabs(al));
      }
      for (const auto& [b, be] : spec.lower) {
        (void)b;
        log_radius += be * std::log(std::fabs(be));
      }
      if (std::log(std::fabs(x)) >= log_radius + std::log(0.95))
        throw SeriesError("wright",
                          "argument at or beyond the convergence radius of a delta = -1 series");
    }
  }

  // stopping is deferred past the pole region of any denominator entry
  int min_k = 0;
  for (const auto& [b, be] : spec.lower)
    if (be > 0 && b <= 0) min_k = std::max(min_k, static_cast<int>(std::ceil(-b / be)) + 1);

  detail::GuardedSum acc;
  StopRule stop{ctrl.tol};
  const long double lx = x == 0.0 ? 0.0L : std::log(std::fabs(static_cast<long double>(x)));
  const int xsign = x < 0 ? -1 : 1;
  long double prev_mag = 0.0L;
  int growth = 0;
  for (int k = 0; k < ctrl.max_terms; ++k) {
    long double lt = -std::lgamma(static_cast<long double>(k) + 1.0L) + k * lx;
    int sign = (k % 2 == 1 && xsign < 0) ? -1 : 1;
    bool zero = (x == 0.0 && k > 0);
    for (const auto& [a, al] : spec.upper) {
      auto g = detail::signed_log_gamma_l(a + k * al);
      if (g.pole)
        throw SeriesError("wright", "Gamma pole in a numerator factor (term is infinite)");
      lt += g.log;
      sign *= g.sign;
    }
    for (const auto& [b, be] : spec.lower) {
      auto g = detail::signed_log_gamma_l(b + k * be);
      if (g.pole) {
        zero = true;
        break;
      }
      lt -= g.log;
      sign *= g.sign;
    }
    long double term = zero ? 0.0L : sign * std::exp(lt);
    acc.add(term);
    long double mag = term < 0 ? -term : term;
    if (stop.update(mag, k, min_k)) return guarded_value("wright", acc, ctrl.alternating_guard, ctrl.tol);
    growth = (mag > prev_mag && mag > 1.0L) ? growth + 1 : 0;
    prev_mag = mag;
    if (growth > 60)
      throw SeriesError("wright", "divergence detected (terms growing)");
  }
  throw SeriesError("wright", "did not converge within max_terms");
}

std::vector<double> frac_binom_coeffs(double alpha, int K) {
  if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("frac_binom_coeffs: alpha in (0,1]");
  if (K < 0) throw std::invalid_argument("frac_binom_coeffs: K >= 0");
  std::vector<double> c(K + 1);
  c[0] = 1.0;
  for (int k = 1; k <= K; ++k) c[k] = c[k - 1] * (k - 1 - alpha) / k;
  return c;
}

std::vector<double> caputo_l1(std::span<const double> f, double alpha, double dt) {
  if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("caputo_l1: alpha in (0,1]");
  if (!(dt > 0)) throw std::invalid_argument("caputo_l1: dt > 0");
  if (f.size() < 2) throw std::invalid_argument("caputo_l1: need at least 2 samples");
  const std::size_t n = f.size() - 1;  // derivative at nodes 1..n
  std::vector<double> out(n);

  if (alpha == 1.0) {
    for (std::size_t i = 1; i < n; ++i) out[i - 1] = (f[i + 1] - f[i - 1]) / (2 * dt);
    out[n - 1] = (f[n] - f[n - 1]) / dt;
    return out;
  }

  // weights b_j = (j+1)^{1-alpha} - j^{1-alpha}, reversed for contiguous dots
  std::vector<double> brev(n);
  for (std::size_t j = 0; j < n; ++j) {
    double bj = std::pow(j + 1.0, 1.0 - alpha) - std::pow(static_cast<double>(j), 1.0 - alpha);
    brev[n - 1 - j] = bj;
  }
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = f[k + 1] - f[k];

  const double c = std::pow(dt, -alpha) / std::exp(log_gamma(2.0 - alpha));
  for (std::size_t i = 1; i <= n; ++i)
    out[i - 1] = c * kernels::dot(d.data(), brev.data() + (n - i), i);
  return out;
}

ComparisonReport ml_laplace_selftest(double alpha, double beta, double gamma, double c, double z,
                                     const SeriesControl& ctrl, double threshold) {
  if (!(z > 0)) throw std::invalid_argument("ml_laplace_selftest: z > 0");
  // c z^-alpha < 1: keeps the right side finite and the integral convergent
  // (for c <= 0 the integral converges regardless of magnitude)
  if (!(c < std::pow(z, alpha)))
    throw std::invalid_argument("ml_laplace_selftest: requires c z^-alpha < 1");

  const double rhs =
      std::exp((alpha * gamma - beta) * std::log(z) - gamma * std::log(std::pow(z, alpha) - c));

  auto integrand = [&](double t) {
    if (t <= 0.0) return 0.0;
    return std::exp(-z * t + (beta - 1.0) * std::log(t)) *
           ml3(alpha, beta, gamma, c * std::pow(t, alpha), ctrl);
  };
  // effective decay rate of the integrand; the tail beyond exp(-30) is below
  // the comparison threshold
  const double z_eff = z - (c > 0 ? std::pow(c, 1.0 / alpha) : 0.0);
  const double T = 30.0 / z_eff;
  double lhs = 0.0;
  if (T > 1.0) {
    lhs = quad::integrate(integrand, 0.0, 1.0, 1e-11) + quad::integrate(integrand, 1.0, T, 1e-11);
  } else {
    lhs = quad::integrate(integrand, 0.0, T, 1e-11);
  }

  const double gap = std::fabs(lhs - rhs);
  return make_report("ml_laplace_gap", gap, threshold, 0,
                     {{"alpha", format_double(alpha)},
                      {"beta", format_double(beta)},
                      {"gamma", format_double(gamma)},
                      {"c", format_double(c)},
                      {"z", format_double(z)},
                      {"lhs_quadrature", format_double(lhs)},
                      {"rhs_closed_form", format_double(rhs)}});
}

}  // namespace planefield::specfun
