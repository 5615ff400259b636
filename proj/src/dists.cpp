#include "planefield/dists.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <cmath>

#include "planefield/kernels.hpp"
#include "planefield/quad.hpp"

namespace planefield::dists {

namespace {

using specfun::detail::GuardedSum;
using specfun::detail::signed_log_gamma_l;
using specfun::detail::StopRule;
using specfun::detail::guarded_value;
using SLGL = specfun::detail::SignedLogGammaL;

long double lgl(double x) { return std::lgamma(static_cast<long double>(x)); }

// Supported domain of the alternating pmf series (Eqs. with the
// k!/(Gamma(k a1+1) Gamma(k a2+1)) backbone). x is the series argument
// lambda t1^a1 t2^a2 (or its lambda^beta analogue).
void check_alternating_domain(const char* op, double a1, double a2, double x) {
  if (x > 2.0 * (1 + 1e-9))
    throw SeriesError(op, "series argument " + format_double(x) +
                              " exceeds the supported domain (lambda t1^a1 t2^a2 <= 2); "
                              "reduce lambda or the window");
  const double s = a1 + a2;
  if (x > 0.0) {
    if (s < 1.0 - 1e-12)
      throw SeriesError(op, "series diverges for alpha1 + alpha2 < 1 (argument > 0)");
    if (std::fabs(s - 1.0) <= 1e-12) {
      const double radius = std::pow(a1, a1) * std::pow(a2, a2);
      if (x >= 0.95 * radius)
        throw SeriesError(op, "argument " + format_double(x) +
                                  " at or beyond the convergence radius " +
                                  format_double(radius) + " (alpha1 + alpha2 = 1)");
    }
  }
}

// Falling factorial (a)_n = Gamma(a+1) / Gamma(a+1-n) as a signed log term.
struct LnVal {
  long double log = 0;
  int sign = 1;
  bool zero = false;
};

LnVal falling_factorial_ln(double a, long long n) {
  if (n == 0) return {0.0L, 1, false};
  SLGL num = signed_log_gamma_l(a + 1.0);
  SLGL den = signed_log_gamma_l(a + 1.0 - static_cast<double>(n));
  if (num.pole) {
    // a is a negative integer; fall back to the direct product (finite n)
    long double prod = 1.0L;
    for (long long i = 0; i < n; ++i) prod *= (a - i);
    if (prod == 0.0L) return {0.0L, 1, true};
    return {std::log(prod < 0 ? -prod : prod), prod < 0 ? -1 : 1, false};
  }
  if (den.pole) return {0.0L, 1, true};
  return {num.log - den.log, num.sign * den.sign, false};
}

// (-1)^N C(a-1, N) = Gamma(N-a+1) / (Gamma(1-a) Gamma(N+1)); the closed form
// of the partial alternating binomial sum sum_{n=0}^{N} (-1)^n C(a, n).
LnVal alt_binom_partial_ln(double a, long long N) {
  SLGL num = signed_log_gamma_l(static_cast<double>(N) - a + 1.0);
  SLGL den = signed_log_gamma_l(1.0 - a);
  if (den.pole) {
    if (num.pole)
      throw SeriesError("partial_sum", "partial-sum identity degenerate (N below series index)");
    return {0.0L, 1, true};
  }
  if (num.pole)
    throw SeriesError("partial_sum", "partial-sum identity degenerate (N below series index)");
  return {num.log - den.log - lgl(static_cast<double>(N) + 1.0), num.sign * den.sign, false};
}

double clamp_pmf(double v) {
  // roundoff can leave a morally-zero pmf slightly negative
  if (v < 0 && v > -1e-9) return 0.0;
  return v;
}

}  // namespace

void FieldParams::validate() const {
  if (!(lambda > 0)) throw std::invalid_argument("FieldParams: lambda > 0");
  auto in01 = [](double a) { return a > 0 && a <= 1; };
  if (!in01(alpha1) || !in01(alpha2) || !in01(beta))
    throw std::invalid_argument("FieldParams: orders must lie in (0, 1]");
}

void CompoundParams::validate() const {
  if (!(sigma > 0)) throw std::invalid_argument("CompoundParams: sigma > 0");
  if (!(beta_c > 0 && beta_c <= 1)) throw std::invalid_argument("CompoundParams: beta_c in (0,1]");
}

double prf_pmf(long long n, double t1, double t2, double lambda) {
  if (n < 0) throw std::invalid_argument("prf_pmf: n >= 0");
  if (!(lambda > 0)) throw std::invalid_argument("prf_pmf: lambda > 0");
  if (!(t1 >= 0 && t2 >= 0)) throw std::invalid_argument("prf_pmf: t1, t2 >= 0");
  const double m = lambda * t1 * t2;
  if (m == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-m + n * std::log(m) - specfun::log_gamma(n + 1.0));
}

double fprf_pmf(long long n, double t1, double t2, const FieldParams& p, const SeriesControl& c) {
  p.validate();
  specfun::validate(c);
  if (n < 0) throw std::invalid_argument("fprf_pmf: n >= 0");
  if (!(t1 >= 0 && t2 >= 0)) throw std::invalid_argument("fprf_pmf: t1, t2 >= 0");
  if (t1 == 0.0 || t2 == 0.0) return n == 0 ? 1.0 : 0.0;

  const double x = p.lambda * std::pow(t1, p.alpha1) * std::pow(t2, p.alpha2);
  check_alternating_domain("fprf_pmf", p.alpha1, p.alpha2, x);

  const long double lx = std::log(static_cast<long double>(x));
  const long double lgn = lgl(n + 1.0);
  const int kmax = std::max<int>(c.max_terms, std::max(50, 10 * static_cast<int>(std::ceil(x))));

  GuardedSum acc;
  StopRule stop{c.tol};
  for (int j = 0; j < kmax; ++j) {
    const double m = static_cast<double>(n) + j;
    long double lt = 2.0L * lgl(m + 1.0) - lgl(j + 1.0) - lgn + (n + j) * lx -
                     lgl(m * p.alpha1 + 1.0) - lgl(m * p.alpha2 + 1.0);
    long double term = std::exp(lt);
    if (j % 2 == 1) term = -term;
    acc.add(term);
    if (stop.update(term < 0 ? -term : term, j, 0))
      return clamp_pmf(guarded_value("fprf_pmf", acc, c.alternating_guard, c.tol));
  }
  throw SeriesError("fprf_pmf", "did not converge within max_terms");
}

std::vector<double> fprf_pmf_range(long long n_max, double t1, double t2, const FieldParams& p,
                                   const SeriesControl& c) {
  std::vector<double> out(n_max + 1);
  for (long long n = 0; n <= n_max; ++n) out[n] = fprf_pmf(n, t1, t2, p, c);
  return out;
}

double fprf_laplace(double u, double t1, double t2, const FieldParams& p,
                    const SeriesControl& c) {
  p.validate();
  specfun::validate(c);
  if (!(u >= 0)) throw std::invalid_argument("fprf_laplace: u >= 0");
  if (!(t1 >= 0 && t2 >= 0)) throw std::invalid_argument("fprf_laplace: t1, t2 >= 0");
  const double w = std::pow(t1, p.alpha1) * std::pow(t2, p.alpha2);
  const double y = p.lambda * w * (std::exp(-u) - 1.0);  // in (-lambda w, 0]
  if (y == 0.0) return 1.0;
  check_alternating_domain("fprf_laplace", p.alpha1, p.alpha2, std::fabs(y));

  // deliberately a separate, double-precision route from tfprf_laplace (which
  // goes through specfun::wright); agreement of the two is a library test
  const double ly = std::log(std::fabs(y));
  double sum = 0.0, comp = 0.0;
  int streak = 0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < c.max_terms; ++k) {
    double lt = specfun::log_gamma(k + 1.0) + k * ly - specfun::log_gamma(k * p.alpha1 + 1.0) -
                specfun::log_gamma(k * p.alpha2 + 1.0);
    double term = std::exp(lt);
    if (k % 2 == 1) term = -term;
    double yk = term - comp;
    double t = sum + yk;
    comp = (t - sum) - yk;
    sum = t;
    const double mag = std::fabs(term);
    streak = (mag <= prev) ? streak + 1 : 0;
    prev = mag;
    if (mag < c.tol && streak >= 3) return sum;
  }
  throw SeriesError("fprf_laplace", "did not converge within max_terms");
}

double sfprf_pmf(long long n, double t1, double t2, double alpha, double lambda,
                 const SeriesControl& c) {
  if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("sfprf_pmf: alpha in (0,1]");
  if (!(lambda > 0)) throw std::invalid_argument("sfprf_pmf: lambda > 0");
  if (n < 0) throw std::invalid_argument("sfprf_pmf: n >= 0");
  if (!(t1 >= 0 && t2 >= 0)) throw std::invalid_argument("sfprf_pmf: t1, t2 >= 0");
  specfun::validate(c);
  if (t1 == 0.0 || t2 == 0.0) return n == 0 ? 1.0 : 0.0;

  const double x = t1 * t2 * std::pow(lambda, alpha);
  if (x > 2.0 * (1 + 1e-9))
    throw SeriesError("sfprf_pmf", "series argument t1 t2 lambda^alpha = " + format_double(x) +
                                       " exceeds the supported domain (<= 2)");

  const long double lx = std::log(static_cast<long double>(x));
  const long double lgn = lgl(n + 1.0);
  const int min_k = n > 0 ? static_cast<int>(std::ceil((n - 1) / alpha)) + 1 : 0;
  const int kmax =
      std::max({c.max_terms, min_k + 50, std::max(50, 10 * static_cast<int>(std::ceil(x)))});

  GuardedSum acc;
  StopRule stop{c.tol};
  for (int k = 0; k < kmax; ++k) {
    LnVal ff = falling_factorial_ln(alpha * k, n);
    long double term = 0.0L;
    if (!ff.zero) {
      long double lt = ff.log + k * lx - lgn - lgl(k + 1.0);
      term = ff.sign * std::exp(lt);
      if ((n + k) % 2 == 1) term = -term;
    }
    acc.add(term);
    if (stop.update(term < 0 ? -term : term, k, min_k))
      return clamp_pmf(guarded_value("sfprf_pmf", acc, c.alternating_guard, c.tol));
  }
  throw SeriesError("sfprf_pmf", "did not converge within max_terms");
}

std::vector<double> sfprf_pmf_range(long long n_max, double t1, double t2, double alpha,
                                    double lambda, const SeriesControl& c) {
  std::vector<double> out(n_max + 1);
  for (long long n = 0; n <= n_max; ++n) out[n] = sfprf_pmf(n, t1, t2, alpha, lambda, c);
  return out;
}

double sfprf_partial_sum(long long N, double t1, double t2, double alpha, double lambda,
                         const SeriesControl& c) {
  if (N < 0) throw std::invalid_argument("sfprf_partial_sum: N >= 0");
  if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("sfprf_partial_sum: alpha in (0,1]");
  specfun::validate(c);
  if (t1 == 0.0 || t2 == 0.0) return 1.0;
  const double x = t1 * t2 * std::pow(lambda, alpha);

  // sum_{n<=N} p(n) = sum_k ((-x)^k / k!) (-1)^N C(alpha k - 1, N)
  GuardedSum acc;
  StopRule stop{c.tol};
  const long double lx = std::log(static_cast<long double>(x));
  for (int k = 0; k < c.max_terms; ++k) {
    LnVal t = alt_binom_partial_ln(alpha * k, N);
    long double term = 0.0L;
    if (!t.zero) {
      term = t.sign * std::exp(t.log + k * lx - lgl(k + 1.0));
      if (k % 2 == 1) term = -term;
    }
    acc.add(term);
    if (stop.update(term < 0 ? -term : term, k, 0))
      return guarded_value("sfprf_partial_sum", acc, c.alternating_guard, c.tol);
  }
  throw SeriesError("sfprf_partial_sum", "did not converge within max_terms");
}

double sfprf_pgf(double u, double t1, double t2, double alpha, double lambda) {
  if (!(u >= 0 && u <= 1)) throw std::invalid_argument("sfprf_pgf: u in [0,1]");
  if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("sfprf_pgf: alpha in (0,1]");
  if (!(lambda > 0)) throw std::invalid_argument("sfprf_pgf: lambda > 0");
  return std::exp(-t1 * t2 * std::pow(lambda, alpha) * std::pow(1.0 - u, alpha));
}

namespace {

// Scaled direct evaluation of the STFPRF pmf; same series as the 3Psi3 route
// but with the 1/n! prefactor folded into every term so no intermediate
// overflows for large n.
double stfprf_pmf_direct(long long n, double x, const FieldParams& p, const SeriesControl& c) {
  const long double lx = std::log(static_cast<long double>(x));
  const long double lgn = lgl(n + 1.0);
  const int min_k =
      n > 0 ? static_cast<int>(std::ceil((n - 1) / p.beta)) + 1 : 0;
  const int kmax =
      std::max({c.max_terms, min_k + 50, std::max(50, 10 * static_cast<int>(std::ceil(x)))});

  GuardedSum acc;
  StopRule stop{c.tol};
  for (int k = 0; k < kmax; ++k) {
    // term: (-1)^{n+k} C(beta k, n) k! x^k / (Gamma(a1 k+1) Gamma(a2 k+1) k!)
    SLGL den = signed_log_gamma_l(p.beta * k + 1.0 - static_cast<double>(n));
    long double term = 0.0L;
    if (!den.pole) {
      long double lt = lgl(p.beta * k + 1.0) - den.log - lgn + k * lx -
                       lgl(p.alpha1 * k + 1.0) - lgl(p.alpha2 * k + 1.0);
      term = den.sign * std::exp(lt);
      if ((n + k) % 2 == 1) term = -term;
    }
    acc.add(term);
    if (stop.update(term < 0 ? -term : term, k, min_k))
      return clamp_pmf(guarded_value("stfprf_pmf", acc, c.alternating_guard, c.tol));
  }
  throw SeriesError("stfprf_pmf", "did not converge within max_terms");
}

}  // namespace

double stfprf_pmf(long long n, double t1, double t2, const FieldParams& p,
                  const SeriesControl& c) {
  p.validate();
  specfun::validate(c);
  if (n < 0) throw std::invalid_argument("stfprf_pmf: n >= 0");
  if (!(t1 >= 0 && t2 >= 0)) throw std::invalid_argument("stfprf_pmf: t1, t2 >= 0");
  if (t1 == 0.0 || t2 == 0.0) return n == 0 ? 1.0 : 0.0;

  const double x = std::pow(p.lambda, p.beta) * std::pow(t1, p.alpha1) * std::pow(t2, p.alpha2);
  check_alternating_domain("stfprf_pmf", p.alpha1, p.alpha2, x);

  if (n > 150) return stfprf_pmf_direct(n, x, p, c);  // n! overflows the Wright value

  specfun::WrightSpec spec;
  spec.upper = {{1.0, p.beta}, {1.0, 1.0}, {1.0, 1.0}};
  spec.lower = {{1.0 - static_cast<double>(n), p.beta}, {1.0, p.alpha1}, {1.0, p.alpha2}};
  SeriesControl cw = c;
  cw.max_terms = std::max<int>(c.max_terms, static_cast<int>(std::ceil(n / p.beta)) + 100);
  const double w = specfun::wright(spec, -x, cw);
  double v = w * std::exp(-specfun::log_gamma(n + 1.0));
  if (n % 2 == 1) v = -v;
  return clamp_pmf(v);
}

std::vector<double> stfprf_pmf_range(long long n_max, double t1, double t2, const FieldParams& p,
                                     const SeriesControl& c) {
  p.validate();
  specfun::validate(c);
  std::vector<double> out(n_max + 1);
  if (t1 == 0.0 || t2 == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const double x = std::pow(p.lambda, p.beta) * std::pow(t1, p.alpha1) * std::pow(t2, p.alpha2);
  check_alternating_domain("stfprf_pmf", p.alpha1, p.alpha2, x);
  for (long long n = 0; n <= n_max; ++n) out[n] = stfprf_pmf_direct(n, x, p, c);
  return out;
}

double stfprf_partial_sum(long long N, double t1, double t2, const FieldParams& p,
                          const SeriesControl& c) {
  p.validate();
  specfun::validate(c);
  if (N < 0) throw std::invalid_argument("stfprf_partial_sum: N >= 0");
  if (t1 == 0.0 || t2 == 0.0) return 1.0;
  const double x = std::pow(p.lambda, p.beta) * std::pow(t1, p.alpha1) * std::pow(t2, p.alpha2);

  // sum_{n<=N} p(n) = sum_k A_k (-1)^N C(beta k - 1, N),
  // A_k = Gamma(k+1) (-x)^k / (Gamma(a1 k+1) Gamma(a2 k+1))
  GuardedSum acc;
  StopRule stop{c.tol};
  const long double lx = std::log(static_cast<long double>(x));
  for (int k = 0; k < c.max_terms; ++k) {
    LnVal t = alt_binom_partial_ln(p.beta * k, N);
    long double term = 0.0L;
    if (!t.zero) {
      term = t.sign * std::exp(t.log + lgl(k + 1.0) + k * lx - lgl(p.alpha1 * k + 1.0) -
                               lgl(p.alpha2 * k + 1.0));
      if (k % 2 == 1) term = -term;
    }
    acc.add(term);
    if (stop.update(term < 0 ? -term : term, k, 0))
      return guarded_value("stfprf_partial_sum", acc, c.alternating_guard, c.tol);
  }
  throw SeriesError("stfprf_partial_sum", "did not converge within max_terms");
}

double tfprf_laplace(double u, double t1, double t2, const FieldParams& p,
                     const SeriesControl& c) {
  p.validate();
  specfun::validate(c);
  if (!(u >= 0)) throw std::invalid_argument("tfprf_laplace: u >= 0");
  const double w = std::pow(t1, p.alpha1) * std::pow(t2, p.alpha2);
  const double y = p.lambda * w * (1.0 - std::exp(-u));
  if (y == 0.0) return 1.0;
  check_alternating_domain("tfprf_laplace", p.alpha1, p.alpha2, y);
  specfun::WrightSpec spec;
  spec.upper = {{1.0, 1.0}, {1.0, 1.0}};
  spec.lower = {{1.0, p.alpha1}, {1.0, p.alpha2}};
  return specfun::wright(spec, -y, c);
}

// --- exponential compounding -------------------------------------------------

double cprf_exp_atom(double t1, double t2, const FieldParams& p, const SeriesControl& c) {
  return fprf_pmf(0, t1, t2, p, c);
}

double cprf_exp_density(double y, double t1, double t2, const FieldParams& p, double sigma,
                        const SeriesControl& c) {
  p.validate();
  specfun::validate(c);
  if (!(sigma > 0)) throw std::invalid_argument("cprf_exp_density: sigma > 0");
  if (y < 0) return 0.0;
  if (t1 == 0.0 || t2 == 0.0) return 0.0;  // field is the zero atom

  const double w = std::pow(t1, p.alpha1) * std::pow(t2, p.alpha2);
  const double x = p.lambda * w;
  check_alternating_domain("cprf_exp_density", p.alpha1, p.alpha2, x);
  const double cy = p.lambda * sigma * w;  // series variable multiplies y

  // Three equivalent forms (the general one with the 1/n! normalization that
  // makes sum_n = sum_n pmf(n) Erlang(n, sigma)):
  //   a1 = a2 = 1:  (e^{-s y - x}/y) sum (x s y)^n / ((n-1)! n!)
  //   a1 = 1:       (e^{-s y}/y) sum (x s y)^n/(n-1)!  E^{n+1}_{a2, n a2 + 1}(-x)
  //   general:      (e^{-s y}/y) sum (x s y)^n/((n-1)! n!)  2Psi2_n(-x)
  const bool poisson = p.alpha1 == 1.0 && p.alpha2 == 1.0;
  const bool one_axis1 = p.alpha1 == 1.0 && !poisson;
  const bool one_axis2 = p.alpha2 == 1.0 && !poisson;

  double sum = 0.0, comp = 0.0;
  int streak = 0;
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 1; n < c.max_terms; ++n) {
    double factor;  // the n-th ML / Wright factor
    if (poisson) {
      factor = std::exp(-x - specfun::log_gamma(n + 1.0));
    } else if (one_axis1) {
      factor = specfun::ml3(p.alpha2, n * p.alpha2 + 1.0, n + 1.0, -x, c);
    } else if (one_axis2) {
      factor = specfun::ml3(p.alpha1, n * p.alpha1 + 1.0, n + 1.0, -x, c);
    } else {
      specfun::WrightSpec spec;
      const double nn = n;
      spec.upper = {{nn + 1.0, 1.0}, {nn + 1.0, 1.0}};
      spec.lower = {{nn * p.alpha1 + 1.0, p.alpha1}, {nn * p.alpha2 + 1.0, p.alpha2}};
      factor = specfun::wright(spec, -x, c) * std::exp(-specfun::log_gamma(n + 1.0));
    }
    // (c y)^n / (n-1)! * y^{-1}; written in logs to dodge 0^0 at y = 0
    double lt = n * std::log(cy) + (n - 1) * (y > 0 ? std::log(y) : 0.0) -
                specfun::log_gamma(static_cast<double>(n));
    double term = (y > 0 || n == 1) ? std::exp(lt) * factor : 0.0;
    double yk = term - comp;
    double t = sum + yk;
    comp = (t - sum) - yk;
    sum = t;
    const double mag = std::fabs(term);
    streak = (mag <= prev) ? streak + 1 : 0;
    prev = mag;
    if (mag < c.tol && streak >= 3 && n >= 2) return std::exp(-sigma * y) * sum;
  }
  throw SeriesError("cprf_exp_density", "did not converge within max_terms");
}

double cprf_exp_cdf(double y, double t1, double t2, const FieldParams& p, double sigma,
                    const SeriesControl& c) {
  if (y < 0) return 0.0;
  const double atom = cprf_exp_atom(t1, t2, p, c);
  if (y == 0.0) return atom;
  double integral =
      quad::integrate([&](double s) { return cprf_exp_density(s, t1, t2, p, sigma, c); }, 0.0, y,
                      1e-10);
  return std::min(atom + integral, 1.0);
}

double ml_nfold_density(double y, int n, double sigma, double beta_c, const SeriesControl& c) {
  if (n < 1) throw std::invalid_argument("ml_nfold_density: n >= 1");
  if (!(sigma > 0)) throw std::invalid_argument("ml_nfold_density: sigma > 0");
  if (!(beta_c > 0 && beta_c <= 1)) throw std::invalid_argument("ml_nfold_density: beta_c in (0,1]");
  if (y <= 0) return 0.0;
  const double ml = specfun::ml3(beta_c, beta_c * n, static_cast<double>(n), -sigma * std::pow(y, beta_c), c);
  return std::exp(n * std::log(sigma) + (beta_c * n - 1.0) * std::log(y)) * ml;
}

double cprf_ml_density(double y, double t1, double t2, double lambda, double sigma, double beta_c,
                       const SeriesControl& c) {
  specfun::validate(c);
  if (y <= 0) return 0.0;
  double sum = 0.0;
  int streak = 0;
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 1; n < c.max_terms; ++n) {
    const double term = prf_pmf(n, t1, t2, lambda) * ml_nfold_density(y, n, sigma, beta_c, c);
    sum += term;
    const double mag = std::fabs(term);
    streak = (mag <= prev) ? streak + 1 : 0;
    prev = mag;
    if (mag < c.tol && streak >= 3 && n >= 2) return sum;
  }
  throw SeriesError("cprf_ml_density", "did not converge within max_terms");
}

// --- characteristic functions ------------------------------------------------

std::complex<double> normal_cprf_cf(double u, const Rect& rect) {
  rect.validate();
  return {std::exp(rect.area() * (std::exp(-u * u / 2.0) - 1.0)), 0.0};
}

std::complex<double> normal_cprf_joint_cf(double u, double v, Point p1, Point p2) {
  if (!(p1.s >= 0 && p1.t >= 0 && p2.s >= 0 && p2.t >= 0))
    throw std::invalid_argument("normal_cprf_joint_cf: points in the quarter plane");
  // orderings 3 and 4 reduce to 1 and 2 by swapping the points (and u, v)
  if (p1.s > p2.s) {
    std::swap(p1, p2);
    std::swap(u, v);
  }
  auto e = [](double w) { return std::exp(-w * w / 2.0) - 1.0; };
  double expo;
  if (p1.t <= p2.t) {
    // Case I
    expo = p1.s * p1.t * e(u + v) + (p2.s * p2.t - p1.s * p1.t) * e(v);
  } else {
    // Case II
    expo = p1.s * (p1.t - p2.t) * e(u) + p1.s * p2.t * e(u + v) + (p2.s - p1.s) * p2.t * e(v);
  }
  return {std::exp(expo), 0.0};
}

// --- grid tables --------------------------------------------------------------

namespace {

// Evaluates rows of coefficient/power dot products with a per-node
// cancellation estimate (second dot against |coefficients|).
struct CoeffTable {
  int n_states = 0;
  int width = 0;            // coefficients per state
  std::vector<double> coef;  // [n][k]
  std::vector<double> abscoef;

  double eval(int n, const double* powers, const char* op) const {
    const double* row = coef.data() + static_cast<std::size_t>(n) * width;
    const double* arow = abscoef.data() + static_cast<std::size_t>(n) * width;
    double v = kernels::dot(row, powers, width);
    double a = kernels::dot(arow, powers, width);
    if (a * 1e-16 > specfun::detail::kCancellationLimit * std::max(std::fabs(v), 1e-300))
      throw SeriesError(op, "cancellation guard tripped in grid evaluation");
    return v;
  }
};

}  // namespace

std::vector<double> fprf_pmf_table(int n_max, std::span<const double> t1s,
                                   std::span<const double> t2s, const FieldParams& p,
                                   const SeriesControl& c) {
  p.validate();
  specfun::validate(c);
  double w_max = 0;
  for (double a : t1s)
    for (double b : t2s)
      w_max = std::max(w_max, std::pow(a, p.alpha1) * std::pow(b, p.alpha2));
  const double x_max = p.lambda * w_max;
  check_alternating_domain("fprf_pmf_table", p.alpha1, p.alpha2, x_max);

  const int K = std::max({c.max_terms, 10 * static_cast<int>(std::ceil(x_max)) + 50});
  const int M = n_max + K;  // power basis w^0..w^M, coefficient of w^{n+j}
  CoeffTable tab;
  tab.n_states = n_max + 1;
  tab.width = M + 1;
  tab.coef.assign(static_cast<std::size_t>(tab.n_states) * tab.width, 0.0);
  tab.abscoef = tab.coef;
  const double llam = std::log(p.lambda);
  for (int n = 0; n <= n_max; ++n) {
    const long double lgn = lgl(n + 1.0);
    for (int j = 0; j + n <= M; ++j) {
      const double m = static_cast<double>(n) + j;
      long double lt = 2.0L * lgl(m + 1.0) - lgl(j + 1.0) - lgn + m * llam -
                       lgl(m * p.alpha1 + 1.0) - lgl(m * p.alpha2 + 1.0);
      double cv = static_cast<double>(std::exp(lt));
      if (!std::isfinite(cv)) throw SeriesError("fprf_pmf_table", "coefficient overflow");
      std::size_t idx = static_cast<std::size_t>(n) * tab.width + (n + j);
      tab.coef[idx] = (j % 2 == 1) ? -cv : cv;
      tab.abscoef[idx] = cv;
    }
    // truncation check at the largest argument
    if (w_max > 0) {
      double tail = tab.abscoef[static_cast<std::size_t>(n) * tab.width + M] * std::pow(w_max, M);
      if (tail > c.tol)
        throw SeriesError("fprf_pmf_table", "series not resolved within max_terms");
    }
  }

  std::vector<double> out(static_cast<std::size_t>(n_max + 1) * t1s.size() * t2s.size());
  std::vector<double> powers(M + 1);
  for (std::size_t i = 0; i < t1s.size(); ++i) {
    for (std::size_t j = 0; j < t2s.size(); ++j) {
      const double w = std::pow(t1s[i], p.alpha1) * std::pow(t2s[j], p.alpha2);
      powers[0] = 1.0;
      for (int m = 1; m <= M; ++m) powers[m] = powers[m - 1] * w;
      for (int n = 0; n <= n_max; ++n) {
        double v = tab.eval(n, powers.data(), "fprf_pmf_table");
        out[(static_cast<std::size_t>(n) * t1s.size() + i) * t2s.size() + j] = clamp_pmf(v);
      }
    }
  }
  return out;
}

namespace {

std::vector<double> pmf_table_power_series(int n_max, std::span<const double> t1s,
                                           std::span<const double> t2s, const char* op,
                                           double base_max, int K,
                                           const std::function<LnVal(int, int)>& coef_ln,
                                           const std::function<double(std::size_t, std::size_t)>& base,
                                           const SeriesControl& c, bool clamp) {
  CoeffTable tab;
  tab.n_states = n_max + 1;
  tab.width = K + 1;
  tab.coef.assign(static_cast<std::size_t>(tab.n_states) * tab.width, 0.0);
  tab.abscoef = tab.coef;
  for (int n = 0; n <= n_max; ++n) {
    for (int k = 0; k <= K; ++k) {
      LnVal lv = coef_ln(n, k);
      if (lv.zero) continue;
      double cv = lv.sign * static_cast<double>(std::exp(lv.log));
      if (!std::isfinite(cv)) throw SeriesError(op, "coefficient overflow");
      std::size_t idx = static_cast<std::size_t>(n) * tab.width + k;
      tab.coef[idx] = cv;
      tab.abscoef[idx] = std::fabs(cv);
    }
    double tail = tab.abscoef[static_cast<std::size_t>(n) * tab.width + K];
    if (base_max > 0 && tail * std::pow(base_max, K) > c.tol)
      throw SeriesError(op, "series not resolved within max_terms");
  }

  std::vector<double> out(static_cast<std::size_t>(n_max + 1) * t1s.size() * t2s.size());
  std::vector<double> powers(K + 1);
  for (std::size_t i = 0; i < t1s.size(); ++i) {
    for (std::size_t j = 0; j < t2s.size(); ++j) {
      const double w = base(i, j);
      powers[0] = 1.0;
      for (int m = 1; m <= K; ++m) powers[m] = powers[m - 1] * w;
      for (int n = 0; n <= n_max; ++n) {
        double v = tab.eval(n, powers.data(), op);
        out[(static_cast<std::size_t>(n) * t1s.size() + i) * t2s.size() + j] =
            clamp ? clamp_pmf(v) : v;
      }
    }
  }
  return out;
}

}  // namespace

std::vector<double> sfprf_pmf_table(int n_max, std::span<const double> t1s,
                                    std::span<const double> t2s, double alpha, double lambda,
                                    const SeriesControl& c, bool dlambda) {
  if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("sfprf_pmf_table: alpha in (0,1]");
  if (!(lambda > 0)) throw std::invalid_argument("sfprf_pmf_table: lambda > 0");
  specfun::validate(c);
  double v_max = 0;
  for (double a : t1s)
    for (double b : t2s) v_max = std::max(v_max, a * b);
  const double x_max = v_max * std::pow(lambda, alpha);
  if (x_max > 2.0 * (1 + 1e-9))
    throw SeriesError("sfprf_pmf_table", "argument exceeds the supported domain (<= 2)");
  const double llam = std::log(lambda);
  const int K = std::max(c.max_terms, 10 * static_cast<int>(std::ceil(x_max)) + 60);

  auto coef = [&](int n, int k) -> LnVal {
    LnVal ff = falling_factorial_ln(alpha * k, n);
    if (ff.zero) return ff;
    ff.log += alpha * k * llam - lgl(n + 1.0) - lgl(k + 1.0);
    if ((n + k) % 2 == 1) ff.sign = -ff.sign;
    if (dlambda) {
      if (k == 0) return {0.0L, 1, true};
      ff.log += std::log(static_cast<long double>(alpha * k)) - llam;
    }
    return ff;
  };
  auto base = [&](std::size_t i, std::size_t j) { return t1s[i] * t2s[j]; };
  return pmf_table_power_series(n_max, t1s, t2s, "sfprf_pmf_table", v_max, K, coef, base, c,
                                !dlambda);
}

std::vector<double> stfprf_pmf_table(int n_max, std::span<const double> t1s,
                                     std::span<const double> t2s, const FieldParams& p,
                                     const SeriesControl& c, bool dlambda) {
  p.validate();
  specfun::validate(c);
  double w_max = 0;
  for (double a : t1s)
    for (double b : t2s)
      w_max = std::max(w_max, std::pow(a, p.alpha1) * std::pow(b, p.alpha2));
  const double x_max = std::pow(p.lambda, p.beta) * w_max;
  check_alternating_domain("stfprf_pmf_table", p.alpha1, p.alpha2, x_max);
  const double llam = std::log(p.lambda);
  const int K = std::max(c.max_terms,
                         std::max(static_cast<int>(std::ceil(n_max / p.beta)) + 60,
                                  10 * static_cast<int>(std::ceil(x_max)) + 60));

  auto coef = [&](int n, int k) -> LnVal {
    // (-1)^{n+k} C(beta k, n) Gamma(k+1) lambda^{beta k} / (G(a1 k+1) G(a2 k+1))
    SLGL den = signed_log_gamma_l(p.beta * k + 1.0 - static_cast<double>(n));
    if (den.pole) return {0.0L, 1, true};
    LnVal lv;
    lv.log = lgl(p.beta * k + 1.0) - den.log - lgl(n + 1.0) + lgl(k + 1.0) +
             p.beta * k * llam - lgl(p.alpha1 * k + 1.0) - lgl(p.alpha2 * k + 1.0) - lgl(k + 1.0);
    lv.sign = den.sign;
    if ((n + k) % 2 == 1) lv.sign = -lv.sign;
    if (dlambda) {
      if (k == 0) return {0.0L, 1, true};
      lv.log += std::log(static_cast<long double>(p.beta * k)) - llam;
    }
    return lv;
  };
  auto base = [&](std::size_t i, std::size_t j) {
    return std::pow(t1s[i], p.alpha1) * std::pow(t2s[j], p.alpha2);
  };
  return pmf_table_power_series(n_max, t1s, t2s, "stfprf_pmf_table", w_max, K, coef, base, c,
                                !dlambda);
}

}  // namespace planefield::dists
