#pragma once

#include <span>
#include <utility>
#include <vector>

#include "planefield/errors.hpp"
#include "planefield/report.hpp"

namespace planefield::specfun {

// Truncation policy for all series evaluations. A series either meets `tol`
// (successive-term bound, with three consecutively decreasing terms required
// before stopping) or throws SeriesError; partial sums are never returned
// silently. With `alternating_guard` set, terms are computed in extended
// precision and accumulated with compensation, and the result is refused when
// the estimated cancellation exceeds 1e-4 relative (unless the absolute error
// estimate still meets `tol`, which is what matters near a zero crossing).
struct SeriesControl {
  double tol = 1e-12;
  int max_terms = 400;
  bool alternating_guard = true;
};

void validate(const SeriesControl& ctrl);  // throws std::invalid_argument

// log Gamma(x) for x > 0, Lanczos approximation, |relative error| < 1e-13 on
// (0, 170].
double log_gamma(double x);

// Signed log Gamma on the whole real line (reflection for x <= 0).
struct SignedLogGamma {
  double log;   // log |Gamma(x)|, undefined at poles
  int sign;     // sign of Gamma(x); 0 at poles
  bool pole;    // x is a non-positive integer
};
SignedLogGamma signed_log_gamma(double x);

// 1/Gamma(x), entire: exactly 0 at the poles of Gamma.
double gamma_recip(double x);

// Three-parameter Mittag-Leffler function
//   E^gamma_{alpha,beta}(x) = sum_k gamma^(k) x^k / (Gamma(alpha k + beta) k!)
// with gamma^(k) the rising factorial. Entire in x for alpha > 0.
double ml3(double alpha, double beta, double gamma, double x, const SeriesControl& ctrl);

// One-parameter Mittag-Leffler, E_alpha(x) = E^1_{alpha,1}(x).
double ml1(double alpha, double x, const SeriesControl& ctrl);

// Generalized Wright function mPsi_l. Upper entries (a_i, alpha_i), lower
// entries (b_j, beta_j); all alpha_i, beta_j nonzero.
//
//   sum_n prod_i Gamma(a_i + n alpha_i) x^n / (prod_j Gamma(b_j + n beta_j) n!)
//
// A Gamma pole in a numerator factor is a hard failure; a pole in a
// denominator factor zeroes the term (1/Gamma convention). The convergence
// exponent delta = sum beta_j - sum alpha_i is checked up front: delta < -1
// diverges for every x != 0, delta == -1 has the finite radius
// prod |beta_j|^{beta_j} / prod |alpha_i|^{alpha_i}; the radius is enforced
// with a 5% safety margin since the terms' k^{-1/2}-type tail is not summable
// to tolerance at the boundary.
struct WrightSpec {
  std::vector<std::pair<double, double>> upper;
  std::vector<std::pair<double, double>> lower;
};
double wright(const WrightSpec& spec, double x, const SeriesControl& ctrl);

// Coefficients of (I - B)^alpha = sum_k c_k B^k for alpha in (0, 1]:
// c_k = (-1)^k (alpha choose k) via the stable recurrence
// c_0 = 1, c_k = c_{k-1} (k - 1 - alpha) / k.
std::vector<double> frac_binom_coeffs(double alpha, int K);

// Caputo derivative of order alpha in (0, 1] on a uniform grid, L1 scheme.
// Input: f at nodes 0..N (N >= 1). Output: the derivative at nodes 1..N
// (size N). For alpha == 1, central differences at interior nodes and a
// backward difference at the last node.
std::vector<double> caputo_l1(std::span<const double> f, double alpha, double dt);

// Checks the Laplace-transform identity of the three-parameter
// Mittag-Leffler function,
//   int_0^inf e^{-zt} t^{beta-1} E^gamma_{alpha,beta}(c t^alpha) dt
//     = z^{alpha gamma - beta} / (z^alpha - c)^gamma,  |c z^-alpha| < 1,
// by adaptive quadrature of the left side. Reports both values and the gap.
ComparisonReport ml_laplace_selftest(double alpha, double beta, double gamma, double c, double z,
                                     const SeriesControl& ctrl, double threshold = 1e-6);

namespace detail {
// Guarded compensated accumulator shared by the series evaluators: Kahan
// summation in long double plus the |term| total used for the cancellation
// estimate.
class GuardedSum {
 public:
  void add(long double t) {
    long double y = t - comp_;
    long double u = sum_ + y;
    comp_ = (u - sum_) - y;
    sum_ = u;
    abs_ += (t < 0 ? -t : t);
  }
  long double value() const { return sum_; }
  long double abs_total() const { return abs_; }
  // Estimated relative error from cancellation, assuming ~1e-17 relative
  // error per extended-precision term.
  double cancellation() const {
    long double mag = sum_ < 0 ? -sum_ : sum_;
    if (mag == 0.0L) return abs_ == 0.0L ? 0.0 : 1.0;
    return static_cast<double>(abs_ / mag * 1e-17L);
  }

 private:
  long double sum_ = 0, comp_ = 0, abs_ = 0;
};

// Long-double signed log Gamma (std::lgammal plus reflection bookkeeping);
// used by the guarded series paths.
struct SignedLogGammaL {
  long double log;
  int sign;
  bool pole;
};
SignedLogGammaL signed_log_gamma_l(double x);

constexpr double kCancellationLimit = 1e-4;

// Shared stopping logic: stop once |term| < tol and the magnitudes have been
// non-increasing for three consecutive terms. `min_k` delays stopping where a
// leading run of pole-zeroed terms precedes the live part of a series.
struct StopRule {
  double tol;
  int streak = 0;
  long double prev = 1e4932L;
  bool significant_seen = false;

  bool update(long double mag, int k, int min_k) {
    if (mag >= tol) significant_seen = true;
    if (mag <= prev)
      ++streak;
    else
      streak = 0;
    prev = mag;
    return mag < tol && streak >= 3 && (significant_seen || k >= min_k);
  }
};

// Applies the cancellation guard and converts to double; throws SeriesError
// naming `op` on refusal or overflow.
double guarded_value(const char* op, const GuardedSum& acc, bool guard, double tol);
}  // namespace detail

}  // namespace planefield::specfun
