#pragma once

#include <complex>
#include <span>
#include <vector>

#include "planefield/geometry.hpp"
#include "planefield/specfun.hpp"

// Closed-form laws of the planar Poisson field and its fractional variants,
// evaluated as error-controlled series.
//
// The alternating series behind the time-fractional pmfs (Eqs. with the
// k! / (Gamma(k a1 + 1) Gamma(k a2 + 1)) coefficients) are entire only for
// alpha1 + alpha2 > 1; at alpha1 + alpha2 = 1 the radius of convergence in
// x = lambda t1^a1 t2^a2 is alpha1^alpha1 alpha2^alpha2, and below 1 they
// diverge for every x > 0. Arguments outside that domain, or beyond the
// supported cap x <= 2, fail loudly with SeriesError; double precision cannot
// absorb the cancellation further out.

namespace planefield::dists {

using specfun::SeriesControl;

// Rate and fractional orders of the field variant. (1, 1, 1) orders reproduce
// the plain Poisson random field everywhere.
struct FieldParams {
  double lambda = 1.0;
  double alpha1 = 1.0;  // time order, first axis
  double alpha2 = 1.0;  // time order, second axis
  double beta = 1.0;    // space order

  void validate() const;
};

// Compounding law of the marks.
struct CompoundParams {
  enum class Kind { normal, exponential, mittag_leffler };
  Kind kind = Kind::normal;
  double sigma = 1.0;   // exponential / Mittag-Leffler rate
  double beta_c = 1.0;  // Mittag-Leffler order (1 = exponential)

  void validate() const;
};

// --- counting laws ---------------------------------------------------------

// Poisson random field: e^{-lambda t1 t2} (lambda t1 t2)^n / n!
double prf_pmf(long long n, double t1, double t2, double lambda);

// Time-fractional PRF pmf (orders alpha1, alpha2; beta ignored).
double fprf_pmf(long long n, double t1, double t2, const FieldParams& p, const SeriesControl& c);
std::vector<double> fprf_pmf_range(long long n_max, double t1, double t2, const FieldParams& p,
                                   const SeriesControl& c);

// Laplace transform E e^{-u N_{a1,a2}(t1,t2)}; direct series route.
double fprf_laplace(double u, double t1, double t2, const FieldParams& p, const SeriesControl& c);

// Space-fractional PRF pmf and pgf.
double sfprf_pmf(long long n, double t1, double t2, double alpha, double lambda,
                 const SeriesControl& c);
std::vector<double> sfprf_pmf_range(long long n_max, double t1, double t2, double alpha,
                                    double lambda, const SeriesControl& c);
// Exact partial sum  sum_{n=0}^{N} pmf(n), evaluated in closed form through
// the alternating-binomial identity  sum_{n<=N} (-1)^n C(a,n) = (-1)^N C(a-1,N);
// usable for tail mass at N far beyond anything term-by-term summation could
// reach (the sfprf tail decays like N^-alpha).
double sfprf_partial_sum(long long N, double t1, double t2, double alpha, double lambda,
                         const SeriesControl& c);
double sfprf_pgf(double u, double t1, double t2, double alpha, double lambda);

// Space-time fractional PRF pmf: ((-1)^n / n!) 3Psi3[...](-t1^a1 t2^a2 l^b).
// Routed through specfun::wright for moderate n; large n (where n! overflows
// the Wright value) uses the equivalent internally scaled series.
double stfprf_pmf(long long n, double t1, double t2, const FieldParams& p, const SeriesControl& c);
std::vector<double> stfprf_pmf_range(long long n_max, double t1, double t2, const FieldParams& p,
                                     const SeriesControl& c);
double stfprf_partial_sum(long long N, double t1, double t2, const FieldParams& p,
                          const SeriesControl& c);

// Laplace transform of the TFPRF in its 2Psi2 form; must agree with
// fprf_laplace (the two series are the same identity written twice).
double tfprf_laplace(double u, double t1, double t2, const FieldParams& p, const SeriesControl& c);

// --- compound laws ---------------------------------------------------------

// Exponential compounding of the time-fractional CPRF: atom at 0 plus an
// absolutely continuous part.
double cprf_exp_atom(double t1, double t2, const FieldParams& p, const SeriesControl& c);
double cprf_exp_density(double y, double t1, double t2, const FieldParams& p, double sigma,
                        const SeriesControl& c);
double cprf_exp_cdf(double y, double t1, double t2, const FieldParams& p, double sigma,
                    const SeriesControl& c);

// Density of the n-fold sum of Mittag-Leffler marks:
// sigma^n y^{beta n - 1} E^n_{beta, beta n}(-sigma y^beta).
double ml_nfold_density(double y, int n, double sigma, double beta_c, const SeriesControl& c);

// Mittag-Leffler compounding over plain Poisson counts.
double cprf_ml_density(double y, double t1, double t2, double lambda, double sigma, double beta_c,
                       const SeriesControl& c);

// --- characteristic functions (normal compounding, unit rate) ---------------

std::complex<double> normal_cprf_cf(double u, const Rect& rect);
std::complex<double> normal_cprf_joint_cf(double u, double v, Point p1, Point p2);

// --- grid tables (pdecheck batch evaluation) --------------------------------
//
// Evaluate pmf(n, t1_i, t2_j) for n = 0..n_max on a tensor grid. The Gamma
// coefficient tables are computed once; each node is then a coefficient/power
// dot product (kernels::dot). Layout: [(n * t1s.size() + i) * t2s.size() + j].
std::vector<double> fprf_pmf_table(int n_max, std::span<const double> t1s,
                                   std::span<const double> t2s, const FieldParams& p,
                                   const SeriesControl& c);
std::vector<double> sfprf_pmf_table(int n_max, std::span<const double> t1s,
                                    std::span<const double> t2s, double alpha, double lambda,
                                    const SeriesControl& c, bool dlambda = false);
std::vector<double> stfprf_pmf_table(int n_max, std::span<const double> t1s,
                                     std::span<const double> t2s, const FieldParams& p,
                                     const SeriesControl& c, bool dlambda = false);

}  // namespace planefield::dists
