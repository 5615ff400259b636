#include "planefield/quad.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "planefield/errors.hpp"

namespace planefield::quad {

// The integrators terminate once their (conservative) error estimate drops
// below sqrt(tol); with the quadratic convergence of the double-exponential
// rules the achieved error is then of order tol. An estimate far above the
// termination target signals genuine non-convergence.

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b >= a)) throw std::invalid_argument("quad::integrate: b < a");
  if (a == b) return 0.0;
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double term_tol = std::sqrt(tol);
  double err = 0, l1 = 0;
  double v = integrator.integrate(f, a, b, term_tol, &err, &l1);
  if (!std::isfinite(v) || err > 100 * term_tol * std::max(1.0, std::fabs(v)))
    throw SeriesError("quad::integrate", "quadrature did not converge to tolerance");
  return v;
}

double integrate_upper(const std::function<double(double)>& f, double a, double tol) {
  boost::math::quadrature::exp_sinh<double> integrator;
  const double term_tol = std::sqrt(tol);
  double err = 0, l1 = 0;
  double v = integrator.integrate([&](double t) { return f(a + t); }, term_tol, &err, &l1);
  if (!std::isfinite(v) || err > 100 * term_tol * std::max(1.0, std::fabs(v)))
    throw SeriesError("quad::integrate_upper", "quadrature did not converge to tolerance");
  return v;
}

}  // namespace planefield::quad
