#pragma once

#include <functional>

namespace planefield::quad {

// Adaptive quadrature over [a, b]; tanh-sinh, tolerant of integrable endpoint
// singularities. Throws SeriesError when the requested tolerance cannot be
// certified.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

// Quadrature over [a, inf) for integrands with (at least) exponential decay.
double integrate_upper(const std::function<double(double)>& f, double a, double tol = 1e-10);

}  // namespace planefield::quad
