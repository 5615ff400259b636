#include "planefield/kernels.hpp"

#include <cmath>

// Reference kernels. Plain left-to-right loops; the SIMD variants are tested
// against these.

namespace planefield::kernels::detail {

namespace {

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

}  // namespace

const Ops scalar_ops = {sum_scalar, dot_scalar, max_abs_scalar};

}  // namespace planefield::kernels::detail
