#pragma once

#include <cstddef>
#include <string>

// Data-parallel reduction kernels used by the series evaluators (coefficient
// dot products), the L1 fractional-derivative convolution and the Monte Carlo
// statistics. A scalar reference implementation always exists; AVX2/NEON
// variants are selected at runtime and must agree with the reference up to
// reassociation error (see tests/test_kernels.cpp).

namespace planefield::kernels {

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);
bool backend_available(Backend b);
Backend active_backend();

// Force a backend, e.g. for equivalence tests. Throws std::invalid_argument
// if the backend is not available on this machine. The environment variable
// PLANEFIELD_KERNEL_BACKEND (scalar|avx2|neon) sets the initial choice.
void set_backend(Backend b);

double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double max_abs(const double* x, std::size_t n);

namespace detail {
struct Ops {
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
};
extern const Ops scalar_ops;
#ifdef PLANEFIELD_BUILD_AVX2
extern const Ops avx2_ops;
#endif
#ifdef PLANEFIELD_BUILD_NEON
extern const Ops neon_ops;
#endif
}  // namespace detail

}  // namespace planefield::kernels
