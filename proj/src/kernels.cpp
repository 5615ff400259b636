#include "planefield/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace planefield::kernels {

namespace {

const detail::Ops* ops_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return &detail::scalar_ops;
#ifdef PLANEFIELD_BUILD_AVX2
    case Backend::avx2:
      return &detail::avx2_ops;
#endif
#ifdef PLANEFIELD_BUILD_NEON
    case Backend::neon:
      return &detail::neon_ops;
#endif
    default:
      return nullptr;
  }
}

bool cpu_supports(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
#ifdef PLANEFIELD_BUILD_AVX2
    case Backend::avx2:
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#endif
#ifdef PLANEFIELD_BUILD_NEON
    case Backend::neon:
      return true;  // baseline on aarch64
#endif
    default:
      return false;
  }
}

Backend pick_default() {
  if (const char* env = std::getenv("PLANEFIELD_KERNEL_BACKEND")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && backend_available(Backend::avx2)) return Backend::avx2;
    if (std::strcmp(env, "neon") == 0 && backend_available(Backend::neon)) return Backend::neon;
  }
  if (backend_available(Backend::avx2)) return Backend::avx2;
  if (backend_available(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

struct Dispatch {
  std::atomic<const detail::Ops*> ops;
  std::atomic<Backend> which;
  Dispatch() {
    Backend b = pick_default();
    which = b;
    ops = ops_for(b);
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "?";
}

bool backend_available(Backend b) { return ops_for(b) != nullptr && cpu_supports(b); }

Backend active_backend() { return dispatch().which.load(); }

void set_backend(Backend b) {
  if (!backend_available(b))
    throw std::invalid_argument(std::string("kernel backend not available: ") + backend_name(b));
  dispatch().which.store(b);
  dispatch().ops.store(ops_for(b));
}

double sum(const double* x, std::size_t n) { return dispatch().ops.load()->sum(x, n); }
double dot(const double* x, const double* y, std::size_t n) {
  return dispatch().ops.load()->dot(x, y, n);
}
double max_abs(const double* x, std::size_t n) { return dispatch().ops.load()->max_abs(x, n); }

}  // namespace planefield::kernels
