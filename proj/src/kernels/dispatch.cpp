#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "wgqed/kernels.hpp"

namespace wgqed::kernels {

namespace {

Backend detect() {
  if (const char* env = std::getenv("WGQED_SIMD"); env && std::strcmp(env, "scalar") == 0)
    return Backend::Scalar;
  return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{detect()};
  return b;
}

}  // namespace

bool avx2_available() {
#if defined(WGQED_HAVE_AVX2)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

std::string_view backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_available())
    throw std::runtime_error("AVX2 backend not available on this host");
  current().store(b, std::memory_order_relaxed);
}

#if defined(WGQED_HAVE_AVX2)
#define WGQED_DISPATCH(fn, ...) \
  return active_backend() == Backend::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define WGQED_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void zaxpy(std::size_t n, cplx a, const cplx* x, cplx* y) { WGQED_DISPATCH(zaxpy, n, a, x, y); }

void lincomb(std::size_t n, std::size_t m, const double* w, const cplx* const* xs, cplx* y) {
  WGQED_DISPATCH(lincomb, n, m, w, xs, y);
}

cplx zdotc(std::size_t n, const cplx* x, const cplx* y) { WGQED_DISPATCH(zdotc, n, x, y); }

void csr_spmv(const CsrView& a, const cplx* x, cplx* y) { WGQED_DISPATCH(csr_spmv, a, x, y); }

#undef WGQED_DISPATCH

}  // namespace wgqed::kernels
