#pragma once

// Dense complex vector kernels used by the time steppers and the Krylov
// exponentiator. Each kernel has a portable scalar reference and, on x86-64,
// an AVX2+FMA variant; the dispatcher picks one at startup.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace wgqed::kernels {

using cplx = std::complex<double>;

/// Compressed sparse row matrix view (0-based, int32 indices).
struct CsrView {
  std::size_t rows = 0;
  const std::int32_t* row_ptr = nullptr;
  const std::int32_t* col = nullptr;
  const cplx* val = nullptr;
};

namespace scalar {
/// y += a * x
void zaxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
/// y = sum_k w[k] * xs[k]   (real weights; y may alias xs[0])
void lincomb(std::size_t n, std::size_t m, const double* w, const cplx* const* xs, cplx* y);
/// sum_i conj(x_i) * y_i
cplx zdotc(std::size_t n, const cplx* x, const cplx* y);
/// y = A x
void csr_spmv(const CsrView& a, const cplx* x, cplx* y);
}  // namespace scalar

#if defined(WGQED_HAVE_AVX2)
namespace avx2 {
void zaxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
void lincomb(std::size_t n, std::size_t m, const double* w, const cplx* const* xs, cplx* y);
cplx zdotc(std::size_t n, const cplx* x, const cplx* y);
void csr_spmv(const CsrView& a, const cplx* x, cplx* y);
}  // namespace avx2
#endif

enum class Backend { Scalar, Avx2 };

/// True when the AVX2 variant is compiled in and the CPU supports AVX2+FMA.
bool avx2_available();

/// Selected once from CPU features; WGQED_SIMD=scalar in the environment
/// forces the reference path.
Backend active_backend();
std::string_view backend_name(Backend b);

/// Override the selection (tests). Throws if the backend is unavailable.
void set_backend(Backend b);

void zaxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
void lincomb(std::size_t n, std::size_t m, const double* w, const cplx* const* xs, cplx* y);
cplx zdotc(std::size_t n, const cplx* x, const cplx* y);
void csr_spmv(const CsrView& a, const cplx* x, cplx* y);

}  // namespace wgqed::kernels
