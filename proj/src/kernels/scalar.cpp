#include "wgqed/kernels.hpp"

// Written on the real and imaginary parts directly so the compiler never
// routes through the NaN-safe complex multiply helper.

namespace wgqed::kernels::scalar {

namespace {
inline const double* re(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* re(cplx* p) { return reinterpret_cast<double*>(p); }
}  // namespace

void zaxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double ar = a.real(), ai = a.imag();
  const double* xd = re(x);
  double* yd = re(y);
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = xd[2 * i], xi = xd[2 * i + 1];
    yd[2 * i] += ar * xr - ai * xi;
    yd[2 * i + 1] += ar * xi + ai * xr;
  }
}

void lincomb(std::size_t n, std::size_t m, const double* w, const cplx* const* xs, cplx* y) {
  double* yd = re(y);
  for (std::size_t i = 0; i < 2 * n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) acc += w[k] * re(xs[k])[i];
    yd[i] = acc;
  }
}

cplx zdotc(std::size_t n, const cplx* x, const cplx* y) {
  const double* xd = re(x);
  const double* yd = re(y);
  double sr = 0.0, si = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = xd[2 * i], xi = xd[2 * i + 1];
    const double yr = yd[2 * i], yi = yd[2 * i + 1];
    sr += xr * yr + xi * yi;
    si += xr * yi - xi * yr;
  }
  return {sr, si};
}

void csr_spmv(const CsrView& a, const cplx* x, cplx* y) {
  const double* xd = re(x);
  const double* vd = re(a.val);
  double* yd = re(y);
  for (std::size_t r = 0; r < a.rows; ++r) {
    double sr = 0.0, si = 0.0;
    for (std::int32_t p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
      const double vr = vd[2 * p], vi = vd[2 * p + 1];
      const std::size_t c = static_cast<std::size_t>(a.col[p]);
      const double xr = xd[2 * c], xi = xd[2 * c + 1];
      sr += vr * xr - vi * xi;
      si += vr * xi + vi * xr;
    }
    yd[2 * r] = sr;
    yd[2 * r + 1] = si;
  }
}

}  // namespace wgqed::kernels::scalar
