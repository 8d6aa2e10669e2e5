#include "wgqed/kernels.hpp"

#if defined(WGQED_HAVE_AVX2)

#include <immintrin.h>

namespace wgqed::kernels::avx2 {

namespace {

inline const double* re(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* re(cplx* p) { return reinterpret_cast<double*>(p); }

// [r0 i0 r1 i1] -> [i0 r0 i1 r1]
inline __m256d swap_ri(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

// Two complex products a*b, lane-wise.
inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d ar = _mm256_movedup_pd(a);
  const __m256d ai = _mm256_permute_pd(a, 0b1111);
  return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, swap_ri(b)));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void zaxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  const double* xd = re(x);
  double* yd = re(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d prod = _mm256_fmaddsub_pd(ar, xv, _mm256_mul_pd(ai, swap_ri(xv)));
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * i), prod));
  }
  if (i < n) scalar::zaxpy(n - i, a, x + i, y + i);
}

void lincomb(std::size_t n, std::size_t m, const double* w, const cplx* const* xs, cplx* y) {
  double* yd = re(y);
  const std::size_t len = 2 * n;
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < m; ++k)
      acc = _mm256_fmadd_pd(_mm256_set1_pd(w[k]), _mm256_loadu_pd(re(xs[k]) + i), acc);
    _mm256_storeu_pd(yd + i, acc);
  }
  for (; i < len; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) acc += w[k] * re(xs[k])[i];
    yd[i] = acc;
  }
}

cplx zdotc(std::size_t n, const cplx* x, const cplx* y) {
  const double* xd = re(x);
  const double* yd = re(y);
  __m256d same = _mm256_setzero_pd();
  __m256d cross = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    same = _mm256_fmadd_pd(xv, yv, same);
    cross = _mm256_fmadd_pd(xv, swap_ri(yv), cross);
  }
  // cross holds [xr*yi, xi*yr, ...]; the imaginary part is even minus odd lanes.
  const __m256d sign = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
  cplx s(hsum(same), hsum(_mm256_mul_pd(cross, sign)));
  if (i < n) s += scalar::zdotc(n - i, x + i, y + i);
  return s;
}

void csr_spmv(const CsrView& a, const cplx* x, cplx* y) {
  const double* xd = re(x);
  const double* vd = re(a.val);
  double* yd = re(y);
  for (std::size_t r = 0; r < a.rows; ++r) {
    std::int32_t p = a.row_ptr[r];
    const std::int32_t end = a.row_ptr[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; p + 2 <= end; p += 2) {
      const __m256d v = _mm256_loadu_pd(vd + 2 * p);
      const __m128d x0 = _mm_loadu_pd(xd + 2 * static_cast<std::size_t>(a.col[p]));
      const __m128d x1 = _mm_loadu_pd(xd + 2 * static_cast<std::size_t>(a.col[p + 1]));
      acc = _mm256_add_pd(acc, cmul(v, _mm256_set_m128d(x1, x0)));
    }
    __m128d s = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    if (p < end) {
      const double vr = vd[2 * p], vi = vd[2 * p + 1];
      const std::size_t c = static_cast<std::size_t>(a.col[p]);
      const double xr = xd[2 * c], xi = xd[2 * c + 1];
      s = _mm_add_pd(s, _mm_set_pd(vr * xi + vi * xr, vr * xr - vi * xi));
    }
    _mm_storeu_pd(yd + 2 * r, s);
  }
}

}  // namespace wgqed::kernels::avx2

#endif
