#include "doctest.h"

#include <random>
#include <vector>

#include "wgqed/kernels.hpp"
#include "wgqed/krylov.hpp"

using namespace wgqed;
using kernels::cplx;

namespace {

std::vector<cplx> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {d(rng), d(rng)};
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("scalar kernels against naive complex arithmetic") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {0u, 1u, 2u, 3u, 17u, 64u}) {
    const auto x = random_vec(n, rng), y0 = random_vec(n, rng);
    const cplx a(0.3, -1.7);
    auto y = y0;
    kernels::scalar::zaxpy(n, a, x.data(), y.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y[i] - (y0[i] + a * x[i])) < 1e-14);
    cplx dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += std::conj(x[i]) * y0[i];
    CHECK(std::abs(kernels::scalar::zdotc(n, x.data(), y0.data()) - dot) < 1e-12);
  }
}

TEST_CASE("lincomb allows aliasing the first input") {
  std::mt19937_64 rng(3);
  const std::size_t n = 11;
  auto x = random_vec(n, rng);
  const auto k = random_vec(n, rng);
  const auto x0 = x;
  const double w[2] = {1.0, 0.25};
  const cplx* xs[2] = {x.data(), k.data()};
  kernels::lincomb(n, 2, w, xs, x.data());
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x[i] - (x0[i] + 0.25 * k[i])) < 1e-15);
}

#if defined(WGQED_HAVE_AVX2)
TEST_CASE("avx2 kernels match the scalar reference") {
  if (!kernels::avx2_available()) {
    MESSAGE("AVX2 not supported on this host; equivalence test skipped");
    return;
  }
  std::mt19937_64 rng(11);
  for (std::size_t n : {0u, 1u, 2u, 3u, 5u, 8u, 33u, 1000u}) {
    const auto x = random_vec(n, rng), y0 = random_vec(n, rng);
    const cplx a(-0.4, 2.2);
    auto ys = y0, yv = y0;
    kernels::scalar::zaxpy(n, a, x.data(), ys.data());
    kernels::avx2::zaxpy(n, a, x.data(), yv.data());
    CHECK(max_diff(ys, yv) < 1e-13);

    CHECK(std::abs(kernels::scalar::zdotc(n, x.data(), y0.data()) - kernels::avx2::zdotc(n, x.data(), y0.data())) <
          1e-11 * (1.0 + static_cast<double>(n)));

    const auto z = random_vec(n, rng);
    const double w[3] = {0.5, -1.25, 3.0};
    const cplx* xs[3] = {x.data(), y0.data(), z.data()};
    std::vector<cplx> ls(n), lv(n);
    kernels::scalar::lincomb(n, 3, w, xs, ls.data());
    kernels::avx2::lincomb(n, 3, w, xs, lv.data());
    CHECK(max_diff(ls, lv) < 1e-13);
  }
}

TEST_CASE("avx2 sparse mat-vec matches the scalar reference") {
  if (!kernels::avx2_available()) return;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> col(0, 199), cnt(0, 9);
  std::normal_distribution<double> d;
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int r = 0; r < 200; ++r) {
    const int k = cnt(rng);
    for (int i = 0; i < k; ++i) trip.emplace_back(r, col(rng), cplx(d(rng), d(rng)));
  }
  const auto m = CsrMatrix::from_triplets(200, trip);
  const auto x = random_vec(200, rng);
  std::vector<cplx> ys(200), yv(200);
  kernels::scalar::csr_spmv(m.view(), x.data(), ys.data());
  kernels::avx2::csr_spmv(m.view(), x.data(), yv.data());
  CHECK(max_diff(ys, yv) < 1e-12);
}
#endif

TEST_CASE("backend selection") {
  const auto initial = kernels::active_backend();
  kernels::set_backend(kernels::Backend::Scalar);
  CHECK(kernels::active_backend() == kernels::Backend::Scalar);
  if (!kernels::avx2_available()) CHECK_THROWS(kernels::set_backend(kernels::Backend::Avx2));
  kernels::set_backend(initial);
  CHECK(kernels::backend_name(kernels::Backend::Avx2) == "avx2");
}
