#include "doctest.h"

#include <cmath>

#include "wgqed/graded.hpp"
#include "wgqed/operators.hpp"

using namespace wgqed;

TEST_CASE("lowering operator structure") {
  const Mat s = lowering_operator(1, 1).dense();
  Mat expect(2, 2);
  expect << 0, 1, 0, 0;
  CHECK((s - expect).cwiseAbs().maxCoeff() == 0.0);
  const auto s12 = lowering_operator(1, 2);
  CHECK(s12.data.nonZeros() == 2);
  CHECK(s12.dim() == 4);
  for (int n = 1; n <= 4; ++n)
    for (int site = 1; site <= n; ++site) {
      const Mat m = lowering_operator(site, n).dense();
      CHECK((m * m).cwiseAbs().maxCoeff() == 0.0);
      // Unit entries only: the embedding is a partial permutation.
      CHECK(m.cwiseAbs().sum() == doctest::Approx(std::pow(2.0, n - 1)));
    }
  CHECK_THROWS(lowering_operator(0, 3));
  CHECK_THROWS(lowering_operator(4, 3));
}

TEST_CASE("distinct sites commute and sigma^z squares to one") {
  const int n = 4;
  for (int i = 1; i <= n; ++i) {
    const Mat a = lowering_operator(i, n).dense();
    const Mat z = z_from_lowering(a);
    CHECK((z * z - Mat::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-15);
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      const Mat b = lowering_operator(j, n).dense();
      CHECK((a * b - b * a).cwiseAbs().maxCoeff() == 0.0);
      CHECK((a * b.adjoint() - b.adjoint() * a).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("z from lowering") {
  const Mat z = z_from_lowering(lowering_operator(1, 1).dense());
  CHECK(z(0, 0).real() == -1.0);
  CHECK(z(1, 1).real() == 1.0);
  const Mat zz = z_from_lowering(Mat::Zero(4, 4));
  CHECK((zz + Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS(z_from_lowering(Mat::Zero(2, 3)));
}

TEST_CASE("product states") {
  const auto psi = build_product_state("001100", 6);
  Eigen::Index hot = -1;
  for (Eigen::Index b = 0; b < psi.size(); ++b)
    if (std::abs(psi[b]) > 0) hot = b;
  CHECK(hot == (1 << 2) + (1 << 3));
  CHECK(psi.norm() == doctest::Approx(1.0));

  const auto plus = build_product_state("+", 1);
  CHECK(plus[0].real() == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(plus[1].real() == doctest::Approx(1 / std::sqrt(2.0)));

  const auto pm = build_product_state("+-", 2);
  CHECK(std::abs(pm.norm() - 1.0) < 1e-12);
  for (int s = 1; s <= 2; ++s)
    CHECK(std::abs(expectation(z_from_lowering(lowering_operator(s, 2).dense()), pm)) < 1e-15);
  CHECK(build_product_state("+\xE2\x88\x92", 2).isApprox(pm));
  CHECK_THROWS(build_product_state("0x", 2));
  CHECK_THROWS(build_product_state("01", 3));
}

TEST_CASE("expectation values") {
  const Mat s1 = lowering_operator(1, 2).dense();
  const Mat n1 = s1.adjoint() * s1;
  CHECK(expectation(n1, build_product_state("10", 2)).real() == doctest::Approx(1.0));
  CHECK(expectation(n1, build_product_state("+0", 2)).real() == doctest::Approx(0.5));
  const Mat s3 = lowering_operator(3, 6).dense();
  CHECK(expectation(Mat(s3.adjoint() * s3), build_product_state("001100", 6)).real() == doctest::Approx(1.0));
  CHECK(std::abs(expectation(n1, build_product_state("+-", 2)).imag()) < 1e-10);
  CHECK(normal_ordered_pair(s1, s1, build_product_state("+0", 2)).real() == doctest::Approx(0.5));
  CHECK_THROWS(expectation(n1, build_product_state("1", 1)));
}

TEST_CASE("fully excited state has N excitations") {
  for (int n = 1; n <= 6; ++n) {
    const auto psi = build_product_state(std::string(n, '1'), n);
    double tot = 0.0;
    for (int l = 1; l <= n; ++l) {
      const Mat s = lowering_operator(l, n).dense();
      tot += expectation(Mat(s.adjoint() * s), psi).real();
    }
    CHECK(tot == doctest::Approx(n));
  }
}

TEST_CASE("product state moments") {
  const auto m = product_state_moments("+-0", 3);
  CHECK(m(0, 0).real() == doctest::Approx(0.5));
  CHECK(m(0, 1).real() == doctest::Approx(-0.25));
  CHECK(m(2, 2).real() == 0.0);
  CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("graded layout round trip") {
  for (int n = 1; n <= 5; ++n) {
    const GradedLayout g(n);
    std::size_t expect = 0;
    for (int w = 1; w <= n; ++w) expect += static_cast<std::size_t>(g.block_rows(w) * g.block_cols(w));
    CHECK(g.packed_size() == expect);
    std::vector<cplx> buf(g.packed_size());
    for (int l = 1; l <= n; ++l) {
      const Mat s = lowering_operator(l, n).dense();
      CHECK(g.off_block_norm(s) == 0.0);
      g.pack(s, buf.data());
      CHECK((g.unpack(buf.data()) - s).cwiseAbs().maxCoeff() == 0.0);
      const auto psi = build_product_state(std::string(n, '+'), n);
      CHECK((g.apply(buf.data(), psi) - s * psi).norm() < 1e-14);
    }
  }
  CHECK(GradedLayout(6).packed_size() == 792);
}
