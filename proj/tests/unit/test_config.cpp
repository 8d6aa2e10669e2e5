#include "doctest.h"

#include <cmath>

#include "wgqed/config.hpp"
#include "wgqed/kernel.hpp"

using namespace wgqed;

TEST_CASE("chain config unit conversion") {
  const auto c = build_chain_config(6, 2.0, 50 * M_PI, 5 * M_PI / 4);
  CHECK(c.tau12() == doctest::Approx(5 * M_PI / 8).epsilon(1e-15));
  CHECK(c.gamma.size() == 6);
  CHECK(c.zero_lamb_shift());
  const auto one = build_chain_config(1, 1.0, 0.0, 0.0);
  CHECK(one.n_emitters == 1);
  CHECK(one.tau12() == 0.0);
}

TEST_CASE("invalid configs are rejected") {
  CHECK_THROWS(build_chain_config(0, 1.0, 0.0, 0.0));
  CHECK_THROWS(build_chain_config(2, 0.0, 0.0, 0.0));
  CHECK_THROWS(build_chain_config(2, -1.0, 0.0, 0.0));
  CHECK_THROWS(build_chain_config(2, 1.0, 0.0, -0.1));
  auto c = build_chain_config(3, 1.0, 0.0, 0.1);
  c.topology = Topology::TwoNodeLink;
  CHECK_THROWS(c.validate());
  c = build_chain_config(3, 1.0, 0.0, 0.1);
  c.gamma.pop_back();
  CHECK_THROWS(c.validate());
}

TEST_CASE("delay matrix") {
  const auto d3 = delay_matrix(build_chain_config(3, 1.0, 0.0, 0.1)).tau;
  Eigen::MatrixXd expect(3, 3);
  expect << 0, 0.1, 0.2, 0.1, 0, 0.1, 0.2, 0.1, 0;
  CHECK((d3 - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(delay_matrix(build_chain_config(1, 1.0, 0.0, 0.1)).tau(0, 0) == 0.0);
  const auto dl = delay_matrix(build_link_config(1.0, 2 * M_PI, 8 * M_PI)).tau;
  CHECK(dl(0, 1) == doctest::Approx(8 * M_PI));
  CHECK(dl(1, 0) == doctest::Approx(8 * M_PI));
  CHECK(dl(0, 0) == 0.0);
}

TEST_CASE("delay matrix triangle equality on a chain") {
  const auto d = delay_matrix(build_chain_config(7, 1.0, 0.3, 0.37)).tau;
  for (int l = 0; l < 7; ++l)
    for (int m = l; m < 7; ++m)
      for (int n = m; n < 7; ++n) CHECK(d(l, n) == doctest::Approx(d(l, m) + d(m, n)).epsilon(1e-14));
  CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("green tensor entries") {
  const auto g2pi = green_tensor(build_chain_config(3, 1.0, 2 * M_PI, 0.1)).g;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      CHECK(g2pi(a, b).real() == doctest::Approx(0.5));
      CHECK(std::abs(g2pi(a, b).imag()) < 1e-15);
    }
  const auto gpi = green_tensor(build_chain_config(3, 1.0, M_PI, 0.1)).g;
  CHECK(gpi(0, 1).real() == doctest::Approx(-0.5));
  CHECK(gpi(0, 2).real() == doctest::Approx(0.5));
  CHECK(gpi(1, 1).real() == doctest::Approx(0.5));
}

TEST_CASE("green tensor symmetry and magnitudes") {
  ArrayConfig c = build_chain_config(5, 1.0, 0.77, 0.2);
  c.gamma = {1.0, 2.0, 0.5, 1.5, 3.0};
  c.lamb_shift = {0.1, 0.0, -0.2, 0.0, 0.3};
  const auto g = green_tensor(c).g;
  for (int a = 0; a < 5; ++a) {
    CHECK(g(a, a).real() == doctest::Approx(c.gamma[a] / 2));
    CHECK(g(a, a).imag() == doctest::Approx(c.lamb_shift[a]));
    for (int b = 0; b < 5; ++b) {
      CHECK(std::abs(g(a, b) - g(b, a)) < 1e-15);
      if (a != b) CHECK(std::abs(g(a, b)) == doctest::Approx(std::sqrt(c.gamma[a] * c.gamma[b]) / 2));
    }
  }
}

TEST_CASE("chain kernel collapses to one lag without delay") {
  const auto k0 = build_kernel(build_chain_config(4, 1.0, M_PI, 0.0), 1.0);
  CHECK(k0.delays.size() == 1);
  CHECK(k0.terms.size() == 16);
  const auto k = build_kernel(build_chain_config(4, 1.0, M_PI, 0.2), 1.0);
  CHECK(k.delays.size() == 4);
  CHECK(k.delays[3] == doctest::Approx(0.6));
}

TEST_CASE("link kernel train truncation") {
  const auto cfg = build_link_config(1.0, 2 * M_PI, 1.0);
  const auto k = build_kernel(cfg, 3.5);
  CHECK(k.delays.size() == 4);  // 0, tau, 2 tau, 3 tau
  int odd_cross = 0, even_self = 0;
  for (const auto& t : k.terms) {
    if (t.local) continue;
    if (t.lag % 2 == 1) odd_cross += t.source != t.target;
    if (t.lag % 2 == 0) even_self += t.source == t.target;
  }
  CHECK(odd_cross == 4);
  CHECK(even_self == 2);
  CHECK_THROWS(build_kernel(build_link_config(1.0, 0.0, 0.0), 1.0));
  const auto printed = build_kernel(cfg, 1.5, LinkConvention::AsPrinted);
  for (const auto& t : printed.terms)
    if (!t.local) CHECK(std::abs(t.weight - cplx(0.0, -1.0)) < 1e-14);
}

TEST_CASE("enum parsing") {
  CHECK(parse_topology("chain") == Topology::InfiniteChain);
  CHECK(parse_topology("link") == Topology::TwoNodeLink);
  CHECK(parse_emitter_kind("boson") == EmitterKind::Bosonic);
  CHECK_THROWS(parse_topology("ring"));
  CHECK(parse_link_convention(to_string(LinkConvention::AsPrinted)) == LinkConvention::AsPrinted);
}
