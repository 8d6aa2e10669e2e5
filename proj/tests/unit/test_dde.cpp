#include "doctest.h"

#include <cmath>
#include <limits>

#include "wgqed/dde.hpp"

using namespace wgqed;

namespace {

// Method-of-steps solution of dx/dt = -x(t-1), x(t <= 0) = 1.
double steps_oracle(double t) {
  double s = 0.0, fact = 1.0;
  for (int k = 0; k <= static_cast<int>(std::floor(t)) + 1; ++k) {
    if (k > 0) fact *= k;
    if (t - k + 1 < 0) break;
    s += std::pow(-1.0, k) * std::pow(t - k + 1, k) / fact;
  }
  return s;
}

DelayedSystem unit_lag_system() {
  DelayedSystem sys;
  sys.dim = 1;
  sys.delays = {1.0};
  sys.rhs = [](double, const Vec&, const std::vector<const Vec*>& d, Vec& dx) { dx[0] = -(*d[0])[0]; };
  return sys;
}

double oracle_error(double dt, Interpolation interp, double t_end = 8.0) {
  IntegrationOptions opt;
  opt.interpolation = interp;
  opt.prehistory = Prehistory::HoldInitial;
  const auto traj = integrate(unit_lag_system(), Vec::Ones(1), t_end, dt, opt);
  double e = 0.0;
  for (std::size_t i = 0; i < traj.t.size(); ++i) e = std::max(e, std::abs(traj.x[i][0].real() - steps_oracle(traj.t[i])));
  return e;
}

}  // namespace

TEST_CASE("oracle sanity") {
  CHECK(steps_oracle(0.5) == doctest::Approx(0.5));
  CHECK(steps_oracle(1.5) == doctest::Approx(1 - 1.5 + 0.125));
}

TEST_CASE("sample_history grid points, pre-history and midpoints") {
  HistoryBuffer h(0.0, 0.1, 2);
  for (int k = 0; k < 6; ++k) {
    Vec v(2);
    v << cplx(k, 0), cplx(0, k * k);
    h.push(v);
  }
  const Vec s3 = h.sample(0.3);
  CHECK(s3[0].real() == 3.0);
  CHECK(s3[1].imag() == 9.0);
  CHECK(h.sample(-0.05).norm() == 0.0);
  const Vec mid = h.sample(0.25);
  CHECK(mid[0].real() == doctest::Approx(2.5));
  CHECK(mid[1].imag() == doctest::Approx(6.5));
  CHECK_THROWS(h.sample(0.55));
}

TEST_CASE("cubic history is exact on cubics") {
  HistoryBuffer h(0.0, 0.5, 1, 0, Interpolation::Cubic);
  auto f = [](double t) { return 1.0 - 2.0 * t + 0.5 * t * t - 0.25 * t * t * t; };
  for (int k = 0; k < 8; ++k) h.push(Vec::Constant(1, f(0.5 * k)));
  for (double t : {0.1, 0.75, 1.3, 2.2, 3.4}) CHECK(h.sample(t)[0].real() == doctest::Approx(f(t)).epsilon(1e-12));
}

TEST_CASE("bounded history evicts old samples") {
  HistoryBuffer h(0.0, 1.0, 1, 4);
  for (int k = 0; k < 10; ++k) h.push(Vec::Constant(1, k));
  CHECK(h.sample(9.0)[0].real() == 9.0);
  CHECK(h.sample(6.5)[0].real() == doctest::Approx(6.5));
  CHECK_THROWS(h.at_index(2));
}

TEST_CASE("method of steps on the first two intervals") {
  IntegrationOptions opt;
  opt.prehistory = Prehistory::HoldInitial;
  const auto traj = integrate(unit_lag_system(), Vec::Ones(1), 2.0, 0.01, opt);
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const double t = traj.t[i];
    const double exact = t <= 1.0 ? 1.0 - t : 1.0 - t + (t - 1.0) * (t - 1.0) / 2.0;
    CHECK(traj.x[i][0].real() == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("halving dt reduces the oracle error at least eightfold (cubic history)") {
  const double e1 = oracle_error(0.02, Interpolation::Cubic);
  const double e2 = oracle_error(0.01, Interpolation::Cubic);
  MESSAGE("cubic errors " << e1 << " -> " << e2 << " ratio " << e1 / e2);
  CHECK(e1 / e2 >= 8.0);
  CHECK(e2 < 1e-7);
}

TEST_CASE("linear history converges at second order") {
  const double e1 = oracle_error(0.02, Interpolation::Linear);
  const double e2 = oracle_error(0.01, Interpolation::Linear);
  MESSAGE("linear errors " << e1 << " -> " << e2 << " ratio " << e1 / e2);
  CHECK(e1 / e2 > 3.5);
}

TEST_CASE("local exponential decay reduces to RK4") {
  DelayedSystem sys;
  sys.dim = 1;
  sys.delays = {0.0};
  sys.rhs = [](double, const Vec& x, const std::vector<const Vec*>& d, Vec& dx) { dx[0] = -0.5 * (*d[0])[0]; };
  const auto traj = integrate(sys, Vec::Constant(1, cplx(0.6, 0.8)), 5.0, 0.01);
  for (std::size_t i = 0; i < traj.t.size(); ++i)
    CHECK(std::abs(traj.x[i][0] - cplx(0.6, 0.8) * std::exp(-0.5 * traj.t[i])) < 1e-10);
}

TEST_CASE("zero weighted delay leaves the local dynamics") {
  DelayedSystem sys;
  sys.dim = 1;
  sys.delays = {0.0, 0.3};
  sys.rhs = [](double, const Vec& x, const std::vector<const Vec*>& d, Vec& dx) {
    dx[0] = -0.5 * x[0];
    if (d[1]) dx[0] += 0.0 * (*d[1])[0];
  };
  const auto traj = integrate(sys, Vec::Ones(1), 2.0, 0.05);
  CHECK(std::abs(traj.x.back()[0] - std::exp(-1.0)) < 1e-7);
}

TEST_CASE("integration is bit-for-bit reproducible") {
  const auto a = integrate(unit_lag_system(), Vec::Ones(1), 3.0, 0.01, {Interpolation::Cubic, Prehistory::HoldInitial});
  const auto b = integrate(unit_lag_system(), Vec::Ones(1), 3.0, 0.01, {Interpolation::Cubic, Prehistory::HoldInitial});
  REQUIRE(a.x.size() == b.x.size());
  for (std::size_t i = 0; i < a.x.size(); ++i) CHECK(a.x[i][0] == b.x[i][0]);
}

TEST_CASE("closed heaviside with zero pre-history") {
  // dx/dt = y(t-1), y' = 0: x(t) = (t-1) Theta(t-1).
  DelayedSystem sys;
  sys.dim = 2;
  sys.delays = {1.0};
  sys.rhs = [](double, const Vec&, const std::vector<const Vec*>& d, Vec& dx) {
    dx[0] = d[0] ? (*d[0])[1] : cplx(0.0);
  };
  Vec x0(2);
  x0 << 0.0, 1.0;
  const auto traj = integrate(sys, x0, 2.0, 0.1);
  for (std::size_t i = 0; i < traj.t.size(); ++i)
    CHECK(traj.x[i][0].real() == doctest::Approx(std::max(0.0, traj.t[i] - 1.0)).epsilon(1e-12));
}

TEST_CASE("integrate error paths") {
  CHECK_THROWS(integrate(unit_lag_system(), Vec::Ones(1), 1.0, 0.3));
  CHECK_THROWS(integrate(unit_lag_system(), Vec::Ones(2), 1.0, 0.1));
  DelayedSystem blow;
  blow.dim = 1;
  blow.delays = {};
  blow.rhs = [](double, const Vec& x, const std::vector<const Vec*>&, Vec& dx) {
    dx[0] = x[0] * std::numeric_limits<double>::infinity();
  };
  CHECK_THROWS_AS(integrate(blow, Vec::Ones(1), 1.0, 0.1), std::runtime_error);
}

TEST_CASE("trajectory interpolation and stride") {
  DelayedSystem sys;
  sys.dim = 1;
  sys.delays = {};
  sys.rhs = [](double, const Vec&, const std::vector<const Vec*>&, Vec& dx) { dx[0] = 1.0; };
  IntegrationOptions opt;
  opt.stride = 5;
  const auto traj = integrate(sys, Vec::Zero(1), 1.0, 0.01, opt);
  CHECK(traj.t.size() == 21);
  CHECK(traj.at(0.333)[0].real() == doctest::Approx(0.333));
  CHECK(parse_interpolation("cubic") == Interpolation::Cubic);
}
