#include "doctest.h"

#include <cmath>

#include "wgqed/bosonic.hpp"

using namespace wgqed;

namespace {

ArrayConfig boson_chain(int n, double phi0, double gt) {
  auto c = build_chain_config(n, 1.0, phi0, gt);
  c.emitter_kind = EmitterKind::Bosonic;
  return c;
}

double max_dev(const PropagatorTrajectory& num, const AnalyticSolution& sol) {
  double m = 0.0;
  for (std::size_t i = 0; i < num.t.size(); ++i)
    m = std::max(m, (num.J[i] - eval_analytic(sol, num.t[i])).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

TEST_CASE("single linear emitter decays at gamma/2 in amplitude") {
  const auto cfg = boson_chain(1, 0.0, 0.0);
  const auto traj = solve_propagator_numeric(cfg, 5.0, 0.01);
  for (std::size_t i = 0; i < traj.t.size(); ++i)
    CHECK(std::abs(traj.J[i](0, 0) - std::exp(-traj.t[i] / 2)) < 1e-10);
  const auto pop = populations_bosonic(traj, Eigen::MatrixXcd::Ones(1, 1));
  CHECK(pop(static_cast<Eigen::Index>(traj.t.size() - 1), 0) == doctest::Approx(std::exp(-5.0)).epsilon(1e-8));
}

TEST_CASE("no coupling inside the first light cone") {
  const auto cfg = boson_chain(4, 0.3, 0.5);
  const auto traj = solve_propagator_numeric(cfg, 0.49, 0.005);
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const Eigen::MatrixXcd expect = Eigen::MatrixXcd::Identity(4, 4) * std::exp(-traj.t[i] / 2);
    CHECK((traj.J[i] - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("analytic windows") {
  const double tau = 0.4, phi = 0.7;
  const auto sol = solve_propagator_analytic(boson_chain(3, phi, tau), 4 * tau);
  CHECK((eval_analytic(sol, 0.0) - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
  const auto half = eval_analytic(solve_propagator_analytic(boson_chain(2, phi, tau), tau), tau / 2);
  CHECK((half - Eigen::MatrixXcd::Identity(2, 2) * std::exp(-tau / 4)).cwiseAbs().maxCoeff() < 1e-15);

  // Second window: first-neighbour terms linear in (t - tau) with slope -gamma/2 e^{phi~}.
  const double t = 1.6 * tau;
  const cplx phit(tau / 2, phi);
  const auto j = eval_analytic(sol, t);
  const cplx expect = std::exp(-t / 2) * std::exp(phit) * (-0.5) * (t - tau);
  CHECK(std::abs(j(0, 1) - expect) < 1e-14);
  CHECK(std::abs(j(2, 1) - expect) < 1e-14);
  CHECK(std::abs(j(0, 2)) < 1e-15);
  CHECK(sol.coefficient(1, 0, 1, 1).real() == doctest::Approx(-0.5));
  CHECK(sol.coefficient(2, 0, 1, 1) == cplx(0.0));
}

TEST_CASE("analytic propagator symmetry") {
  const auto sol = solve_propagator_analytic(boson_chain(5, 50 * M_PI, 5 * M_PI / 4), 10 * 5 * M_PI / 4);
  for (double t : {1.0, 5.3, 12.0, 30.0, 39.0}) {
    const auto j = eval_analytic(sol, t);
    CHECK((j - j.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("analytic input validation") {
  auto c = boson_chain(3, 0.0, 0.2);
  c.lamb_shift[1] = 0.1;
  CHECK_THROWS(solve_propagator_analytic(c, 1.0));
  CHECK_THROWS(solve_propagator_analytic(boson_chain(3, 0.0, 0.01), 10.0, 100));
  const auto sol = solve_propagator_analytic(boson_chain(2, 0.0, 0.2), 1.0);
  CHECK_THROWS(eval_analytic(sol, 1.5));
}

TEST_CASE("numeric and analytic propagators agree at 1.5 tau") {
  const double tau = 0.3;
  const auto cfg = boson_chain(3, 0.9, tau);
  const auto sol = solve_propagator_analytic(cfg, 1.5 * tau);
  SolverOptions opt;
  opt.interpolation = Interpolation::Cubic;
  const auto num = solve_propagator_numeric(cfg, 1.5 * tau, tau / 200, opt);
  CHECK(std::abs(num.J.back()(0, 1) - eval_analytic(sol, 1.5 * tau)(0, 1)) < 1e-6);
  CHECK(max_dev(num, sol) < 1e-6);
}

TEST_CASE("numeric vs analytic in both benchmark regimes") {
  for (auto [phi, gt] : {std::pair{2 * M_PI, M_PI / 20}, std::pair{50 * M_PI, 5 * M_PI / 4}}) {
    const auto cfg = boson_chain(6, phi, gt);
    const double t_end = 10 * gt;
    SolverOptions opt;
    opt.interpolation = Interpolation::Cubic;
    opt.stride = 10;
    const auto sol = solve_propagator_analytic(cfg, t_end);
    const double dev = max_dev(solve_propagator_numeric(cfg, t_end, gt / 200, opt), sol);
    MESSAGE("gamma tau12 = " << gt << ": max |J_num - J_ana| = " << dev);
    CHECK(dev < 1e-4);
  }
}

TEST_CASE("populations from Fock moments") {
  const auto cfg = boson_chain(6, 2 * M_PI, M_PI / 20);
  const auto traj = solve_propagator_numeric(cfg, 1.0, M_PI / 20 / 50);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(6, 6);
  m(2, 2) = m(3, 3) = 1.0;
  const auto p = populations_bosonic(traj, m);
  CHECK(p.row(0).sum() == doctest::Approx(2.0));
  CHECK(p(0, 2) == doctest::Approx(1.0));
  for (std::size_t i = 0; i < traj.t.size(); i += 7)
    for (int l = 0; l < 6; ++l) {
      const double direct = std::norm(traj.J[i](l, 2)) + std::norm(traj.J[i](l, 3));
      CHECK(p(static_cast<Eigen::Index>(i), l) == doctest::Approx(direct).epsilon(1e-12));
    }
  CHECK(p.row(p.rows() - 1).sum() <= p.row(0).sum());
  Eigen::MatrixXcd bad = m;
  bad(0, 1) = 1.0;
  CHECK_THROWS(populations_bosonic(traj, bad));
}

TEST_CASE("propagator rows never gain norm") {
  const auto cfg = boson_chain(5, 50 * M_PI, 5 * M_PI / 4);
  const auto traj = solve_propagator_numeric(cfg, 30.0, 5 * M_PI / 4 / 100);
  double worst = 0.0;
  for (const auto& j : traj.J) worst = std::max(worst, j.rowwise().squaredNorm().maxCoeff());
  CHECK(worst <= 1.0 + 1e-9);
}

TEST_CASE("bound state in the continuum keeps population trapped") {
  const auto cfg = boson_chain(6, 2 * M_PI, M_PI / 20);
  const auto sol = solve_propagator_analytic(cfg, 10.0);
  const auto j = eval_analytic(sol, 10.0);
  const double p3 = std::norm(j(2, 2)) + std::norm(j(2, 3));
  MESSAGE("P_3(10/gamma) = " << p3);
  CHECK(p3 > 0.01);
}

TEST_CASE("non-bosonic config is rejected") {
  CHECK_THROWS(solve_propagator_numeric(build_chain_config(2, 1.0, 0.0, 0.1), 1.0, 0.01));
}
