#include "doctest.h"

#include <cmath>

#include "wgqed/ww.hpp"

using namespace wgqed;

namespace {

WWTrajectory run(const WWModel& m, const Vec& psi, int sector, double h, std::size_t steps) {
  return evolve_ww(build_ww_hamiltonian(m, sector), m, sector, psi, h, steps);
}

}  // namespace

TEST_CASE("sector dimensions") {
  CHECK(sector_dimension(6, 500, 2) == 15 + 125250 + 3000);
  CHECK(sector_dimension(6, 500, 1) == 506);
  TwoExcitationBasis b{3, 4};
  CHECK(b.emitter_pair(0, 1) == 0);
  CHECK(b.emitter_pair(1, 2) == 2);
  CHECK(b.photon_pair(0, 0) == 3);
  CHECK(b.photon_pair(3, 3) == 3 + 9);
  CHECK(b.emitter_photon(0, 0) == 13);
  CHECK(b.emitter_photon(2, 3) == b.size() - 1);
  CHECK_THROWS(b.emitter_pair(1, 1));
}

TEST_CASE("one-excitation Hamiltonian structure") {
  WWModel m;
  m.modes = fixed_length_modes(2, 3.0, 5.0, ModeFunction::Sine);
  m.x = {1.0, 2.0};
  m.lamb_shift = {0.1, -0.2};
  m.V = Eigen::MatrixXd(2, 2);
  m.V << 0.3, 0.4, -0.5, 0.6;
  const Eigen::MatrixXcd h = Eigen::MatrixXcd(build_ww_hamiltonian(m, 1).to_sparse());
  REQUIRE(h.rows() == 4);
  CHECK(h(0, 0).real() == doctest::Approx(0.1));
  CHECK(h(1, 1).real() == doctest::Approx(-0.2));
  CHECK(h(2, 2).real() == doctest::Approx(m.modes.omega(0) - 5.0));
  CHECK(h(3, 3).real() == doctest::Approx(m.modes.omega(1) - 5.0));
  CHECK(h(0, 1) == cplx(0.0));
  CHECK(h(2, 3) == cplx(0.0));
  CHECK(h(0, 3).real() == doctest::Approx(0.4));
  CHECK(h(1, 2).real() == doctest::Approx(-0.5));
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Hamiltonians are Hermitian") {
  const auto cfg = build_chain_config(3, 1.0, 2 * M_PI, M_PI / 20);
  WWParams p;
  p.K = 60;
  const auto m = build_ww_model(cfg, p);
  for (int s : {1, 2}) {
    const auto h = build_ww_hamiltonian(m, s);
    CHECK(h.rows == sector_dimension(3, 60, s));
    CHECK(h.hermiticity_defect() < 1e-15);
  }
  const auto link = build_ww_model(build_link_config(1.0, 0.0, 8 * M_PI), p);
  CHECK(build_ww_hamiltonian(link, 2).hermiticity_defect() < 1e-15);
  CHECK(link.recurrence_time() == doctest::Approx(2 * 8 * M_PI));
  CHECK_THROWS(build_ww_model(build_link_config(1.0, 0.0, 2.0), {}));
}

TEST_CASE("chain geometry requires a consistent phase") {
  WWParams p;
  CHECK_NOTHROW(build_ww_model(build_chain_config(4, 1.0, 50 * M_PI, 5 * M_PI / 4), p));
  CHECK_THROWS(build_ww_model(build_chain_config(4, 1.0, 1.0, 5 * M_PI / 4), p));
  const auto m = build_ww_model(build_chain_config(4, 1.0, 2 * M_PI, M_PI / 20), p);
  CHECK(m.x[1] - m.x[0] == doctest::Approx(M_PI / 20));
  CHECK(m.modes.L == doctest::Approx(510 * M_PI / 40));
  CHECK((m.x[0] + m.x[3]) / 2 == doctest::Approx(m.modes.L / 2));
}

TEST_CASE("evolution is unitary and reversible") {
  const auto cfg = build_chain_config(3, 1.0, 2 * M_PI, M_PI / 20);
  WWParams p;
  p.K = 80;
  const auto m = build_ww_model(cfg, p);
  int sector = 0;
  const Vec psi0 = ww_initial_state(m, "110", sector);
  CHECK(sector == 2);
  const auto h = build_ww_hamiltonian(m, sector);
  LanczosPropagator prop(h);
  Vec psi = psi0;
  for (int i = 0; i < 20; ++i) prop.step(psi, 0.1);
  CHECK(std::abs(psi.norm() - 1.0) < 1e-9);
  for (int i = 0; i < 20; ++i) prop.step(psi, -0.1);
  CHECK((psi - psi0).norm() < 1e-7);
}

TEST_CASE("zero Hamiltonian leaves the state untouched") {
  std::vector<Eigen::Triplet<cplx>> none;
  const auto h = CsrMatrix::from_triplets(5, none);
  LanczosPropagator prop(h);
  Vec psi(5);
  psi << 1.0, cplx(0, 1), 0.5, 0.0, -2.0;
  const Vec ref = psi;
  prop.step(psi, 3.0);
  CHECK((psi - ref).norm() < 1e-15);
}

TEST_CASE("gamma calibration") {
  std::vector<double> t;
  Eigen::VectorXd p(101);
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.05 * i);
    p(i) = std::exp(-1.3 * t.back());
  }
  const auto fit = calibrate_gamma(t, p, 5.0, 8.0);
  CHECK(std::abs(fit.gamma - 1.3) < 1e-6);
  CHECK(fit.residual < 1e-12);
  CHECK_THROWS(calibrate_gamma(t, p, 5.0, 4.0));
}

TEST_CASE("single emitter decays at the golden-rule rate") {
  const auto modes = chain_modes(510, 40.0, 40.0);
  const auto m = single_emitter_model(modes, modes.L / 2, 1.0);
  CHECK(m.recurrence_time() == doctest::Approx(modes.L));
  int sector = 0;
  const auto traj = run(m, ww_initial_state(m, "1", sector), 1, 0.05, 100);
  CHECK(traj.max_norm_drift < 1e-9);
  const auto fit = calibrate_gamma(traj.t, traj.populations.col(0), 5.0, m.recurrence_time());
  MESSAGE("gamma_fit = " << fit.gamma << ", residual = " << fit.residual);
  CHECK(std::abs(fit.gamma - 1.0) < 0.02);
  CHECK(fit.residual < 0.05);

  const auto wide = chain_modes(1020, 40.0, 40.0);
  const auto m2 = single_emitter_model(wide, wide.L / 2, 1.0);
  const auto traj2 = run(m2, ww_initial_state(m2, "1", sector), 1, 0.05, 100);
  const auto fit2 = calibrate_gamma(traj2.t, traj2.populations.col(0), 5.0, m2.recurrence_time());
  CHECK(std::abs(fit2.gamma / fit.gamma - 1.0) < 0.02);
}

TEST_CASE("uncoupled spectator stays excited in the two-excitation sector") {
  const auto modes = chain_modes(200, 40.0, 40.0);
  auto one = single_emitter_model(modes, modes.L / 2, 1.0);
  WWModel two = one;
  two.x = {one.x[0], one.x[0] + 1.0};
  two.lamb_shift = {0.0, 0.0};
  two.V = Eigen::MatrixXd::Zero(2, modes.K);
  two.V.row(0) = one.V.row(0);
  int s1 = 0, s2 = 0;
  const Vec pa = ww_initial_state(one, "1", s1);
  const Vec pb = ww_initial_state(two, "11", s2);
  const auto a = run(one, pa, s1, 0.1, 40);
  const auto b = run(two, pb, s2, 0.1, 40);
  CHECK(s2 == 2);
  CHECK((a.populations.col(0) - b.populations.col(0)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((b.populations.col(1).array() - 1.0).abs().maxCoeff() < 1e-9);
}

double sector1_deviation(const ArrayConfig& cfg, const WWParams& p, const char* fock, double t_end) {
  const double gt = cfg.gamma_tau12;
  const auto m = build_ww_model(cfg, p);
  int sector = 0;
  const Vec psi = ww_initial_state(m, fock, sector);
  const auto steps = static_cast<std::size_t>(std::lround(t_end / (gt / 10)));
  const auto traj = run(m, psi, 1, gt / 10, steps);
  Eigen::VectorXcd c0 = Eigen::VectorXcd::Zero(cfg.n_emitters);
  for (int l = 0; l < cfg.n_emitters; ++l) c0(l) = fock[l] == '1' ? 1.0 : 0.0;
  const auto dde = single_excitation_dde(cfg, c0, t_end, gt / 100, {Interpolation::Cubic, 10});
  double dev = 0.0;
  for (Eigen::Index i = 0; i < traj.populations.rows(); ++i)
    for (int l = 0; l < cfg.n_emitters; ++l)
      dev = std::max(dev, std::abs(traj.populations(i, l) - std::norm(dde.c(i, l))));
  return dev;
}

TEST_CASE("one-excitation chain agrees with the delay equations") {
  const auto cfg = build_chain_config(6, 1.0, 2 * M_PI, M_PI / 20);
  const double dev = sector1_deviation(cfg, {}, "100000", 10 * M_PI / 20);
  MESSAGE("N=6 max |P_WW - P_DDE| = " << dev);
  CHECK(dev < 0.05);
}

TEST_CASE("finite-size error shrinks with the mode count at fixed length") {
  const auto cfg = build_chain_config(3, 1.0, 2 * M_PI, M_PI / 20);
  double prev = 1.0;
  for (int k : {128, 255, 510}) {
    WWParams p;
    p.K = k;
    p.bandwidth = 40.0 * k / 510;
    const double dev = sector1_deviation(cfg, p, "010", 10 * M_PI / 20);
    MESSAGE("K=" << k << ": " << dev);
    CHECK(dev < prev);
    prev = dev;
  }
}

TEST_CASE("initial state validation") {
  const auto m = build_ww_model(build_chain_config(3, 1.0, 2 * M_PI, M_PI / 20), {});
  int s = 0;
  CHECK_THROWS(ww_initial_state(m, "000", s));
  CHECK_THROWS(ww_initial_state(m, "111", s));
  CHECK_THROWS(ww_initial_state(m, "10", s));
  CHECK_THROWS(ww_initial_state(m, "1x0", s));
}
