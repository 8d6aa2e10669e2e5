#include "wgqed/ww.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wgqed {

double ModeSet::k(int i) const { return (q_first + i) * M_PI / L; }
double ModeSet::spacing() const { return M_PI * vg / L; }

namespace {

int centre_offset(int K, double delta, double L, double vg) {
  const int qc = static_cast<int>(std::lround(delta * L / (M_PI * vg)));
  const int first = qc - K / 2;
  if (first < 1) throw std::invalid_argument("mode window reaches below zero frequency");
  return first;
}

}  // namespace

ModeSet chain_modes(int K, double bandwidth, double delta, double vg) {
  if (K < 1) throw std::invalid_argument("chain_modes: K must be >= 1");
  if (!(bandwidth > 0.0) || !(vg > 0.0)) throw std::invalid_argument("chain_modes: bandwidth and vg must be > 0");
  ModeSet m;
  m.K = K;
  m.vg = vg;
  m.delta = delta;
  m.L = K * M_PI * vg / bandwidth;
  m.shape = ModeFunction::Sine;
  m.q_first = centre_offset(K, delta, m.L, vg);
  return m;
}

ModeSet fixed_length_modes(int K, double L, double delta, ModeFunction shape, double vg) {
  if (K < 1) throw std::invalid_argument("fixed_length_modes: K must be >= 1");
  if (!(L > 0.0) || !(vg > 0.0)) throw std::invalid_argument("fixed_length_modes: L and vg must be > 0");
  ModeSet m;
  m.K = K;
  m.vg = vg;
  m.delta = delta;
  m.L = L;
  m.shape = shape;
  m.q_first = centre_offset(K, delta, L, vg);
  return m;
}

double WWModel::recurrence_time() const {
  double t = std::numeric_limits<double>::infinity();
  for (double xi : x) {
    const double edge = std::min(xi, modes.L - xi);
    // An emitter sitting on a Neumann end of a cosine waveguide sees its
    // image immediately; its first return is then a full round trip.
    const double d = modes.shape == ModeFunction::Cosine && edge < 1e-12 ? modes.L : edge;
    t = std::min(t, 2.0 * d / modes.vg);
  }
  return t;
}

namespace {

Eigen::MatrixXd couplings(const ModeSet& modes, const std::vector<double>& x, const std::vector<double>& gamma) {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(x.size()), modes.K);
  const double norm = modes.shape == ModeFunction::Sine ? 1.0 : 0.5;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double amp = std::sqrt(norm * gamma[n] * modes.vg / modes.L);
    for (int i = 0; i < modes.K; ++i) {
      const double arg = modes.k(i) * x[n];
      const double f = modes.shape == ModeFunction::Sine ? std::sin(arg) : std::cos(arg);
      v(static_cast<Eigen::Index>(n), i) = amp * f;
    }
  }
  return v;
}

}  // namespace

WWModel build_ww_model(const ArrayConfig& cfg, const WWParams& p) {
  cfg.validate();
  WWModel m;
  const int n = cfg.n_emitters;
  const double tau = cfg.tau12();
  m.lamb_shift = cfg.lamb_shift;
  if (cfg.topology == Topology::TwoNodeLink) {
    if (!(tau > 0.0)) throw std::invalid_argument("WW link needs gamma_tau12 > 0");
    m.modes = fixed_length_modes(p.K, p.vg * tau, p.delta, ModeFunction::Cosine, p.vg);
    m.x = {0.0, m.modes.L};
  } else {
    m.modes = chain_modes(p.K, p.bandwidth, p.delta, p.vg);
    const double d = p.vg * tau;
    if ((n - 1) * d >= m.modes.L) throw std::invalid_argument("WW chain does not fit in the waveguide");
    for (int i = 0; i < n; ++i) m.x.push_back(m.modes.L / 2.0 + (i - (n - 1) / 2.0) * d);
  }
  if (n > 1) {
    const double mismatch = std::remainder(p.delta * tau - cfg.phi0, 2.0 * M_PI);
    if (std::abs(mismatch) > 1e-6)
      throw std::invalid_argument("WW geometry: Delta * tau12 = " + std::to_string(p.delta * tau) +
                                  " does not match phi0 = " + std::to_string(cfg.phi0) + " modulo 2 pi");
  }
  m.V = couplings(m.modes, m.x, cfg.gamma);
  if (cfg.topology == Topology::TwoNodeLink) {
    // cos(q pi) = (-1)^q at the far end.
    for (int i = 0; i < m.modes.K; ++i) m.V(1, i) = std::abs(m.V(1, i)) * (((m.modes.q_first + i) % 2) ? -1.0 : 1.0);
  }
  return m;
}

WWModel single_emitter_model(const ModeSet& modes, double x, double gamma) {
  WWModel m;
  m.modes = modes;
  m.x = {x};
  m.lamb_shift = {0.0};
  m.V = couplings(modes, m.x, {gamma});
  return m;
}

std::int64_t TwoExcitationBasis::emitter_pair(int j, int l) const {
  if (j > l) std::swap(j, l);
  if (j == l) throw std::invalid_argument("emitter_pair: indices must differ");
  // Row-major upper triangle without diagonal.
  return static_cast<std::int64_t>(j) * (2 * M - j - 1) / 2 + (l - j - 1);
}

std::int64_t TwoExcitationBasis::photon_pair(int k, int r) const {
  if (k > r) std::swap(k, r);
  return pairs() + static_cast<std::int64_t>(k) * (2 * K - k + 1) / 2 + (r - k);
}

std::int64_t sector_dimension(int M, int K, int sector) {
  if (sector == 1) return static_cast<std::int64_t>(M) + K;
  if (sector == 2) return TwoExcitationBasis{M, K}.size();
  throw std::invalid_argument("sector must be 1 or 2");
}

CsrMatrix build_ww_hamiltonian(const WWModel& model, int sector) {
  const int M = model.emitters();
  const int K = model.modes.K;
  const double delta = model.modes.delta;
  std::vector<Eigen::Triplet<cplx>> trip;
  auto add = [&](std::int64_t a, std::int64_t b, double v) {
    if (v == 0.0) return;
    trip.emplace_back(a, b, cplx(v, 0.0));
    if (a != b) trip.emplace_back(b, a, cplx(v, 0.0));
  };
  if (sector == 1) {
    trip.reserve(static_cast<std::size_t>(2 * M * K + M + K));
    for (int j = 0; j < M; ++j) add(j, j, model.lamb_shift[j]);
    for (int i = 0; i < K; ++i) add(M + i, M + i, model.modes.omega(i) - delta);
    for (int j = 0; j < M; ++j)
      for (int i = 0; i < K; ++i) add(j, M + i, model.V(j, i));
    return CsrMatrix::from_triplets(M + K, trip);
  }
  if (sector != 2) throw std::invalid_argument("build_ww_hamiltonian: sector must be 1 or 2");
  const TwoExcitationBasis b{M, K};
  trip.reserve(static_cast<std::size_t>(2 * b.mixed() * (K + M) + b.size()));
  for (int j = 0; j < M; ++j)
    for (int l = j + 1; l < M; ++l) add(b.emitter_pair(j, l), b.emitter_pair(j, l), model.lamb_shift[j] + model.lamb_shift[l]);
  for (int k = 0; k < K; ++k)
    for (int r = k; r < K; ++r)
      add(b.photon_pair(k, r), b.photon_pair(k, r), model.modes.omega(k) + model.modes.omega(r) - 2.0 * delta);
  const double sqrt2 = std::sqrt(2.0);
  for (int a = 0; a < M; ++a)
    for (int k = 0; k < K; ++k) {
      const std::int64_t chi = b.emitter_photon(a, k);
      add(chi, chi, model.modes.omega(k) - delta + model.lamb_shift[a]);
      for (int c = 0; c < M; ++c)
        if (c != a) add(chi, b.emitter_pair(a, c), model.V(c, k));
      for (int r = 0; r < K; ++r) add(chi, b.photon_pair(k, r), model.V(a, r) * (r == k ? sqrt2 : 1.0));
    }
  return CsrMatrix::from_triplets(b.size(), trip);
}

Vec ww_initial_state(const WWModel& model, std::string_view fock, int& sector) {
  const auto sym = parse_site_symbols(fock);
  const int M = model.emitters();
  if (static_cast<int>(sym.size()) != M) throw std::invalid_argument("WW initial state: wrong number of sites");
  std::vector<int> up;
  for (int i = 0; i < M; ++i) {
    if (sym[i] == '1')
      up.push_back(i);
    else if (sym[i] != '0')
      throw std::invalid_argument("WW initial state must be a Fock state of 0/1 symbols");
  }
  if (up.empty() || up.size() > 2)
    throw std::invalid_argument("WW initial state needs one or two excitations, got " + std::to_string(up.size()));
  sector = static_cast<int>(up.size());
  Vec psi = Vec::Zero(sector_dimension(M, model.modes.K, sector));
  if (sector == 1)
    psi[up[0]] = 1.0;
  else
    psi[TwoExcitationBasis{M, model.modes.K}.emitter_pair(up[0], up[1])] = 1.0;
  return psi;
}

Vec ww_sector1_state(const WWModel& model, const Eigen::VectorXcd& c0) {
  if (c0.size() != model.emitters()) throw std::invalid_argument("ww_sector1_state: wrong amplitude count");
  Vec psi = Vec::Zero(model.emitters() + model.modes.K);
  psi.head(model.emitters()) = c0;
  return psi;
}

Eigen::VectorXd ww_populations(const WWModel& model, const Vec& psi, int sector) {
  const int M = model.emitters();
  const int K = model.modes.K;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(M);
  if (sector == 1) {
    for (int j = 0; j < M; ++j) p[j] = std::norm(psi[j]);
    return p;
  }
  const TwoExcitationBasis b{M, K};
  for (int j = 0; j < M; ++j) {
    for (int l = 0; l < M; ++l)
      if (l != j) p[j] += std::norm(psi[b.emitter_pair(j, l)]);
    for (int k = 0; k < K; ++k) p[j] += std::norm(psi[b.emitter_photon(j, k)]);
  }
  return p;
}

WWTrajectory evolve_ww(const CsrMatrix& H, const WWModel& model, int sector, const Vec& psi0, double h,
                       std::size_t steps, const KrylovOptions& kopt, const WWObserver& observer) {
  if (psi0.size() != H.rows) throw std::invalid_argument("evolve_ww: state dimension mismatch");
  const double n0 = psi0.norm();
  if (std::abs(n0 - 1.0) > 1e-10) throw std::invalid_argument("evolve_ww: initial state not normalized");
  WWTrajectory out;
  out.populations.resize(static_cast<Eigen::Index>(steps + 1), model.emitters());
  LanczosPropagator prop(H, kopt);
  Vec psi = psi0;
  for (std::size_t i = 0; i <= steps; ++i) {
    if (i > 0) prop.step(psi, h);
    const double t = static_cast<double>(i) * h;
    out.t.push_back(t);
    out.populations.row(static_cast<Eigen::Index>(i)) = ww_populations(model, psi, sector).transpose();
    out.max_norm_drift = std::max(out.max_norm_drift, std::abs(psi.norm() - 1.0));
    if (observer) observer(i, t, psi);
  }
  out.stats = prop.stats();
  return out;
}

GammaFit calibrate_gamma(const std::vector<double>& t, const Eigen::VectorXd& p, double window,
                         double recurrence_time) {
  if (static_cast<Eigen::Index>(t.size()) != p.size()) throw std::invalid_argument("calibrate_gamma: size mismatch");
  if (window > recurrence_time)
    throw std::invalid_argument("calibrate_gamma: fit window " + std::to_string(window) +
                                " extends past the photon return time " + std::to_string(recurrence_time));
  double stt = 0.0, stl = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] <= 0.0 || t[i] > window * (1.0 + 1e-12)) continue;
    if (!(p[static_cast<Eigen::Index>(i)] > 0.0)) throw std::invalid_argument("calibrate_gamma: non-positive population");
    stt += t[i] * t[i];
    stl += t[i] * std::log(p[static_cast<Eigen::Index>(i)]);
  }
  if (stt == 0.0) throw std::invalid_argument("calibrate_gamma: no samples in the fit window");
  GammaFit fit;
  fit.gamma = -stl / stt;
  fit.window = window;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > window * (1.0 + 1e-12)) continue;
    fit.residual = std::max(fit.residual, std::abs(p[static_cast<Eigen::Index>(i)] - std::exp(-fit.gamma * t[i])));
  }
  return fit;
}

AmplitudeTrajectory single_excitation_dde(const ArrayConfig& cfg, const Eigen::VectorXcd& c0, double t_end,
                                          double dt, const SolverOptions& opt) {
  if (c0.size() != cfg.n_emitters) throw std::invalid_argument("single_excitation_dde: wrong amplitude count");
  if (c0.squaredNorm() > 1.0 + 1e-12) throw std::invalid_argument("single_excitation_dde: norm exceeds one");
  const auto kernel = build_kernel(cfg, t_end, opt.link);
  const auto sys = linear_emitter_system(kernel, 1);
  IntegrationOptions io;
  io.interpolation = opt.interpolation;
  io.stride = opt.stride;
  const auto traj = integrate(sys, c0, t_end, dt, io);
  AmplitudeTrajectory out;
  out.t = traj.t;
  out.c.resize(static_cast<Eigen::Index>(traj.x.size()), cfg.n_emitters);
  for (std::size_t i = 0; i < traj.x.size(); ++i) out.c.row(static_cast<Eigen::Index>(i)) = traj.x[i].transpose();
  return out;
}

}  // namespace wgqed
