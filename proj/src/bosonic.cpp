#include "wgqed/bosonic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wgqed {

namespace {
using lcplx = std::complex<long double>;
using LMat = Eigen::Matrix<lcplx, Eigen::Dynamic, Eigen::Dynamic>;
}  // namespace

DelayedSystem linear_emitter_system(const DelayKernel& kernel, Eigen::Index cols) {
  const Eigen::Index n = kernel.n;
  DelayedSystem sys;
  sys.dim = n * cols;
  sys.delays = kernel.delays;
  sys.rhs = [terms = kernel.terms, n, cols](double, const Vec&, const std::vector<const Vec*>& delayed, Vec& dx) {
    Eigen::Map<Mat> d(dx.data(), n, cols);
    for (const auto& term : terms) {
      const Vec* src = delayed[term.lag];
      if (!src) continue;
      Eigen::Map<const Mat> x(src->data(), n, cols);
      d.row(term.target) -= term.weight * x.row(term.source);
    }
  };
  return sys;
}

PropagatorTrajectory solve_propagator_numeric(const ArrayConfig& cfg, double t_end, double dt,
                                              const SolverOptions& opt) {
  if (cfg.emitter_kind != EmitterKind::Bosonic)
    throw std::invalid_argument("solve_propagator_numeric: config is not bosonic");
  const auto kernel = build_kernel(cfg, t_end, opt.link);
  const int n = cfg.n_emitters;
  const auto sys = linear_emitter_system(kernel, n);
  Mat id = Mat::Identity(n, n);
  const Vec x0 = Eigen::Map<Vec>(id.data(), n * n);
  IntegrationOptions io;
  io.interpolation = opt.interpolation;
  io.stride = opt.stride;
  const auto traj = integrate(sys, x0, t_end, dt, io);
  PropagatorTrajectory out;
  out.t = traj.t;
  out.J.reserve(traj.x.size());
  for (const auto& x : traj.x) out.J.emplace_back(Eigen::Map<const Mat>(x.data(), n, n));
  return out;
}

cplx AnalyticSolution::coefficient(int l, int m, int j, int k) const {
  if (m < 0 || m >= n || j < 0 || j >= windows() || k < 0 || k > j || l < 0 || l >= n)
    throw std::out_of_range("AnalyticSolution::coefficient: index out of range");
  const lcplx c = coeffs[m][j](l, k);
  return {static_cast<double>(c.real()), static_cast<double>(c.imag())};
}

AnalyticSolution solve_propagator_analytic(const ArrayConfig& cfg, double t_end, int max_degree) {
  cfg.validate();
  if (cfg.topology != Topology::InfiniteChain) throw std::invalid_argument("analytic propagator: chains only");
  if (!cfg.uniform_gamma()) throw std::invalid_argument("analytic propagator: needs uniform gamma");
  if (!cfg.zero_lamb_shift()) throw std::invalid_argument("analytic propagator: needs zero Lamb shift");
  if (!(cfg.gamma_tau12 > 0.0)) throw std::invalid_argument("analytic propagator: needs gamma_tau12 > 0");
  if (!(t_end >= 0.0)) throw std::invalid_argument("analytic propagator: t_end must be >= 0");

  AnalyticSolution sol;
  sol.n = cfg.n_emitters;
  sol.gamma = cfg.gamma.front();
  sol.tau12 = cfg.tau12();
  sol.phi0 = cfg.phi0;
  sol.t_end = t_end;
  const int jmax = static_cast<int>(std::floor(t_end / sol.tau12 + 1e-9));
  if (jmax > max_degree)
    throw std::invalid_argument("analytic propagator: t_end/tau12 = " + std::to_string(jmax) +
                                " exceeds the polynomial degree budget " + std::to_string(max_degree));
  const int n = sol.n;
  const long double half_gamma = static_cast<long double>(sol.gamma) / 2.0L;

  sol.coeffs.assign(n, {});
  for (int m = 0; m < n; ++m) {
    auto& p = sol.coeffs[m];
    p.reserve(jmax + 1);
    LMat p0 = LMat::Zero(n, 1);
    p0(m, 0) = 1.0L;
    p.push_back(std::move(p0));
    for (int j = 1; j <= jmax; ++j) {
      // Integrand: sum over n != l of P_{n, j - |l-n|}, then integrate from 0.
      LMat next = LMat::Zero(n, j + 1);
      for (int l = 0; l < n; ++l)
        for (int src = 0; src < n; ++src) {
          const int d = std::abs(l - src);
          if (d == 0 || d > j) continue;
          const LMat& prev = p[j - d];
          for (int k = 0; k < prev.cols(); ++k)
            next(l, k + 1) -= half_gamma * prev(src, k) / static_cast<long double>(k + 1);
        }
      p.push_back(std::move(next));
    }
  }
  return sol;
}

Eigen::MatrixXcd eval_analytic(const AnalyticSolution& sol, double t) {
  if (t < 0.0 || t > sol.t_end * (1.0 + 1e-12) + 1e-12)
    throw std::out_of_range("eval_analytic: t outside [0, t_end]");
  const int n = sol.n;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  const int active = std::min(sol.windows() - 1, static_cast<int>(std::floor(t / sol.tau12 + 1e-12)));
  for (int j = 0; j <= active; ++j) {
    const long double s = std::max(0.0L, static_cast<long double>(t) - j * static_cast<long double>(sol.tau12));
    const long double env = std::exp(-static_cast<long double>(sol.gamma) * s / 2.0L);
    const double ph = std::remainder(j * sol.phi0, 2.0 * M_PI);
    const lcplx rot(env * std::cos(static_cast<long double>(ph)), env * std::sin(static_cast<long double>(ph)));
    for (int m = 0; m < n; ++m) {
      const LMat& c = sol.coeffs[m][j];
      for (int l = 0; l < n; ++l) {
        lcplx acc = 0.0L;
        for (Eigen::Index k = c.cols() - 1; k >= 0; --k) acc = acc * s + c(l, k);
        acc *= rot;
        out(l, m) += cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
      }
    }
  }
  return out;
}

Eigen::MatrixXd populations_bosonic(const PropagatorTrajectory& traj, const Eigen::MatrixXcd& moments) {
  if (moments.rows() != moments.cols()) throw std::invalid_argument("populations_bosonic: moments not square");
  if ((moments - moments.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("populations_bosonic: moments not Hermitian");
  const Eigen::Index n = moments.rows();
  Eigen::MatrixXd p(static_cast<Eigen::Index>(traj.J.size()), n);
  for (std::size_t i = 0; i < traj.J.size(); ++i) {
    const auto& j = traj.J[i];
    if (j.rows() != n) throw std::invalid_argument("populations_bosonic: dimension mismatch");
    for (Eigen::Index l = 0; l < n; ++l) {
      const Eigen::VectorXcd u = j.row(l).transpose();
      p(static_cast<Eigen::Index>(i), l) = u.dot(moments * u).real();
    }
  }
  return p;
}

PropagatorTrajectory sample_analytic(const AnalyticSolution& sol, const std::vector<double>& t) {
  PropagatorTrajectory out;
  out.t = t;
  out.J.reserve(t.size());
  for (double ti : t) out.J.push_back(eval_analytic(sol, ti));
  return out;
}

ProjectedTrajectory project_bosonic(const PropagatorTrajectory& traj, const Eigen::MatrixXcd& moments,
                                    Interpolation interp) {
  if ((moments - moments.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("project_bosonic: moments not Hermitian");
  ProjectedTrajectory p;
  p.n = static_cast<int>(moments.rows());
  p.t = traj.t;
  p.metric = moments;
  p.interpolation = interp;
  p.u.reserve(traj.J.size());
  for (const auto& j : traj.J) {
    if (j.rows() != moments.rows()) throw std::invalid_argument("project_bosonic: dimension mismatch");
    p.u.push_back(j.transpose());
  }
  return p;
}

}  // namespace wgqed
