#include "wgqed/markovian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace wgqed {

DissipatorMatrices dissipator_matrices(const ArrayConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_emitters;
  DissipatorMatrices m{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      const double amp = std::sqrt(cfg.gamma[j] * cfg.gamma[l]);
      const double ph = std::remainder(cfg.phi0 * std::abs(j - l), 2.0 * M_PI);
      m.gamma(j, l) = amp * std::cos(ph);
      m.delta(j, l) = j == l ? cfg.lamb_shift[j] : amp * std::sin(ph) / 2.0;
    }
  return m;
}

Lindbladian::Lindbladian(int n, const DissipatorMatrices& m) : n_(n), d_(Eigen::Index{1} << n) {
  if (m.gamma.rows() != n || m.delta.rows() != n) throw std::invalid_argument("Lindbladian: matrix size mismatch");
  std::vector<SpMat> sig;
  for (int l = 1; l <= n; ++l) sig.push_back(lowering_operator(l, n).data);

  // Gamma is real symmetric; its eigenvectors give collective jump operators.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.gamma);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  SpMat a(d_, d_);
  for (int k = 0; k < n; ++k) {
    const double lam = es.eigenvalues()[k];
    if (lam < -1e-10 * scale) throw std::invalid_argument("Lindbladian: Gamma is not positive semidefinite");
    if (lam <= 1e-13 * scale) continue;
    SpMat c(d_, d_);
    for (int l = 0; l < n; ++l) c += es.eigenvectors()(l, k) * sig[l];
    c.prune(cplx(0.0, 0.0));
    rates_.push_back(lam);
    const SpMat cd = c.adjoint();
    a += lam * (cd * c);
    jumps_.push_back(std::move(c));
  }
  SpMat b(d_, d_);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      if (m.delta(j, l) != 0.0) b += m.delta(j, l) * (SpMat(sig[l].adjoint()) * sig[j]);
  k_ = -0.5 * a - cplx(0.0, 1.0) * b;
  k_.prune(cplx(0.0, 0.0));
}

Mat Lindbladian::apply(const Mat& rho) const {
  if (rho.rows() != d_ || rho.cols() != d_) throw std::invalid_argument("Lindbladian::apply: dimension mismatch");
  Mat out = k_ * rho;
  out += (k_ * rho.adjoint()).adjoint();
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    const Mat cr = jumps_[k] * rho;
    out += rates_[k] * (jumps_[k] * cr.adjoint()).adjoint();
  }
  return out;
}

Mat lindblad_step(const Mat& rho, const DissipatorMatrices& m) {
  const auto n = static_cast<int>(m.gamma.rows());
  return Lindbladian(n, m).apply(rho);
}

namespace {

double min_eig(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

DensityTrajectory solve_master_equation(const ArrayConfig& cfg, const Mat& rho0, double t_end, double dt,
                                        const MarkovOptions& opt) {
  const int n = cfg.n_emitters;
  const Eigen::Index d = Eigen::Index{1} << n;
  if (rho0.rows() != d || rho0.cols() != d) throw std::invalid_argument("solve_master_equation: rho0 dimension mismatch");
  const Lindbladian lind(n, dissipator_matrices(cfg));

  DelayedSystem sys;
  sys.dim = d * d;
  sys.delays = {};
  sys.rhs = [&lind, d](double, const Vec& x, const std::vector<const Vec*>&, Vec& dx) {
    Eigen::Map<Mat>(dx.data(), d, d) = lind.apply(Eigen::Map<const Mat>(x.data(), d, d));
  };

  DensityTrajectory out;
  out.min_eigenvalue = min_eig(rho0);
  const std::size_t stride = opt.stride == 0 ? 1 : opt.stride;
  const auto observe = [&](std::size_t step, double t, const Vec& x) {
    if (step % stride != 0) return;
    Mat rho = Eigen::Map<const Mat>(x.data(), d, d);
    out.max_trace_error = std::max(out.max_trace_error, std::abs(rho.trace() - 1.0));
    out.max_hermiticity_error = std::max(out.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    if (opt.monitor_positivity) {
      const double e = min_eig(0.5 * (rho + rho.adjoint()));
      out.min_eigenvalue = std::min(out.min_eigenvalue, e);
      if (e < opt.positivity_floor)
        throw std::runtime_error("master equation lost positivity at t = " + std::to_string(t) +
                                 " (min eigenvalue " + std::to_string(e) + ")");
    }
    out.t.push_back(t);
    out.rho.push_back(std::move(rho));
  };
  IntegrationOptions io;
  io.stride = 0;
  const Vec x0 = Eigen::Map<const Vec>(rho0.data(), d * d);
  integrate(sys, x0, t_end, dt, io, observe);
  return out;
}

HeisenbergCheck heisenberg_coherences(const DensityTrajectory& traj, const ArrayConfig& cfg) {
  const int n = cfg.n_emitters;
  const std::size_t T = traj.rho.size();
  if (T < 5) throw std::invalid_argument("heisenberg_coherences: need at least five samples");
  const auto g = green_tensor(cfg).g;
  std::vector<Mat> sig, z;
  for (int l = 1; l <= n; ++l) {
    sig.push_back(lowering_operator(l, n).dense());
    z.push_back(z_from_lowering(sig.back()));
  }
  HeisenbergCheck out;
  out.t = traj.t;
  out.coherences.resize(static_cast<Eigen::Index>(T), n);
  Eigen::MatrixXcd rhs(static_cast<Eigen::Index>(T), n);
  for (std::size_t i = 0; i < T; ++i) {
    const Mat& rho = traj.rho[i];
    for (int a = 0; a < n; ++a) {
      out.coherences(static_cast<Eigen::Index>(i), a) = (sig[a] * rho).trace();
      cplx acc = 0.0;
      for (int l = 0; l < n; ++l) acc += g(a, l) * (z[a] * sig[l] * rho).trace();
      rhs(static_cast<Eigen::Index>(i), a) = acc;
    }
  }
  const double h = traj.t[1] - traj.t[0];
  for (std::size_t i = 2; i + 2 < T; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (int a = 0; a < n; ++a) {
      const cplx der = (out.coherences(r - 2, a) - 8.0 * out.coherences(r - 1, a) + 8.0 * out.coherences(r + 1, a) -
                        out.coherences(r + 2, a)) /
                       (12.0 * h);
      out.max_residual = std::max(out.max_residual, std::abs(der - rhs(r, a)));
    }
  }
  return out;
}

}  // namespace wgqed
