#pragma once

// Linear (bosonic) emitters: the propagator J_lm(t) = [b_l(t), b_m^dagger(0)]
// from the delay equations, and the closed-form piecewise-polynomial
// solution for uniform chains.

#include <cstddef>
#include <vector>

#include "wgqed/dde.hpp"
#include "wgqed/kernel.hpp"
#include "wgqed/trajectory.hpp"

namespace wgqed {

struct PropagatorTrajectory {
  std::vector<double> t;
  std::vector<Eigen::MatrixXcd> J;
};

struct SolverOptions {
  Interpolation interpolation = Interpolation::Linear;
  std::size_t stride = 1;
  LinkConvention link = LinkConvention::WavePropagation;
};

/// dX_target/dt = -sum_terms weight * X_source(t - lag) for an n x cols block X.
DelayedSystem linear_emitter_system(const DelayKernel& kernel, Eigen::Index cols);

PropagatorTrajectory solve_propagator_numeric(const ArrayConfig& cfg, double t_end, double dt,
                                              const SolverOptions& opt = {});

/// Piecewise polynomials P_{l,j}(s) per source m: for the window t >= j tau12,
///   J_lm(t) = sum_j e^{-gamma s_j/2} e^{i j phi0} P^{(m)}_{l,j}(s_j),  s_j = t - j tau12.
/// coeffs[m][j] is an N x (j+1) matrix of ascending-power coefficients.
struct AnalyticSolution {
  int n = 0;
  double gamma = 1.0;
  double tau12 = 0.0;
  double phi0 = 0.0;
  double t_end = 0.0;
  std::vector<std::vector<Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>>> coeffs;

  int windows() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs.front().size()); }
  /// Coefficient of s^k in the j-th window, emitter l, source m.
  cplx coefficient(int l, int m, int j, int k) const;
};

inline constexpr int kDefaultMaxDegree = 512;

AnalyticSolution solve_propagator_analytic(const ArrayConfig& cfg, double t_end,
                                           int max_degree = kDefaultMaxDegree);

Eigen::MatrixXcd eval_analytic(const AnalyticSolution& sol, double t);

/// P_l(t) = sum_mn conj(J_lm) J_ln <s^dagger_m s_n>(0); rows are times.
Eigen::MatrixXd populations_bosonic(const PropagatorTrajectory& traj, const Eigen::MatrixXcd& moments);

/// Samples the analytic propagator on a time grid.
PropagatorTrajectory sample_analytic(const AnalyticSolution& sol, const std::vector<double>& t);

/// u_l = (J_l1, ..., J_lN)^T with metric M_ab = <s_a^dagger s_b>(0).
ProjectedTrajectory project_bosonic(const PropagatorTrajectory& traj, const Eigen::MatrixXcd& moments,
                                    Interpolation interp);

}  // namespace wgqed
