#pragma once

// Per-sample emitter vectors from which all normal-ordered two-operator
// observables follow:  <s_l^dagger(t1) s_m(t2)> = u_l(t1)^dagger M u_m(t2).
// Qubits: u_l = sigma^-_l(t)|psi0>, M = 1. Linear emitters: (u_l)_a = J_la(t),
// M = <s_a^dagger s_b>(0).

#include <vector>

#include "wgqed/dde.hpp"

namespace wgqed {

struct ProjectedTrajectory {
  int n = 0;
  std::vector<double> t;
  /// u[i].col(l) is u_l(t[i]).
  std::vector<Mat> u;
  /// Empty means identity.
  Mat metric;
  Interpolation interpolation = Interpolation::Linear;

  std::size_t size() const { return t.size(); }
  double spacing() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }

  /// Interpolated u at an arbitrary time; zero before t[0].
  Mat at(double time) const;
  /// Inner product a^dagger M b.
  cplx inner(const Eigen::Ref<const Vec>& a, const Eigen::Ref<const Vec>& b) const;
  /// P_l(t[i]).
  Eigen::MatrixXd populations() const;
};

}  // namespace wgqed
