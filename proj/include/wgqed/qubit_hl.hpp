#pragma once

// Delay-differential Heisenberg-Langevin evolution of the N qubit lowering
// operators (vacuum waveguide):
//   chain: d sigma_l/dt = sigma^z_l(t) sum_n G_nl sigma_n(t - tau_nl) Theta(t - tau_nl)
//   link:  d sigma_l/dt = -(i LambShift + gamma/2) sigma_l + sigma^z_l(t) sum_m w_m sigma_src(m)(t - m tau12)
// with sigma^z_l(t) = 2 sigma_l(t)^dagger sigma_l(t) - 1 taken from the
// evolved matrices.

#include <cstddef>
#include <vector>

#include "wgqed/graded.hpp"
#include "wgqed/kernel.hpp"
#include "wgqed/trajectory.hpp"

namespace wgqed {

enum class OperatorStorage { Graded, Dense };

struct QubitHLOptions {
  Interpolation interpolation = Interpolation::Linear;
  LinkConvention link = LinkConvention::WavePropagation;
  OperatorStorage storage = OperatorStorage::Graded;
  std::size_t stride = 1;
  int max_sites = 10;
  /// Also keep the packed operator matrices at each stored sample.
  bool keep_operators = false;
};

struct QubitHLRun {
  ProjectedTrajectory projected;
  std::size_t steps = 0;
  /// Integrator state at each stored sample (graded-packed or flattened dense).
  std::vector<Vec> operators;
};

/// Packed state vector of the canonical lowering operators.
Vec initial_graded_state(const GradedLayout& layout);

/// Derivative of the packed operator state. `delayed[k]` is the packed state
/// at lag k of the kernel (nullptr when switched off).
void hl_rhs_graded(const GradedLayout& layout, const DelayKernel& kernel, const Vec& x,
                   const std::vector<const Vec*>& delayed, Vec& dx);

/// Full-matrix reference of the same right-hand side; sigmas are 2^N x 2^N.
std::vector<Mat> hl_rhs_dense(const DelayKernel& kernel, const std::vector<Mat>& sigma,
                              const std::vector<std::vector<Mat>>& delayed_sigma,
                              const std::vector<bool>& active);

DelayedSystem qubit_hl_system(const GradedLayout& layout, const DelayKernel& kernel);
DelayedSystem qubit_hl_dense_system(const DelayKernel& kernel);

QubitHLRun solve_qubit_hl(const ArrayConfig& cfg, const EmitterState& psi0, double t_end, double dt,
                          const QubitHLOptions& opt = {});

}  // namespace wgqed
