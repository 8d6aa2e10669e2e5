#pragma once

// Zero-retardation reference: Lindblad master equation for the emitter
// density matrix,
//   d rho/dt = sum_jl Gamma_jl (sigma_l rho sigma_j^+ - 1/2 {sigma_j^+ sigma_l, rho})
//              - i [sum_jl Delta_jl sigma_l^+ sigma_j, rho],
// whose coherences obey d<sigma_n>/dt = sum_l G_nl <sigma^z_n sigma_l>.

#include <vector>

#include "wgqed/dde.hpp"

namespace wgqed {

struct DissipatorMatrices {
  Eigen::MatrixXd gamma;  ///< Gamma_jl
  Eigen::MatrixXd delta;  ///< Delta_jl (diagonal: Lamb shift)
};

DissipatorMatrices dissipator_matrices(const ArrayConfig& cfg);

/// Precomputed Lindbladian in collective form.
class Lindbladian {
 public:
  Lindbladian(int n, const DissipatorMatrices& m);

  int sites() const { return n_; }
  Eigen::Index dim() const { return d_; }

  /// d rho/dt.
  Mat apply(const Mat& rho) const;

 private:
  int n_;
  Eigen::Index d_;
  std::vector<double> rates_;
  std::vector<SpMat> jumps_;
  SpMat k_;  ///< -A/2 - iB
};

/// Stand-alone derivative (builds the Lindbladian each call).
Mat lindblad_step(const Mat& rho, const DissipatorMatrices& m);

struct DensityTrajectory {
  std::vector<double> t;
  std::vector<Mat> rho;
  double min_eigenvalue = 0.0;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
};

struct MarkovOptions {
  std::size_t stride = 1;
  /// Abort when an eigenvalue drops below this.
  double positivity_floor = -1e-8;
  /// Check eigenvalues on every stored sample (otherwise only at the end).
  bool monitor_positivity = true;
};

DensityTrajectory solve_master_equation(const ArrayConfig& cfg, const Mat& rho0, double t_end, double dt,
                                        const MarkovOptions& opt = {});

struct HeisenbergCheck {
  std::vector<double> t;
  Eigen::MatrixXcd coherences;  ///< <sigma_n>(t), rows = times
  double max_residual = 0.0;
};

/// Differentiates <sigma_n> along the trajectory (five-point stencil) and
/// compares it with sum_l G_nl <sigma^z_n sigma_l>.
HeisenbergCheck heisenberg_coherences(const DensityTrajectory& traj, const ArrayConfig& cfg);

}  // namespace wgqed
