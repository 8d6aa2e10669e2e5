#pragma once

// Wigner-Weisskopf benchmark on a finite waveguide with a truncated set of
// standing-wave modes, in the one- and two-excitation sectors, written in
// the frame rotating at the emitter frequency Delta.
//
// Chain: sin(k x) modes on [0, L], emitters centred with spacing v tau12,
//   V_nk = sqrt(gamma_n v / L) sin(k x_n).
// Link: cos(k x) modes on [0, L = v tau12], emitters at both ends,
//   V_nk = sqrt(gamma_n v / (2L)) cos(k x_n).
// Both give the golden-rule rate gamma_n. Mode numbers are k = q pi / L with
// K consecutive integers q centred on the emitter resonance.

#include <functional>
#include <vector>

#include "wgqed/bosonic.hpp"
#include "wgqed/krylov.hpp"

namespace wgqed {

enum class ModeFunction { Sine, Cosine };

struct ModeSet {
  int K = 0;
  double L = 0.0;
  double vg = 1.0;
  double delta = 0.0;
  ModeFunction shape = ModeFunction::Sine;
  int q_first = 1;

  double k(int i) const;
  double omega(int i) const { return vg * k(i); }
  double spacing() const;
};

struct WWParams {
  int K = 510;
  /// Total mode window in units of gamma (chain only).
  double bandwidth = 40.0;
  double delta = 40.0;
  double vg = 1.0;
};

/// Chain modes: L = K pi v / bandwidth.
ModeSet chain_modes(int K, double bandwidth, double delta, double vg = 1.0);
/// Modes with a fixed length L (the link).
ModeSet fixed_length_modes(int K, double L, double delta, ModeFunction shape, double vg = 1.0);

struct WWModel {
  ModeSet modes;
  std::vector<double> x;
  std::vector<double> lamb_shift;
  Eigen::MatrixXd V;  ///< M x K

  int emitters() const { return static_cast<int>(x.size()); }
  /// Earliest time at which an end reflection returns to any emitter.
  double recurrence_time() const;
};

/// Geometry from an array config. For the chain, Delta * tau12 must equal
/// phi0 modulo 2 pi so the mode expansion reproduces the configured phase.
WWModel build_ww_model(const ArrayConfig& cfg, const WWParams& p = {});
/// A single emitter of rate gamma at x on the given modes.
WWModel single_emitter_model(const ModeSet& modes, double x, double gamma);

/// Sector-2 index maps: c_{jl} (j<l), then psi_{kr} (k<=r, the k=r state is
/// (a_k^dagger)^2 |vac>/sqrt2), then chi_{jk} = sigma_j^+ a_k^+.
struct TwoExcitationBasis {
  int M = 0, K = 0;
  std::int64_t pairs() const { return static_cast<std::int64_t>(M) * (M - 1) / 2; }
  std::int64_t photons() const { return static_cast<std::int64_t>(K) * (K + 1) / 2; }
  std::int64_t mixed() const { return static_cast<std::int64_t>(K) * M; }
  std::int64_t size() const { return pairs() + photons() + mixed(); }
  std::int64_t emitter_pair(int j, int l) const;
  std::int64_t photon_pair(int k, int r) const;
  std::int64_t emitter_photon(int j, int k) const { return pairs() + photons() + static_cast<std::int64_t>(j) * K + k; }
};

std::int64_t sector_dimension(int M, int K, int sector);

CsrMatrix build_ww_hamiltonian(const WWModel& model, int sector);

/// Fock initial state with one or two excited emitters (e.g. "001100").
Vec ww_initial_state(const WWModel& model, std::string_view fock, int& sector);
/// Sector-1 state from emitter amplitudes.
Vec ww_sector1_state(const WWModel& model, const Eigen::VectorXcd& c0);

/// Emitter populations of a sector state.
Eigen::VectorXd ww_populations(const WWModel& model, const Vec& psi, int sector);

struct WWTrajectory {
  std::vector<double> t;
  Eigen::MatrixXd populations;  ///< rows = times
  double max_norm_drift = 0.0;
  KrylovStats stats;
};

using WWObserver = std::function<void(std::size_t i, double t, const Vec& psi)>;

/// Evolves on a uniform grid t_i = i h, i = 0..steps.
WWTrajectory evolve_ww(const CsrMatrix& H, const WWModel& model, int sector, const Vec& psi0, double h,
                       std::size_t steps, const KrylovOptions& kopt = {}, const WWObserver& observer = {});

struct GammaFit {
  double gamma = 0.0;
  double residual = 0.0;  ///< max |P - exp(-gamma t)| inside the window
  double window = 0.0;
};

/// Least-squares fit of log P(t) = -gamma t over 0 < t <= window.
GammaFit calibrate_gamma(const std::vector<double>& t, const Eigen::VectorXd& p, double window,
                         double recurrence_time);

/// One-excitation amplitudes from the linear delay equations,
///   dc_l/dt = -sum_n G_nl c_n(t - tau_nl) Theta;  columns of the result are emitters.
struct AmplitudeTrajectory {
  std::vector<double> t;
  Eigen::MatrixXcd c;  ///< rows = times
};

AmplitudeTrajectory single_excitation_dde(const ArrayConfig& cfg, const Eigen::VectorXcd& c0, double t_end,
                                          double dt, const SolverOptions& opt = {});

}  // namespace wgqed
