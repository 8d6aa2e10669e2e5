#pragma once

// Observables derived from projected trajectories or density matrices:
// populations, the output current at the end of the chain, emission rates,
// superradiant-burst metrics and the rate bound.
//
// The output port sits at emitter 1, so emitter n reaches it after
// (n-1) tau12 with propagation phase e^{i phi0 (n-1)}:
//   a_out(t) = -i/2 sum_n sqrt(gamma_n) e^{i phi0 (n-1)} s_n(t - (n-1) tau12) Theta,
//   I_out = <a_out^dagger a_out>.

#include <limits>
#include <vector>

#include "wgqed/markovian.hpp"
#include "wgqed/trajectory.hpp"

namespace wgqed {

struct BurstMetrics {
  double i_dicke = std::numeric_limits<double>::quiet_NaN();
  double i_max = std::numeric_limits<double>::quiet_NaN();
  double t_max = std::numeric_limits<double>::quiet_NaN();
  bool has_burst = false;
  bool valid = false;
};

inline constexpr double kBurstEpsilon = 1e-6;
inline constexpr double kPopulationFloor = 1e-12;

struct ScenarioResult {
  int n = 0;
  std::vector<double> t;
  Eigen::MatrixXd populations;  ///< rows = times
  std::vector<double> total_population;
  std::vector<double> output_current;  ///< NaN when not defined (closed link, WW)
  std::vector<double> rate;
  std::vector<double> rate_ld;  ///< NaN once the population falls below the floor
  BurstMetrics burst;
  /// Largest imaginary residue met while forming real observables.
  double max_imag_residue = 0.0;
};

std::vector<double> output_field_series(const ProjectedTrajectory& traj, const ArrayConfig& cfg,
                                        double* max_imag = nullptr);
std::vector<double> output_field_series(const DensityTrajectory& traj, const ArrayConfig& cfg,
                                        double* max_imag = nullptr);

/// Reads the current at (N-1) tau12 and maximises over t >= (N-1) tau12.
BurstMetrics burst_metrics(const std::vector<double>& t, const std::vector<double>& current, int n, double tau12);

/// R = -dn/dt by centred differences (one-sided at the ends).
std::vector<double> emission_rate(const std::vector<double>& t, const std::vector<double>& n_total);

/// R_ld = R / n; NaN where n <= kPopulationFloor. `truncated` reports whether that happened.
std::vector<double> log_derivative_rate(const std::vector<double>& n_total, const std::vector<double>& rate,
                                        bool* truncated = nullptr);

/// gamma (N + 2 sum_n (N-n) Theta(t - n tau12)), closed Theta.
double rate_upper_bound(int n, double t, double tau12, double gamma = 1.0);

struct MaxRates {
  double r_star = 0.0;
  double r_ld_star = 0.0;
};

MaxRates max_rates_over_time(const ScenarioResult& r);

/// Populations, totals, rates and (when given) the current and burst metrics.
ScenarioResult assemble_result(const std::vector<double>& t, const Eigen::MatrixXd& populations,
                               const std::vector<double>* current, double tau12);

ScenarioResult result_from_projection(const ProjectedTrajectory& traj, const ArrayConfig& cfg, bool with_current);
ScenarioResult result_from_density(const DensityTrajectory& traj, const ArrayConfig& cfg, bool with_current);

}  // namespace wgqed
