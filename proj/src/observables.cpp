#include "wgqed/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wgqed {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

cplx port_phase(const ArrayConfig& cfg, int n) {
  const double p = std::remainder(cfg.phi0 * n, 2.0 * M_PI);
  return {std::cos(p), std::sin(p)};
}

void require_chain(const ArrayConfig& cfg) {
  if (cfg.topology != Topology::InfiniteChain)
    throw std::invalid_argument("output current is defined for the open chain only");
}

}  // namespace

std::vector<double> output_field_series(const ProjectedTrajectory& traj, const ArrayConfig& cfg, double* max_imag) {
  require_chain(cfg);
  const int n = traj.n;
  const double tau = cfg.tau12();
  std::vector<double> out(traj.size());
  double imag = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.t[i];
    Vec a = Vec::Zero(traj.u.front().rows());
    for (int e = 0; e < n; ++e) {
      const double tr = t - e * tau;
      if (tr < -1e-12 * std::max(1.0, t)) continue;
      const Mat u = traj.at(std::max(tr, 0.0));
      a += std::sqrt(cfg.gamma[e]) * port_phase(cfg, e) * u.col(e);
    }
    const cplx v = 0.25 * traj.inner(a, a);
    imag = std::max(imag, std::abs(v.imag()));
    out[i] = v.real();
  }
  if (max_imag) *max_imag = imag;
  return out;
}

std::vector<double> output_field_series(const DensityTrajectory& traj, const ArrayConfig& cfg, double* max_imag) {
  require_chain(cfg);
  const int n = cfg.n_emitters;
  SpMat a(Eigen::Index{1} << n, Eigen::Index{1} << n);
  for (int e = 0; e < n; ++e) a += std::sqrt(cfg.gamma[e]) * port_phase(cfg, e) * lowering_operator(e + 1, n).data;
  const SpMat ad = a.adjoint();
  const SpMat op = 0.25 * (ad * a);
  std::vector<double> out(traj.rho.size());
  double imag = 0.0;
  for (std::size_t i = 0; i < traj.rho.size(); ++i) {
    const cplx v = (op * traj.rho[i]).trace();
    imag = std::max(imag, std::abs(v.imag()));
    out[i] = v.real();
  }
  if (max_imag) *max_imag = imag;
  return out;
}

BurstMetrics burst_metrics(const std::vector<double>& t, const std::vector<double>& current, int n, double tau12) {
  if (t.size() != current.size() || t.size() < 2) throw std::invalid_argument("burst_metrics: bad series");
  const double td = (n - 1) * tau12;
  if (t.back() < td * (1.0 - 1e-12)) throw std::invalid_argument("burst_metrics: series ends before (N-1) tau12");
  BurstMetrics b;
  const auto it = std::lower_bound(t.begin(), t.end(), td - 1e-12 * std::max(1.0, td));
  const auto k = static_cast<std::size_t>(it - t.begin());
  if (std::abs(t[k] - td) <= 1e-9 * std::max(1.0, td) || k == 0) {
    b.i_dicke = current[k];
  } else {
    const double f = (td - t[k - 1]) / (t[k] - t[k - 1]);
    b.i_dicke = (1.0 - f) * current[k - 1] + f * current[k];
  }
  b.i_max = b.i_dicke;
  b.t_max = td;
  for (std::size_t i = k; i < t.size(); ++i)
    if (current[i] > b.i_max) {
      b.i_max = current[i];
      b.t_max = t[i];
    }
  b.has_burst = b.i_max > b.i_dicke + kBurstEpsilon;
  b.valid = true;
  return b;
}

std::vector<double> emission_rate(const std::vector<double>& t, const std::vector<double>& n_total) {
  const std::size_t T = t.size();
  if (T < 3 || n_total.size() != T) throw std::invalid_argument("emission_rate: need at least three samples");
  std::vector<double> r(T);
  r[0] = -(n_total[1] - n_total[0]) / (t[1] - t[0]);
  for (std::size_t i = 1; i + 1 < T; ++i) r[i] = -(n_total[i + 1] - n_total[i - 1]) / (t[i + 1] - t[i - 1]);
  r[T - 1] = -(n_total[T - 1] - n_total[T - 2]) / (t[T - 1] - t[T - 2]);
  return r;
}

std::vector<double> log_derivative_rate(const std::vector<double>& n_total, const std::vector<double>& rate,
                                        bool* truncated) {
  if (n_total.size() != rate.size()) throw std::invalid_argument("log_derivative_rate: size mismatch");
  std::vector<double> r(rate.size(), kNaN);
  bool cut = false;
  for (std::size_t i = 0; i < rate.size(); ++i) {
    if (!(n_total[i] > kPopulationFloor)) {
      cut = true;
      break;
    }
    r[i] = rate[i] / n_total[i];
  }
  if (truncated) *truncated = cut;
  return r;
}

double rate_upper_bound(int n, double t, double tau12, double gamma) {
  double s = n;
  for (int k = 1; k <= n; ++k)
    if (t >= k * tau12) s += 2.0 * (n - k);
  return gamma * s;
}

MaxRates max_rates_over_time(const ScenarioResult& r) {
  MaxRates m;
  m.r_star = -std::numeric_limits<double>::infinity();
  m.r_ld_star = -std::numeric_limits<double>::infinity();
  for (double v : r.rate)
    if (std::isfinite(v)) m.r_star = std::max(m.r_star, v);
  for (double v : r.rate_ld)
    if (std::isfinite(v)) m.r_ld_star = std::max(m.r_ld_star, v);
  return m;
}

ScenarioResult assemble_result(const std::vector<double>& t, const Eigen::MatrixXd& populations,
                               const std::vector<double>* current, double tau12) {
  ScenarioResult r;
  r.n = static_cast<int>(populations.cols());
  r.t = t;
  r.populations = populations;
  r.total_population.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) r.total_population[i] = populations.row(static_cast<Eigen::Index>(i)).sum();
  if (t.size() >= 3) {
    r.rate = emission_rate(t, r.total_population);
    r.rate_ld = log_derivative_rate(r.total_population, r.rate);
  } else {
    r.rate.assign(t.size(), kNaN);
    r.rate_ld.assign(t.size(), kNaN);
  }
  if (current) {
    r.output_current = *current;
    if (t.size() >= 2 && t.back() >= (r.n - 1) * tau12 * (1.0 - 1e-12)) r.burst = burst_metrics(t, *current, r.n, tau12);
  } else {
    r.output_current.assign(t.size(), kNaN);
  }
  return r;
}

ScenarioResult result_from_projection(const ProjectedTrajectory& traj, const ArrayConfig& cfg, bool with_current) {
  const Eigen::MatrixXd pop = traj.populations();
  if (!with_current) return assemble_result(traj.t, pop, nullptr, cfg.tau12());
  double imag = 0.0;
  const auto cur = output_field_series(traj, cfg, &imag);
  auto r = assemble_result(traj.t, pop, &cur, cfg.tau12());
  r.max_imag_residue = imag;
  return r;
}

ScenarioResult result_from_density(const DensityTrajectory& traj, const ArrayConfig& cfg, bool with_current) {
  const int n = cfg.n_emitters;
  Eigen::MatrixXd pop(static_cast<Eigen::Index>(traj.rho.size()), n);
  for (std::size_t i = 0; i < traj.rho.size(); ++i) {
    const Eigen::VectorXcd diag = traj.rho[i].diagonal();
    for (int l = 0; l < n; ++l) {
      double p = 0.0;
      for (Eigen::Index b = 0; b < diag.size(); ++b)
        if ((b >> l) & 1) p += diag[b].real();
      pop(static_cast<Eigen::Index>(i), l) = p;
    }
  }
  if (!with_current) return assemble_result(traj.t, pop, nullptr, cfg.tau12());
  double imag = 0.0;
  const auto cur = output_field_series(traj, cfg, &imag);
  auto r = assemble_result(traj.t, pop, &cur, cfg.tau12());
  r.max_imag_residue = imag;
  return r;
}

}  // namespace wgqed
