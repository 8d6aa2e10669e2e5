#pragma once

// Emitter-array configuration and the delay / coupling matrices derived
// from it. Internal units: gamma of emitter 1 sets the time scale and the
// group velocity is 1, so a config is fully specified by the dimensionless
// pair (phi0, gamma*tau12) plus per-emitter rates and Lamb shifts.

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace wgqed {

using cplx = std::complex<double>;

enum class Topology { InfiniteChain, TwoNodeLink };
enum class EmitterKind { TwoLevel, Bosonic };

std::string_view to_string(Topology t);
std::string_view to_string(EmitterKind k);
Topology parse_topology(std::string_view s);
EmitterKind parse_emitter_kind(std::string_view s);

struct ArrayConfig {
  int n_emitters = 1;
  std::vector<double> gamma{1.0};
  /// Optical phase k0*d per nearest-neighbour hop (one-way phase k0*L for a link).
  double phi0 = 0.0;
  /// Dimensionless delay per hop, measured in units of 1/gamma[0].
  double gamma_tau12 = 0.0;
  std::vector<double> lamb_shift{0.0};
  Topology topology = Topology::InfiniteChain;
  EmitterKind emitter_kind = EmitterKind::TwoLevel;

  /// Hop delay in time units.
  double tau12() const { return gamma_tau12 / gamma.front(); }

  bool uniform_gamma() const;
  bool zero_lamb_shift() const;

  /// Throws std::invalid_argument on any broken invariant.
  void validate() const;

  bool operator==(const ArrayConfig&) const = default;
};

ArrayConfig build_chain_config(int n, double gamma, double phi0, double gamma_tau12);
ArrayConfig build_link_config(double gamma, double phi0, double gamma_tau12);

struct DelayMatrix {
  Eigen::MatrixXd tau;
};

struct CouplingMatrix {
  Eigen::MatrixXcd g;
};

DelayMatrix delay_matrix(const ArrayConfig& cfg);

/// G_nl = sqrt(gamma_n gamma_l)/2 * exp(i phi0 |n-l|) + i LambShift_n delta_nl.
CouplingMatrix green_tensor(const ArrayConfig& cfg);

}  // namespace wgqed
