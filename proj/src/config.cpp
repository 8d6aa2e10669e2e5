#include "wgqed/config.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wgqed {

std::string_view to_string(Topology t) {
  return t == Topology::InfiniteChain ? "chain" : "link";
}

std::string_view to_string(EmitterKind k) {
  return k == EmitterKind::TwoLevel ? "qubit" : "boson";
}

Topology parse_topology(std::string_view s) {
  if (s == "chain" || s == "InfiniteChain" || s == "infinite_chain") return Topology::InfiniteChain;
  if (s == "link" || s == "TwoNodeLink" || s == "two_node_link") return Topology::TwoNodeLink;
  throw std::invalid_argument("unknown topology '" + std::string(s) + "'");
}

EmitterKind parse_emitter_kind(std::string_view s) {
  if (s == "qubit" || s == "TwoLevel" || s == "two_level") return EmitterKind::TwoLevel;
  if (s == "boson" || s == "Bosonic" || s == "bosonic") return EmitterKind::Bosonic;
  throw std::invalid_argument("unknown emitter_kind '" + std::string(s) + "'");
}

bool ArrayConfig::uniform_gamma() const {
  return std::all_of(gamma.begin(), gamma.end(), [&](double g) { return g == gamma.front(); });
}

bool ArrayConfig::zero_lamb_shift() const {
  return std::all_of(lamb_shift.begin(), lamb_shift.end(), [](double d) { return d == 0.0; });
}

void ArrayConfig::validate() const {
  if (n_emitters < 1) throw std::invalid_argument("n_emitters must be >= 1");
  if (static_cast<int>(gamma.size()) != n_emitters)
    throw std::invalid_argument("gamma must have one entry per emitter");
  if (static_cast<int>(lamb_shift.size()) != n_emitters)
    throw std::invalid_argument("lamb_shift must have one entry per emitter");
  for (double g : gamma)
    if (!(g > 0.0)) throw std::invalid_argument("all gamma must be > 0");
  if (!(gamma_tau12 >= 0.0)) throw std::invalid_argument("gamma_tau12 must be >= 0");
  if (!std::isfinite(phi0)) throw std::invalid_argument("phi0 must be finite");
  if (topology == Topology::TwoNodeLink && n_emitters != 2)
    throw std::invalid_argument("TwoNodeLink requires n_emitters = 2");
}

ArrayConfig build_chain_config(int n, double gamma, double phi0, double gamma_tau12) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  ArrayConfig cfg;
  cfg.n_emitters = n;
  cfg.gamma.assign(n, gamma);
  cfg.lamb_shift.assign(n, 0.0);
  cfg.phi0 = phi0;
  cfg.gamma_tau12 = gamma_tau12;
  cfg.topology = Topology::InfiniteChain;
  cfg.validate();
  return cfg;
}

ArrayConfig build_link_config(double gamma, double phi0, double gamma_tau12) {
  ArrayConfig cfg = build_chain_config(2, gamma, phi0, gamma_tau12);
  cfg.topology = Topology::TwoNodeLink;
  return cfg;
}

DelayMatrix delay_matrix(const ArrayConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_emitters;
  const double tau = cfg.tau12();
  DelayMatrix d{Eigen::MatrixXd::Zero(n, n)};
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j) {
      if (l == j) continue;
      d.tau(l, j) = cfg.topology == Topology::TwoNodeLink ? tau : std::abs(l - j) * tau;
    }
  return d;
}

CouplingMatrix green_tensor(const ArrayConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_emitters;
  CouplingMatrix c{Eigen::MatrixXcd::Zero(n, n)};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double amp = 0.5 * std::sqrt(cfg.gamma[a] * cfg.gamma[b]);
      const double hops = std::abs(a - b);
      // exp(i*2*pi*k) is computed as exactly 1 by reducing the phase first.
      const double phase = std::remainder(cfg.phi0 * hops, 2.0 * M_PI);
      c.g(a, b) = amp * cplx(std::cos(phase), std::sin(phase));
      if (a == b) c.g(a, b) += cplx(0.0, cfg.lamb_shift[a]);
    }
  return c;
}

}  // namespace wgqed
