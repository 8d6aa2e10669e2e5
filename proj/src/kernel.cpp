#include "wgqed/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wgqed {

std::string_view to_string(LinkConvention c) {
  return c == LinkConvention::WavePropagation ? "wave" : "as_printed";
}

LinkConvention parse_link_convention(std::string_view s) {
  if (s == "wave" || s == "WavePropagation") return LinkConvention::WavePropagation;
  if (s == "as_printed" || s == "AsPrinted") return LinkConvention::AsPrinted;
  throw std::invalid_argument("unknown link convention '" + std::string(s) + "'");
}

namespace {

cplx phase(double phi) {
  const double p = std::remainder(phi, 2.0 * M_PI);
  return {std::cos(p), std::sin(p)};
}

DelayKernel chain_kernel(const ArrayConfig& cfg) {
  const auto g = green_tensor(cfg).g;
  const int n = cfg.n_emitters;
  const double tau = cfg.tau12();
  DelayKernel k;
  k.n = n;
  // One lag per hop count; they collapse to a single zero lag without retardation.
  const int lags = tau > 0.0 ? n : 1;
  for (int d = 0; d < lags; ++d) k.delays.push_back(d * tau);
  for (int l = 0; l < n; ++l)
    for (int s = 0; s < n; ++s)
      k.terms.push_back({l, s, tau > 0.0 ? static_cast<std::size_t>(std::abs(l - s)) : 0, g(s, l), false});
  return k;
}

DelayKernel link_kernel(const ArrayConfig& cfg, double t_end, LinkConvention conv) {
  const double tau = cfg.tau12();
  if (!(tau > 0.0)) throw std::invalid_argument("two-node link needs gamma_tau12 > 0");
  const auto passes = static_cast<int>(std::floor(t_end / tau + 1e-9));
  DelayKernel k;
  k.n = 2;
  k.delays.push_back(0.0);
  for (int m = 1; m <= passes; ++m) k.delays.push_back(m * tau);
  for (int l = 0; l < 2; ++l) {
    k.terms.push_back({l, l, 0, cplx(cfg.gamma[l] / 2.0, cfg.lamb_shift[l]), true});
    for (int m = 1; m <= passes; ++m) {
      const int src = m % 2 == 0 ? l : 1 - l;
      const double amp = std::sqrt(cfg.gamma[l] * cfg.gamma[src]);
      cplx w;
      if (conv == LinkConvention::WavePropagation)
        w = amp * phase(m * cfg.phi0);
      else
        w = cplx(0.0, -amp) * (m % 2 == 0 ? cplx(1.0, 0.0) : phase(cfg.phi0));
      k.terms.push_back({l, src, static_cast<std::size_t>(m), w, false});
    }
  }
  return k;
}

}  // namespace

DelayKernel build_kernel(const ArrayConfig& cfg, double t_end, LinkConvention link) {
  cfg.validate();
  return cfg.topology == Topology::TwoNodeLink ? link_kernel(cfg, t_end, link) : chain_kernel(cfg);
}

}  // namespace wgqed
