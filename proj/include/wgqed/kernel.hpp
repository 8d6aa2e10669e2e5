#pragma once

// Delay kernel after the first Markov approximation: a finite list of
// (target, source, lag, weight) terms shared by every delay-differential
// solver. For a linear emitter the terms read
//   dc_target/dt = -sum weight * c_source(t - lag),
// and the qubit solvers wrap the non-local ones with sigma^z_target.

#include <cstddef>
#include <string_view>
#include <vector>

#include "wgqed/config.hpp"

namespace wgqed {

/// Weights of the two-node link round-trip train.
/// WavePropagation: gamma e^{i m phi0} for the m-th pass (consistent with the
/// finite-waveguide mode expansion). AsPrinted: -i gamma on even passes and
/// -i gamma e^{i phi0} on odd passes.
enum class LinkConvention { WavePropagation, AsPrinted };

std::string_view to_string(LinkConvention c);
LinkConvention parse_link_convention(std::string_view s);

struct KernelTerm {
  int target = 0;  ///< 0-based
  int source = 0;
  std::size_t lag = 0;  ///< index into DelayKernel::delays
  cplx weight;
  /// Applied as a plain linear term (no sigma^z factor) in the qubit equations.
  bool local = false;
};

struct DelayKernel {
  int n = 0;
  std::vector<double> delays;
  std::vector<KernelTerm> terms;
};

/// Chain: weight G_{source,target} at lag |source - target| tau12.
/// Link: local term (i LambShift + gamma/2) plus the train m = 1..floor(t_end/tau12).
DelayKernel build_kernel(const ArrayConfig& cfg, double t_end,
                         LinkConvention link = LinkConvention::WavePropagation);

}  // namespace wgqed
