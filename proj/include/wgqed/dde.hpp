#pragma once

// Explicit RK4 integrator for vector-valued delay-differential equations
//   dx/dt = f(t, x(t), x(t - tau_1), ..., x(t - tau_K))
// with history read from a uniformly sampled buffer.
//
// Delayed terms follow a closed Heaviside convention: x(t - tau) is taken
// from the history once t >= tau and from the pre-history before that. RK
// stages strictly inside a step see the left limit, so a lag that lands
// exactly on the step end does not switch on one stage early.

#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "wgqed/operators.hpp"

namespace wgqed {

enum class Interpolation { Linear, Cubic };
enum class Prehistory { Zero, HoldInitial };

std::string_view to_string(Interpolation i);
Interpolation parse_interpolation(std::string_view s);

class HistoryBuffer {
 public:
  /// capacity = 0 keeps every sample.
  HistoryBuffer(double t0, double dt, Eigen::Index dim, std::size_t capacity = 0,
                Interpolation interp = Interpolation::Linear, Prehistory pre = Prehistory::Zero,
                Vec initial = {});

  void push(const Vec& x);

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  Eigen::Index dim() const { return dim_; }
  std::size_t count() const { return count_; }
  double latest_time() const { return t0_ + static_cast<double>(count_ - 1) * dt_; }
  Interpolation interpolation() const { return interp_; }

  /// Stored sample k (t = t0 + k dt); throws once it has been evicted.
  Eigen::Map<const Vec> at_index(std::size_t k) const;

  /// Interpolated value at fractional grid position p = (t - t0)/dt.
  /// Returns false when p lies in a zero pre-history (out is untouched).
  bool sample_position(double p, bool left_limit, Vec& out) const;

  /// Value at time t; zero vector for t < t0, exact at grid points.
  Vec sample(double t) const;

  /// Samples whose index is a multiple of `period` may carry derivative
  /// jumps; cubic stencils then stay inside one period. 0 disables.
  void set_breakpoint_period(std::size_t period) { period_ = period; }

 private:
  std::size_t oldest() const { return count_ > cap_ ? count_ - cap_ : 0; }
  const cplx* slot(std::size_t k) const { return data_.data() + (k % cap_) * static_cast<std::size_t>(dim_); }

  double t0_, dt_;
  Eigen::Index dim_;
  std::size_t cap_;
  Interpolation interp_;
  Prehistory pre_;
  Vec initial_;
  std::vector<cplx> data_;
  std::size_t count_ = 0;
  std::size_t period_ = 0;
  bool unbounded_;
};

struct DelayedSystem {
  Eigen::Index dim = 0;
  /// Distinct lags; zero is allowed and reads the current stage.
  std::vector<double> delays;
  /// delayed[k] is x(t - delays[k]), or nullptr while that term is switched off.
  std::function<void(double t, const Vec& x, const std::vector<const Vec*>& delayed, Vec& dx)> rhs;
};

struct IntegrationOptions {
  Interpolation interpolation = Interpolation::Linear;
  Prehistory prehistory = Prehistory::Zero;
  /// Keep every stride-th step in the returned trajectory; 0 stores nothing.
  std::size_t stride = 1;
};

struct OperatorTrajectory {
  std::vector<double> t;
  std::vector<Vec> x;
  double dt = 0.0;
  std::size_t steps = 0;
  Interpolation interpolation = Interpolation::Linear;

  /// Linear or cubic interpolation of the stored samples (zero before t[0]).
  Vec at(double time) const;
};

using StepObserver = std::function<void(std::size_t step, double t, const Vec& x)>;

/// Number of uniform steps covering [0, t_end].
std::size_t step_count(double t_end, double dt);

OperatorTrajectory integrate(const DelayedSystem& sys, const Vec& x0, double t_end, double dt,
                             const IntegrationOptions& opt = {}, const StepObserver& observer = {});

/// Lagrange weights for nodes 0..n-1 evaluated at x.
void lagrange_weights(int n, double x, double* w);

}  // namespace wgqed
