#include "wgqed/dde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wgqed/kernels.hpp"

namespace wgqed {

namespace {

constexpr double kSnap = 1e-9;

// Position rounded to the grid when it is within kSnap of an integer.
double snap(double p) {
  const double r = std::round(p);
  return std::abs(p - r) < kSnap ? r : p;
}

// Commensurate grid-aligned lags put every derivative jump of the solution
// on multiples of the smallest lag.
std::size_t breakpoint_period(const std::vector<double>& delays, double dt) {
  double base = std::numeric_limits<double>::infinity();
  for (double d : delays)
    if (d > 0.0) base = std::min(base, d);
  if (!std::isfinite(base)) return 0;
  const double steps = base / dt;
  if (std::abs(steps - std::round(steps)) > kSnap) return 0;
  for (double d : delays) {
    const double r = d / base;
    if (std::abs(r - std::round(r)) > kSnap) return 0;
  }
  return static_cast<std::size_t>(std::llround(steps));
}

}  // namespace

std::string_view to_string(Interpolation i) { return i == Interpolation::Linear ? "linear" : "cubic"; }

Interpolation parse_interpolation(std::string_view s) {
  if (s == "linear" || s == "Linear") return Interpolation::Linear;
  if (s == "cubic" || s == "Cubic" || s == "spline" || s == "CubicSpline") return Interpolation::Cubic;
  throw std::invalid_argument("unknown interpolation '" + std::string(s) + "'");
}

void lagrange_weights(int n, double x, double* w) {
  for (int i = 0; i < n; ++i) {
    double v = 1.0;
    for (int j = 0; j < n; ++j)
      if (j != i) v *= (x - j) / static_cast<double>(i - j);
    w[i] = v;
  }
}

HistoryBuffer::HistoryBuffer(double t0, double dt, Eigen::Index dim, std::size_t capacity, Interpolation interp,
                             Prehistory pre, Vec initial)
    : t0_(t0),
      dt_(dt),
      dim_(dim),
      cap_(capacity == 0 ? 64 : capacity),
      interp_(interp),
      pre_(pre),
      initial_(std::move(initial)),
      unbounded_(capacity == 0) {
  if (!(dt > 0.0)) throw std::invalid_argument("HistoryBuffer: dt must be > 0");
  if (pre_ == Prehistory::HoldInitial && initial_.size() != dim_)
    throw std::invalid_argument("HistoryBuffer: hold-initial pre-history needs the initial state");
  data_.resize(cap_ * static_cast<std::size_t>(dim_));
}

void HistoryBuffer::push(const Vec& x) {
  if (x.size() != dim_) throw std::invalid_argument("HistoryBuffer::push: dimension mismatch");
  if (unbounded_ && count_ == cap_) {
    // Grow and unroll; with an unbounded buffer slot(k) is always data_[k].
    cap_ *= 2;
    data_.resize(cap_ * static_cast<std::size_t>(dim_));
  }
  std::copy(x.data(), x.data() + dim_, data_.begin() + static_cast<std::ptrdiff_t>((count_ % cap_) * dim_));
  ++count_;
}

Eigen::Map<const Vec> HistoryBuffer::at_index(std::size_t k) const {
  if (k >= count_) throw std::out_of_range("HistoryBuffer: sample not yet written");
  if (k < oldest()) throw std::out_of_range("HistoryBuffer: sample evicted (retention window too short)");
  return {slot(k), dim_};
}

bool HistoryBuffer::sample_position(double p, bool left_limit, Vec& out) const {
  if (count_ == 0) throw std::logic_error("HistoryBuffer: empty");
  p = snap(p);
  if (p < 0.0 || (p == 0.0 && left_limit)) {
    if (pre_ == Prehistory::Zero) return false;
    out = initial_;
    return true;
  }
  const double last = static_cast<double>(count_ - 1);
  if (p > last) throw std::out_of_range("HistoryBuffer: extrapolation beyond latest sample");
  out.resize(dim_);
  const auto j = static_cast<std::size_t>(std::floor(p));
  const double f = p - static_cast<double>(j);
  if (f == 0.0) {
    const auto s = at_index(j);
    std::copy(s.data(), s.data() + dim_, out.data());
    return true;
  }
  std::size_t first = j, n = 2;
  if (interp_ == Interpolation::Cubic) {
    std::size_t lo = oldest();
    std::size_t hi = count_ - 1;
    if (period_ >= 3) {
      const std::size_t seg = j / period_ * period_;
      lo = std::max(lo, seg);
      hi = std::min(hi, seg + period_);
    }
    std::size_t s0 = j >= 1 ? j - 1 : 0;
    if (s0 + 3 > hi) s0 = hi >= 3 ? hi - 3 : 0;
    s0 = std::max(s0, lo);
    n = std::min<std::size_t>(4, hi - s0 + 1);
    first = s0;
  }
  double w[4];
  const cplx* xs[4];
  lagrange_weights(static_cast<int>(n), p - static_cast<double>(first), w);
  for (std::size_t i = 0; i < n; ++i) xs[i] = at_index(first + i).data();
  kernels::lincomb(static_cast<std::size_t>(dim_), n, w, xs, out.data());
  return true;
}

Vec HistoryBuffer::sample(double t) const {
  Vec out;
  if (!sample_position((t - t0_) / dt_, false, out)) return Vec::Zero(dim_);
  return out;
}

Vec OperatorTrajectory::at(double time) const {
  if (x.empty()) throw std::logic_error("OperatorTrajectory: empty");
  const double h = t.size() > 1 ? t[1] - t[0] : 1.0;
  double p = (time - t.front()) / h;
  const double r = std::round(p);
  if (std::abs(p - r) < kSnap) p = r;
  if (p < 0.0) return Vec::Zero(x.front().size());
  const double last = static_cast<double>(x.size() - 1);
  if (p > last) throw std::out_of_range("OperatorTrajectory: time beyond last sample");
  const auto j = static_cast<std::size_t>(std::floor(p));
  const double f = p - static_cast<double>(j);
  if (f == 0.0) return x[j];
  std::size_t first = j, n = 2;
  if (interpolation == Interpolation::Cubic) {
    const std::size_t hi = x.size() - 1;
    std::size_t s0 = j >= 1 ? j - 1 : 0;
    if (s0 + 3 > hi) s0 = hi >= 3 ? hi - 3 : 0;
    n = std::min<std::size_t>(4, hi - s0 + 1);
    first = s0;
  }
  double w[4];
  lagrange_weights(static_cast<int>(n), p - static_cast<double>(first), w);
  Vec out = w[0] * x[first];
  for (std::size_t i = 1; i < n; ++i) out += w[i] * x[first + i];
  return out;
}

std::size_t step_count(double t_end, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
  return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

OperatorTrajectory integrate(const DelayedSystem& sys, const Vec& x0, double t_end, double dt,
                             const IntegrationOptions& opt, const StepObserver& observer) {
  if (x0.size() != sys.dim) throw std::invalid_argument("integrate: x0 dimension mismatch");
  if (!sys.rhs) throw std::invalid_argument("integrate: missing rhs");
  const std::size_t steps = step_count(t_end, dt);

  double min_pos = std::numeric_limits<double>::infinity(), max_delay = 0.0;
  for (double d : sys.delays) {
    if (!(d >= 0.0)) throw std::invalid_argument("integrate: delays must be >= 0");
    if (d > 0.0) min_pos = std::min(min_pos, d);
    max_delay = std::max(max_delay, d);
  }
  if (dt > min_pos / 4.0 * (1.0 + 1e-12))
    throw std::invalid_argument("integrate: dt = " + std::to_string(dt) +
                                " exceeds a quarter of the smallest delay " + std::to_string(min_pos));

  const auto retain = static_cast<std::size_t>(std::ceil(max_delay / dt)) + 8;
  HistoryBuffer hist(0.0, dt, sys.dim, retain, opt.interpolation, opt.prehistory, x0);
  hist.push(x0);
  hist.set_breakpoint_period(breakpoint_period(sys.delays, dt));

  std::vector<double> lag(sys.delays.size());
  for (std::size_t k = 0; k < lag.size(); ++k) lag[k] = snap(sys.delays[k] / dt);

  const auto n = static_cast<std::size_t>(sys.dim);
  Vec x = x0, stage(sys.dim), k1(sys.dim), k2(sys.dim), k3(sys.dim), k4(sys.dim);
  std::vector<Vec> lookups(sys.delays.size(), Vec(sys.dim));
  std::vector<const Vec*> delayed(sys.delays.size(), nullptr);

  auto eval = [&](std::size_t step, double c, const Vec& xs, Vec& out) {
    for (std::size_t k = 0; k < lag.size(); ++k) {
      if (lag[k] == 0.0) {
        delayed[k] = &xs;
        continue;
      }
      const double p = static_cast<double>(step) - lag[k] + c;
      delayed[k] = hist.sample_position(p, c > 0.0, lookups[k]) ? &lookups[k] : nullptr;
    }
    out.setZero();
    sys.rhs((static_cast<double>(step) + c) * dt, xs, delayed, out);
  };

  OperatorTrajectory traj;
  traj.dt = dt;
  traj.steps = steps;
  traj.interpolation = opt.interpolation;
  auto record = [&](std::size_t step) {
    const double t = static_cast<double>(step) * dt;
    if (opt.stride > 0 && step % opt.stride == 0) {
      traj.t.push_back(t);
      traj.x.push_back(x);
    }
    if (observer) observer(step, t, x);
  };
  record(0);

  const double half = 0.5 * dt;
  for (std::size_t s = 0; s < steps; ++s) {
    eval(s, 0.0, x, k1);
    stage = x;
    kernels::zaxpy(n, half, k1.data(), stage.data());
    eval(s, 0.5, stage, k2);
    stage = x;
    kernels::zaxpy(n, half, k2.data(), stage.data());
    eval(s, 0.5, stage, k3);
    stage = x;
    kernels::zaxpy(n, dt, k3.data(), stage.data());
    eval(s, 1.0, stage, k4);

    const double w[5] = {1.0, dt / 6.0, dt / 3.0, dt / 3.0, dt / 6.0};
    const cplx* xs[5] = {x.data(), k1.data(), k2.data(), k3.data(), k4.data()};
    kernels::lincomb(n, 5, w, xs, x.data());
    if (!x.allFinite())
      throw std::runtime_error("integrate: non-finite state at t = " + std::to_string(static_cast<double>(s + 1) * dt));
    hist.push(x);
    record(s + 1);
  }
  return traj;
}

}  // namespace wgqed
