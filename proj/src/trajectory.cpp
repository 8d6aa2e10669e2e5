#include "wgqed/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace wgqed {

Mat ProjectedTrajectory::at(double time) const {
  if (u.empty()) throw std::logic_error("ProjectedTrajectory: empty");
  double p = u.size() > 1 ? (time - t.front()) / spacing() : 0.0;
  const double r = std::round(p);
  if (std::abs(p - r) < 1e-9) p = r;
  if (p < 0.0) return Mat::Zero(u.front().rows(), u.front().cols());
  const double last = static_cast<double>(u.size() - 1);
  if (p > last) throw std::out_of_range("ProjectedTrajectory: time beyond last sample");
  const auto j = static_cast<std::size_t>(std::floor(p));
  const double f = p - static_cast<double>(j);
  if (f == 0.0) return u[j];
  std::size_t first = j, cnt = 2;
  if (interpolation == Interpolation::Cubic) {
    const std::size_t hi = u.size() - 1;
    std::size_t s0 = j >= 1 ? j - 1 : 0;
    if (s0 + 3 > hi) s0 = hi >= 3 ? hi - 3 : 0;
    cnt = std::min<std::size_t>(4, hi - s0 + 1);
    first = s0;
  }
  double w[4];
  lagrange_weights(static_cast<int>(cnt), p - static_cast<double>(first), w);
  Mat out = w[0] * u[first];
  for (std::size_t i = 1; i < cnt; ++i) out += w[i] * u[first + i];
  return out;
}

cplx ProjectedTrajectory::inner(const Eigen::Ref<const Vec>& a, const Eigen::Ref<const Vec>& b) const {
  if (metric.size() == 0) return a.dot(b);
  return a.dot(metric * b);
}

Eigen::MatrixXd ProjectedTrajectory::populations() const {
  Eigen::MatrixXd p(static_cast<Eigen::Index>(u.size()), n);
  for (std::size_t i = 0; i < u.size(); ++i)
    for (int l = 0; l < n; ++l) p(static_cast<Eigen::Index>(i), l) = inner(u[i].col(l), u[i].col(l)).real();
  return p;
}

}  // namespace wgqed
