#include "wgqed/operators.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wgqed {

namespace {

void check_sites(int n) {
  if (n < 1 || n > kMaxDenseSites)
    throw std::invalid_argument("site count must be in [1, " + std::to_string(kMaxDenseSites) + "]");
}

}  // namespace

EmitterOperator lowering_operator(int site, int n) {
  check_sites(n);
  if (site < 1 || site > n)
    throw std::out_of_range("site " + std::to_string(site) + " outside [1, " + std::to_string(n) + "]");
  const Eigen::Index d = Eigen::Index{1} << n;
  const Eigen::Index bit = Eigen::Index{1} << (site - 1);
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<std::size_t>(d / 2));
  for (Eigen::Index b = 0; b < d; ++b)
    if (b & bit) trip.emplace_back(b ^ bit, b, cplx(1.0, 0.0));
  EmitterOperator op;
  op.site = site;
  op.n_sites = n;
  op.data.resize(d, d);
  op.data.setFromTriplets(trip.begin(), trip.end());
  return op;
}

Mat z_from_lowering(const Mat& op) {
  if (op.rows() != op.cols()) throw std::invalid_argument("z_from_lowering: operator is not square");
  Mat z = 2.0 * op.adjoint() * op;
  z.diagonal().array() -= 1.0;
  return z;
}

std::vector<char> parse_site_symbols(std::string_view spec) {
  std::vector<char> out;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const char c = spec[i];
    if (c == '0' || c == '1' || c == '+' || c == '-') {
      out.push_back(c);
    } else if (spec.compare(i, 3, "\xE2\x88\x92") == 0) {  // U+2212
      out.push_back('-');
      i += 2;
    } else {
      throw std::invalid_argument("unknown site symbol in state '" + std::string(spec) + "'");
    }
  }
  return out;
}

EmitterState build_product_state(std::string_view spec, int n) {
  check_sites(n);
  const auto sym = parse_site_symbols(spec);
  if (static_cast<int>(sym.size()) != n)
    throw std::invalid_argument("state '" + std::string(spec) + "' does not have " + std::to_string(n) +
                                " site symbols");
  const double h = 1.0 / std::sqrt(2.0);
  EmitterState psi = EmitterState::Ones(Eigen::Index{1} << n);
  for (Eigen::Index b = 0; b < psi.size(); ++b)
    for (int s = 0; s < n; ++s) {
      const bool up = (b >> s) & 1;
      switch (sym[s]) {
        case '0': psi[b] *= up ? 0.0 : 1.0; break;
        case '1': psi[b] *= up ? 1.0 : 0.0; break;
        case '+': psi[b] *= h; break;
        default: psi[b] *= up ? -h : h; break;
      }
    }
  return psi;
}

cplx expectation(const Mat& op, const EmitterState& psi) {
  if (op.rows() != psi.size() || op.cols() != psi.size())
    throw std::invalid_argument("expectation: dimension mismatch");
  return psi.dot(op * psi);
}

cplx expectation(const SpMat& op, const EmitterState& psi) {
  if (op.rows() != psi.size() || op.cols() != psi.size())
    throw std::invalid_argument("expectation: dimension mismatch");
  return psi.dot(op * psi);
}

cplx normal_ordered_pair(const Mat& a, const Mat& b, const EmitterState& psi) {
  if (a.cols() != psi.size() || b.cols() != psi.size())
    throw std::invalid_argument("normal_ordered_pair: dimension mismatch");
  return (a * psi).dot(b * psi);
}

Eigen::MatrixXcd product_state_moments(std::string_view spec, int n) {
  const auto sym = parse_site_symbols(spec);
  if (static_cast<int>(sym.size()) != n)
    throw std::invalid_argument("state '" + std::string(spec) + "' does not have " + std::to_string(n) +
                                " site symbols");
  // Per site: <s> and <s^dagger s>. |+-> = (|0> +- |1>)/sqrt2 gives <s> = +-1/2.
  std::vector<double> mean(n), occ(n);
  for (int s = 0; s < n; ++s) {
    switch (sym[s]) {
      case '0': mean[s] = 0.0; occ[s] = 0.0; break;
      case '1': mean[s] = 0.0; occ[s] = 1.0; break;
      case '+': mean[s] = 0.5; occ[s] = 0.5; break;
      default: mean[s] = -0.5; occ[s] = 0.5; break;
    }
  }
  Eigen::MatrixXcd m(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) m(a, b) = a == b ? occ[a] : mean[a] * mean[b];
  return m;
}

Eigen::VectorXd number_diagonal(int n) {
  check_sites(n);
  Eigen::VectorXd d(Eigen::Index{1} << n);
  for (Eigen::Index b = 0; b < d.size(); ++b) d[b] = std::popcount(static_cast<unsigned long>(b));
  return d;
}

}  // namespace wgqed
