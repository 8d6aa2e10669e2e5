#include "wgqed/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace wgqed {

CsrMatrix CsrMatrix::from_triplets(std::int64_t n, std::vector<Eigen::Triplet<cplx>>& trip) {
  Eigen::SparseMatrix<cplx, Eigen::RowMajor, std::int32_t> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  CsrMatrix c;
  c.rows = n;
  c.row_ptr.assign(m.outerIndexPtr(), m.outerIndexPtr() + n + 1);
  c.col.assign(m.innerIndexPtr(), m.innerIndexPtr() + m.nonZeros());
  c.val.assign(m.valuePtr(), m.valuePtr() + m.nonZeros());
  return c;
}

kernels::CsrView CsrMatrix::view() const {
  return {static_cast<std::size_t>(rows), row_ptr.data(), col.data(), val.data()};
}

void CsrMatrix::multiply(const Vec& x, Vec& y) const {
  if (x.size() != rows) throw std::invalid_argument("CsrMatrix::multiply: dimension mismatch");
  y.resize(rows);
  kernels::csr_spmv(view(), x.data(), y.data());
}

SpMat CsrMatrix::to_sparse() const {
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(val.size());
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int32_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) trip.emplace_back(r, col[p], val[p]);
  SpMat m(rows, rows);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

double CsrMatrix::hermiticity_defect() const {
  const SpMat a = to_sparse();
  const SpMat diff = a - SpMat(a.adjoint());
  double m = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SpMat::InnerIterator it(diff, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

LanczosPropagator::LanczosPropagator(const CsrMatrix& h, KrylovOptions opt) : h_(h), opt_(opt) {
  if (opt_.max_dim < 2) throw std::invalid_argument("LanczosPropagator: max_dim must be >= 2");
  basis_.assign(static_cast<std::size_t>(opt_.max_dim + 1), Vec(h.rows));
  w_.resize(h.rows);
}

namespace {

/// First column of exp(-i T h) for the tridiagonal T(alpha, beta).
Eigen::VectorXcd small_exponential(const std::vector<double>& alpha, const std::vector<double>& beta, double h) {
  const auto m = static_cast<Eigen::Index>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) t(i, i) = alpha[i];
  for (Eigen::Index i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = beta[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::VectorXcd phase(m);
  for (Eigen::Index k = 0; k < m; ++k) phase[k] = std::exp(cplx(0.0, -h * es.eigenvalues()[k])) * v(0, k);
  return v * phase;
}

}  // namespace

double LanczosPropagator::try_step(const Vec& psi, double h, Vec& out, double target) {
  const auto n = static_cast<std::size_t>(h_.rows);
  const double beta0 = psi.norm();
  if (beta0 == 0.0) {
    out = psi;
    return 0.0;
  }
  std::vector<double> alpha, beta;
  basis_[0] = psi / beta0;
  Eigen::VectorXcd coef;
  double err = 0.0;
  int m = 0;
  for (int j = 0; j < opt_.max_dim; ++j) {
    kernels::csr_spmv(h_.view(), basis_[j].data(), w_.data());
    ++stats_.matvecs;
    if (j > 0) kernels::zaxpy(n, -beta.back(), basis_[j - 1].data(), w_.data());
    const double a = kernels::zdotc(n, basis_[j].data(), w_.data()).real();
    kernels::zaxpy(n, -a, basis_[j].data(), w_.data());
    // Full reorthogonalisation keeps the small basis numerically orthonormal.
    for (int i = 0; i <= j; ++i) {
      const cplx c = kernels::zdotc(n, basis_[i].data(), w_.data());
      kernels::zaxpy(n, -c, basis_[i].data(), w_.data());
    }
    alpha.push_back(a);
    m = j + 1;
    double next_beta = w_.norm();
    const bool invariant = next_beta < 1e-14 * std::max(1.0, std::abs(a));
    if (invariant) next_beta = 0.0;
    coef = small_exponential(alpha, beta, h);
    err = beta0 * next_beta * std::abs(coef[m - 1]);
    if (invariant || err <= target) break;
    if (j + 1 < opt_.max_dim) {
      beta.push_back(next_beta);
      basis_[j + 1] = w_ / next_beta;
    }
  }
  out.setZero(h_.rows);
  for (int i = 0; i < m; ++i) kernels::zaxpy(n, beta0 * coef[i], basis_[i].data(), out.data());
  return err;
}

void LanczosPropagator::step(Vec& psi, double h) {
  if (psi.size() != h_.rows) throw std::invalid_argument("LanczosPropagator::step: dimension mismatch");
  double done = 0.0;
  const double total = std::abs(h);
  const double sign = h < 0.0 ? -1.0 : 1.0;
  double sub = last_ok_ > 0.0 ? std::min(total, last_ok_) : total;
  Vec out(h_.rows);
  int attempts = 0;
  while (done < total * (1.0 - 1e-14)) {
    if (++attempts > opt_.max_substeps)
      throw std::runtime_error("LanczosPropagator: no convergence within " + std::to_string(opt_.max_substeps) +
                               " substeps");
    sub = std::min(sub, total - done);
    const double target = opt_.tol * sub / total;
    const double err = try_step(psi, sign * sub, out, target);
    if (err <= target) {
      psi.swap(out);
      done += sub;
      ++stats_.substeps;
      stats_.max_error = std::max(stats_.max_error, err);
      if (err < 0.1 * opt_.tol * sub / total) sub *= 1.5;
      last_ok_ = sub;
    } else {
      sub *= 0.5;
    }
  }
}

}  // namespace wgqed
