#pragma once

// Sparse Hermitian matrices in CSR form and Lanczos short-time propagation
// psi <- exp(-i H h) psi with an a-posteriori error estimate.

#include <cstdint>
#include <vector>

#include "wgqed/kernels.hpp"
#include "wgqed/operators.hpp"

namespace wgqed {

struct CsrMatrix {
  std::int64_t rows = 0;
  std::vector<std::int32_t> row_ptr;
  std::vector<std::int32_t> col;
  std::vector<cplx> val;

  static CsrMatrix from_triplets(std::int64_t n, std::vector<Eigen::Triplet<cplx>>& trip);
  kernels::CsrView view() const;
  std::size_t nnz() const { return val.size(); }
  void multiply(const Vec& x, Vec& y) const;
  /// max |A - A^dagger|
  double hermiticity_defect() const;
  SpMat to_sparse() const;
};

struct KrylovOptions {
  int max_dim = 40;
  double tol = 1e-11;
  int max_substeps = 4096;
};

struct KrylovStats {
  std::size_t matvecs = 0;
  std::size_t substeps = 0;
  double max_error = 0.0;
};

class LanczosPropagator {
 public:
  explicit LanczosPropagator(const CsrMatrix& h, KrylovOptions opt = {});

  /// Advances psi by time h (negative h steps backwards). Throws when the
  /// substep budget is exhausted before the error estimate meets tol.
  void step(Vec& psi, double h);

  const KrylovStats& stats() const { return stats_; }

 private:
  /// One Krylov exponentiation of length h, stopping once the error
  /// estimate is below `target`; returns the estimate.
  double try_step(const Vec& psi, double h, Vec& out, double target);

  const CsrMatrix& h_;
  KrylovOptions opt_;
  KrylovStats stats_;
  std::vector<Vec> basis_;
  Vec w_;
  double last_ok_ = 0.0;
};

}  // namespace wgqed
