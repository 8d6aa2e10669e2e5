#pragma once

// Excitation-number graded storage for lowering-type operators.
//
// Any operator X built from sigma^-_l by Heisenberg evolution under an
// excitation-conserving model maps the w-excitation sector onto the
// (w-1)-excitation sector. It is kept as N blocks X_w of shape
// C(N, w-1) x C(N, w), w = 1..N, laid out contiguously (column-major per
// block). The full 2^N x 2^N matrix has 2^N * 2^(N-1) entries; the graded
// form needs C(2N, N-1).

#include <cstddef>
#include <vector>

#include "wgqed/operators.hpp"

namespace wgqed {

class GradedLayout {
 public:
  explicit GradedLayout(int n_sites);

  int n_sites() const { return n_; }
  Eigen::Index full_dim() const { return Eigen::Index{1} << n_; }

  /// Basis indices with popcount w, ascending.
  const std::vector<Eigen::Index>& sector(int w) const { return sectors_[w]; }
  Eigen::Index sector_size(int w) const { return static_cast<Eigen::Index>(sectors_[w].size()); }

  /// Position of full basis index b inside its sector.
  Eigen::Index rank_of(Eigen::Index b) const { return rank_[b]; }

  /// Offset of block w (1..N) in the packed buffer.
  std::size_t block_offset(int w) const { return offset_[w]; }
  Eigen::Index block_rows(int w) const { return sector_size(w - 1); }
  Eigen::Index block_cols(int w) const { return sector_size(w); }

  /// Packed length of one operator.
  std::size_t packed_size() const { return offset_[n_ + 1]; }

  Eigen::Map<Mat> block(cplx* buf, int w) const {
    return {buf + offset_[w], block_rows(w), block_cols(w)};
  }
  Eigen::Map<const Mat> block(const cplx* buf, int w) const {
    return {buf + offset_[w], block_rows(w), block_cols(w)};
  }

  /// Packs a lowering-type full matrix; entries outside the w -> w-1 blocks
  /// are dropped.
  void pack(const Mat& full, cplx* buf) const;
  Mat unpack(const cplx* buf) const;

  /// Largest absolute entry of `full` outside the graded blocks.
  double off_block_norm(const Mat& full) const;

  /// y = X psi for a packed X and a full-space state psi.
  Vec apply(const cplx* buf, const Vec& psi) const;

 private:
  int n_;
  std::vector<std::vector<Eigen::Index>> sectors_;
  std::vector<Eigen::Index> rank_;
  std::vector<std::size_t> offset_;
};

}  // namespace wgqed
