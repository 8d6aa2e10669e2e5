#include "wgqed/graded.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace wgqed {

GradedLayout::GradedLayout(int n_sites) : n_(n_sites) {
  if (n_ < 1 || n_ > kMaxDenseSites) throw std::invalid_argument("GradedLayout: unsupported site count");
  sectors_.resize(n_ + 1);
  rank_.resize(static_cast<std::size_t>(full_dim()));
  for (Eigen::Index b = 0; b < full_dim(); ++b) {
    auto& s = sectors_[std::popcount(static_cast<unsigned long>(b))];
    rank_[b] = static_cast<Eigen::Index>(s.size());
    s.push_back(b);
  }
  offset_.assign(n_ + 2, 0);
  for (int w = 1; w <= n_; ++w)
    offset_[w + 1] = offset_[w] + static_cast<std::size_t>(block_rows(w) * block_cols(w));
  offset_[0] = 0;
}

void GradedLayout::pack(const Mat& full, cplx* buf) const {
  if (full.rows() != full_dim() || full.cols() != full_dim())
    throw std::invalid_argument("GradedLayout::pack: dimension mismatch");
  for (int w = 1; w <= n_; ++w) {
    auto blk = block(buf, w);
    const auto& rows = sectors_[w - 1];
    const auto& cols = sectors_[w];
    for (Eigen::Index c = 0; c < blk.cols(); ++c)
      for (Eigen::Index r = 0; r < blk.rows(); ++r) blk(r, c) = full(rows[r], cols[c]);
  }
}

Mat GradedLayout::unpack(const cplx* buf) const {
  Mat full = Mat::Zero(full_dim(), full_dim());
  for (int w = 1; w <= n_; ++w) {
    auto blk = block(buf, w);
    const auto& rows = sectors_[w - 1];
    const auto& cols = sectors_[w];
    for (Eigen::Index c = 0; c < blk.cols(); ++c)
      for (Eigen::Index r = 0; r < blk.rows(); ++r) full(rows[r], cols[c]) = blk(r, c);
  }
  return full;
}

double GradedLayout::off_block_norm(const Mat& full) const {
  double m = 0.0;
  for (Eigen::Index c = 0; c < full.cols(); ++c)
    for (Eigen::Index r = 0; r < full.rows(); ++r) {
      const int wr = std::popcount(static_cast<unsigned long>(r));
      const int wc = std::popcount(static_cast<unsigned long>(c));
      if (wr + 1 != wc) m = std::max(m, std::abs(full(r, c)));
    }
  return m;
}

Vec GradedLayout::apply(const cplx* buf, const Vec& psi) const {
  if (psi.size() != full_dim()) throw std::invalid_argument("GradedLayout::apply: dimension mismatch");
  Vec out = Vec::Zero(full_dim());
  for (int w = 1; w <= n_; ++w) {
    auto blk = block(buf, w);
    const auto& rows = sectors_[w - 1];
    const auto& cols = sectors_[w];
    Vec x(blk.cols());
    for (Eigen::Index c = 0; c < blk.cols(); ++c) x[c] = psi[cols[c]];
    const Vec y = blk * x;
    for (Eigen::Index r = 0; r < blk.rows(); ++r) out[rows[r]] += y[r];
  }
  return out;
}

}  // namespace wgqed
