#include "pmi/schur.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pmi {

BlockSupport BlockSupport::build(const SdpInstance& p) {
  BlockSupport s;
  s.vars.resize(p.blocks.size());
  for (size_t b = 0; b < p.blocks.size(); ++b)
    for (int i = 0; i < p.nfree; ++i)
      if (!p.blocks[b].A[i].empty()) s.vars[b].push_back(i);
  return s;
}

Mat schur_reference(const SdpInstance& p, const std::vector<Mat>& W) {
  const int n = p.nfree;
  Mat M = Mat::Zero(n, n);
  for (size_t b = 0; b < p.blocks.size(); ++b) {
    const auto& blk = p.blocks[b];
    std::vector<Mat> AW(n);
    for (int i = 0; i < n; ++i) AW[i] = to_dense(blk.A[i], blk.side) * W[b];
    // tr(A_i W A_j W) = sum((A_i W) .* (A_j W)^T)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) += AW[i].cwiseProduct(AW[j].transpose()).sum();
  }
  return M;
}

namespace {

// <A, T> for sparse symmetric A (upper triangle stored) and symmetric T.
double sparse_inner(const SparseSym& a, const Mat& t) {
  double s = 0.0;
  for (const auto& en : a) s += (en.i == en.j ? 1.0 : 2.0) * en.v * t(en.i, en.j);
  return s;
}

// T = W A W computed from the rows of W touched by A.
Mat sandwich(const SparseSym& a, const Mat& w, std::vector<int>& rows, Mat& y) {
  const int side = static_cast<int>(w.rows());
  rows.clear();
  for (const auto& en : a) {
    rows.push_back(en.i);
    rows.push_back(en.j);
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  const int r = static_cast<int>(rows.size());
  // Y = A W restricted to touched rows, indexed by position in `rows`.
  y.setZero(r, side);
  auto pos = [&](int row) { return static_cast<int>(std::lower_bound(rows.begin(), rows.end(), row) - rows.begin()); };
  for (const auto& en : a) {
    y.row(pos(en.i)) += en.v * w.row(en.j);
    if (en.i != en.j) y.row(pos(en.j)) += en.v * w.row(en.i);
  }
  Mat wc(side, r);
  for (int k = 0; k < r; ++k) wc.col(k) = w.col(rows[k]);
  return wc * y;
}

}  // namespace

Mat schur_parallel(const SdpInstance& p, const BlockSupport& support, const std::vector<Mat>& W, int threads) {
  const int n = p.nfree;
  Mat M = Mat::Zero(n, n);
  (void)threads;
  for (size_t b = 0; b < p.blocks.size(); ++b) {
    const auto& vars = support.vars[b];
    const auto& blk = p.blocks[b];
    const int nv = static_cast<int>(vars.size());
#pragma omp parallel num_threads(std::max(1, threads))
    {
      std::vector<int> rows;
      Mat y;
#pragma omp for schedule(dynamic, 4)
      for (int jj = 0; jj < nv; ++jj) {
        const int j = vars[jj];
        const Mat t = sandwich(blk.A[j], W[b], rows, y);
        for (int ii = 0; ii <= jj; ++ii) M(vars[ii], j) += sparse_inner(blk.A[vars[ii]], t);
      }
    }
  }
  M.triangularView<Eigen::StrictlyLower>() = M.transpose().triangularView<Eigen::StrictlyLower>();
  return M;
}

}  // namespace pmi
