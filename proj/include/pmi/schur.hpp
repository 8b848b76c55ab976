#pragma once
// Schur complement M_ij = sum_b <A_{b,i}, W_b A_{b,j} W_b> of the interior-point
// Newton system. Two implementations: a dense serial reference used as a test
// oracle and benchmark baseline, and a sparsity-aware kernel parallelized with
// OpenMP over columns (each entry is produced by exactly one thread in a fixed
// summation order, so results do not depend on the thread count).

#include <vector>

#include "pmi/sdp.hpp"

namespace pmi {

// Per-block list of variables with a nonzero coefficient matrix.
struct BlockSupport {
  std::vector<std::vector<int>> vars;  // vars[b] = sorted variable indices
  static BlockSupport build(const SdpInstance& p);
};

Mat schur_reference(const SdpInstance& p, const std::vector<Mat>& W);
Mat schur_parallel(const SdpInstance& p, const BlockSupport& support, const std::vector<Mat>& W, int threads);

}  // namespace pmi
