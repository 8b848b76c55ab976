#pragma once
// Block-diagonal semidefinite programs in LMI form and an embedded primal-dual
// interior-point solver.
//
// Instance (the "primal" in this library's vocabulary):
//     optimize  b^T y + offset
//     s.t.      C_b - sum_i y_i A_{b,i}  PSD   for every block b
//               E y = e                         (optional equality rows)
// Its conic dual is
//     min <C, X> + e^T w   s.t.  <A_i, X> + (E^T w)_i = b_i,  X PSD
// (signs flipped for a minimization instance).

#include <cstdint>
#include <string>
#include <vector>

#include "pmi/polycore.hpp"

namespace pmi {

// One entry of a symmetric sparse matrix; only i <= j is stored.
struct SymEntry {
  int i = 0, j = 0;
  double v = 0.0;
};
using SparseSym = std::vector<SymEntry>;

Mat to_dense(const SparseSym& a, int side);
SparseSym to_sparse(const Mat& a, double drop = 0.0);

enum class Sense { Maximize, Minimize };

struct SdpBlock {
  int side = 0;
  Mat C;                    // constant term
  std::vector<SparseSym> A;  // one coefficient matrix per free variable
};

struct SdpInstance {
  int nfree = 0;
  std::vector<SdpBlock> blocks;
  Vec b;
  Sense sense = Sense::Maximize;
  double offset = 0.0;
  // Equality rows E y = e. Kept as first-class constraints rather than pairs of
  // opposing inequalities, which would destroy the interior the solver needs.
  Mat E;  // neq x nfree (may have zero rows)
  Vec e;

  int neq() const { return static_cast<int>(E.rows()); }
  // Throws Error describing the first violated structural invariant.
  void validate() const;
  // Objective value at y (including offset).
  double objective(const Vec& y) const;
  // Slack matrix C_b - sum_i y_i A_{b,i}.
  Mat slack(int block, const Vec& y) const;
};

// NearOptimal: the iterates stagnated (typically on problems without strictly
// feasible points) but the best iterate meets the looser near_tol on the
// relative gap and both infeasibilities.
enum class SdpStatus { Optimal, NearOptimal, MaxIterations, InfeasibleSuspect, NumericalFailure };
// True for Optimal and NearOptimal.
bool usable(SdpStatus s);
std::string to_string(SdpStatus s);

struct SdpSettings {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  double near_tol = 1e-4;
  int max_iter = 200;
  std::uint64_t seed = 0;  // the method is deterministic; kept for reproducibility records
  int threads = 1;         // OpenMP threads for the Schur-complement kernel
  bool verbose = false;
};

struct SdpIterate {
  int iter = 0;
  double primal_obj = 0.0, dual_obj = 0.0;
  double primal_infeas = 0.0;  // of the LMI side (slack and equality residuals)
  double dual_infeas = 0.0;    // of the conic dual
  double mu = 0.0;
  double step_primal = 0.0, step_dual = 0.0;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  Vec y;
  // Dual PSD blocks X and equality multipliers w satisfy
  // <A_i, X> + (E^T w)_i = +-b_i (+ for maximization).
  std::vector<Mat> X;
  std::vector<Mat> Z;  // LMI slacks C_b - sum_i y_i A_{b,i}
  Vec w;
  double primal_obj = 0.0;  // b^T y + offset
  double dual_obj = 0.0;    // conic dual objective
  double gap = 0.0;         // |primal_obj - dual_obj|
  double primal_infeas = 0.0, dual_infeas = 0.0;
  int iterations = 0;
  std::vector<SdpIterate> history;
};

SdpSolution solve(const SdpInstance& p, const SdpSettings& settings = {});

}  // namespace pmi
