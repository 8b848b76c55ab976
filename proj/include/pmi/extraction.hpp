#pragma once
// Flat-extension detection on (pseudo-)moment sequences and recovery of finitely
// atomic matrix-valued measures, minimizers and active-constraint directions.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmi/momentcone.hpp"

namespace pmi {

class ExtractionError : public Error {
 public:
  using Error::Error;
};

struct FecResult {
  bool holds = false;
  int t = -1;  // first order with matching ranks (valid when holds)
  int rank_low = 0, rank_high = 0;
  Vec sv_low, sv_high;
  // (t, rank M_t, rank M_{t-d}) for every scanned order.
  std::vector<std::tuple<int, int, int>> scanned;
};

// Scans t = max(t_min, d) .. k for rank M_t(S) = rank M_{t-d}(S).
FecResult check_fec(const MomentSequence& S, int t_min, int k, int d, double tau_rank = 1e-9);

// Scalar pseudo-moments viewed as a 1x1 matrix-valued sequence.
MomentSequence as_moment_sequence(const PseudoMomentVector& s);

struct ExtractionSettings {
  double tau_rank = 1e-9;
  std::uint64_t seed = 0;
  int max_retries = 5;           // re-draws of the random combination
  double cluster_radius = 1e-5;  // relative to 1 + max |point entry|
  double residual_tol = 1e-6;    // relative reconstruction residual accepted as success
};

struct ExtractionOutput {
  AtomicMeasure measure;
  // Basis b_t(x, w) as (monomial exponent, unit-vector index) pairs.
  std::vector<std::pair<ExponentVector, int>> basis;
  int rank = 0;
  double residual = 0.0;      // ||M_t(S) - M_t(assembled)||_F
  double weight_slack = 0.0;  // smallest eigenvalue of any W_i before PSD projection
  std::uint64_t seed_used = 0;
  int attempts = 0;
};

// Recovers sum_i W_i delta_{x_i} from M_t(S) when rank M_t = rank M_{t-d_G}.
// Throws ExtractionError on a basis-degree violation, row deficiency or a
// reconstruction residual above tolerance after all retries.
ExtractionOutput extract_atoms(const MomentSequence& S, int t, int d_G, const ExtractionSettings& es = {});

// (s_{e_1}, ..., s_{e_l}).
Vec candidate_minimizer(const PseudoMomentVector& s);

struct ConvexMinimizer {
  Vec y;
  bool from_atoms = false;  // false: fell back to candidate_minimizer
  FecResult fec;
  std::vector<Atom> atoms;  // scalar weights stored as 1x1 matrices
  std::string warning;
};

// Extracts the atoms of s (scalar specialization) after the FEC with
// d = max(1, d_Theta) at orders t_min..k and returns sum_j lambda_j y_j.
ConvexMinimizer convex_minimizer_from_dual(const PseudoMomentVector& s, int t_min, int k, int d_Theta,
                                           const ExtractionSettings& es = {});

struct RankOneResult {
  bool rank_one = false;
  int rank = 0;
  std::optional<Vec> y_star;
};

RankOneResult rank_one_certificate(const PseudoMomentVector& s, int k_y, double tau_rank = 1e-9);

struct ActiveAtom {
  Vec point;
  std::vector<Vec> vectors;  // W_i = sum_l v_l v_l^T
  std::vector<double> residuals;
};

// Residuals ||P(y*, x_i) v||.
std::vector<ActiveAtom> recover_active_set(const AtomicMeasure& mu, const Vec& y_star, const BiPolyMatrix& P,
                                           double tol = 1e-8);
// Residuals ||F(x_i) v - lambda v|| for eigenvalue minimization.
std::vector<ActiveAtom> recover_eigenvectors(const AtomicMeasure& mu, const PolyMatrix& F, double lambda,
                                             double tol = 1e-8);

}  // namespace pmi
