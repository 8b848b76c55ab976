#pragma once
// Matrix-valued (pseudo-)moment sequences, moment and localizing matrices and
// the Riesz functionals pairing them with polynomial matrices.

#include <vector>

#include "pmi/polycore.hpp"

namespace pmi {

// Sequence (S_alpha)_{|alpha| <= order} of symmetric m x m matrices, stored
// densely in basis order.
class MomentSequence {
 public:
  MomentSequence() = default;
  MomentSequence(int nvars, int m, int order);

  int nvars() const { return nvars_; }
  int m() const { return m_; }
  int order() const { return order_; }
  long count() const { return static_cast<long>(blocks_.size()); }

  const Mat& at(const ExponentVector& alpha) const;
  // Stores the symmetric part of `value`.
  void set(const ExponentVector& alpha, const Mat& value);
  const Mat& block(long index) const { return blocks_.at(index); }
  void set_block(long index, const Mat& value);
  // Truncation to a lower order.
  MomentSequence truncated(int order) const;

 private:
  int nvars_ = 0, m_ = 0, order_ = 0;
  std::vector<Mat> blocks_;
};

// Scalar pseudo-moment vector (s_beta)_{|beta| <= order} in the y variables.
class PseudoMomentVector {
 public:
  PseudoMomentVector() = default;
  PseudoMomentVector(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  double at(const ExponentVector& beta) const;
  void set(const ExponentVector& beta, double v);
  const Vec& values() const { return values_; }
  Vec& values() { return values_; }

 private:
  int nvars_ = 0, order_ = 0;
  Vec values_;
};

struct Atom {
  Vec point;
  Mat weight;
};

// Finitely atomic PSD matrix-valued measure sum_i W_i delta_{x_i}.
struct AtomicMeasure {
  std::vector<Atom> atoms;
};

struct RankInfo {
  int rank = 0;
  double threshold = 0.0;
  Vec singular_values;
};

// Numerical rank via SVD: singular values above max(side) * sigma_max * rel_tol.
RankInfo numerical_rank(const Mat& a, double rel_tol = 1e-9);

// M_d(S): block (alpha, beta) = S_{alpha+beta}; side m * C(n+d, d).
Mat moment_matrix(const MomentSequence& s, int d);
// M_d(GS): block (alpha, beta) = sum_gamma S_{alpha+beta+gamma} kron G_gamma.
Mat localizing_matrix(const MomentSequence& s, const PolyMatrix& g, int d);

// Scalar versions for pseudo-moment vectors in y.
Mat moment_matrix(const PseudoMomentVector& s, int d);
Mat localizing_matrix(const PseudoMomentVector& s, const Polynomial& theta, int d);

// L_S(F) = sum_alpha tr(F_alpha S_alpha).
double riesz(const MomentSequence& s, const PolyMatrix& f);
// L_S(P(y,x)) = sum_beta L_S(P_beta(x)) y^beta.
Polynomial riesz_y_polynomial(const MomentSequence& s, const BiPolyMatrix& p);
// H_s(P(y,x)) = sum_beta P_beta(x) s_beta.
PolyMatrix apply_y_functional(const PseudoMomentVector& s, const BiPolyMatrix& p);
// H_s(f) for a scalar polynomial in y.
double apply_y_functional(const PseudoMomentVector& s, const Polynomial& f);

// S_alpha = sum_i x_i^alpha W_i.
MomentSequence assemble_from_measure(const AtomicMeasure& mu, int order);
// Scalar moments of sum_j lambda_j delta_{y_j}.
PseudoMomentVector assemble_pseudo_moments(const std::vector<Vec>& points, const std::vector<double>& weights,
                                           int order);

// Degree of a polynomial matrix halved and rounded up, ceil(deg/2).
int half_degree(int deg);

}  // namespace pmi
