#pragma once
// Building blocks shared by the relaxation and certification builders:
// (pseudo-)moment variables, moment/localizing LMI blocks, Riesz functionals
// and coefficient matching of Gram-represented SOS matrices.

#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "pmi/builder.hpp"
#include "pmi/momentcone.hpp"

namespace pmi {

// Affine expression sum coef * y_var + constant.
struct AffineExpr {
  std::map<int, double> terms;
  double constant = 0.0;
  void add(int var, double c);  // var < 0 means the constant 1
};

// Placement of a (pseudo-)moment sequence S_alpha, |alpha| <= order, of
// symmetric m x m matrices among the SDP variables. With unit_zero the
// zeroth moment is the constant 1 (scalar sequences normalized by H(1) = 1).
struct MomentLayout {
  int nvars = 0, m = 1, order = 0;
  int first = 0;
  bool unit_zero = false;

  // Variable index of S_alpha(i,j), or -1 for the fixed unit entry.
  int var(long alpha_idx, int i, int j) const;
  int count() const;  // number of SDP variables used
  MomentSequence extract(const Vec& y) const;
  PseudoMomentVector extract_scalar(const Vec& y) const;
};

MomentLayout add_moment_vars(SdpBuilder& b, int nvars, int m, int order, bool unit_zero = false);
// Block M_d(S) >= 0.
int add_moment_block(SdpBuilder& b, const MomentLayout& s, int d);
// Block M_d(GS) >= 0 with rows ordered (alpha, i, u) as in S kron G.
int add_localizing_block(SdpBuilder& b, const MomentLayout& s, const PolyMatrix& g, int d);
// L_S(F) as an affine expression in the moment variables.
AffineExpr riesz_expr(const MomentLayout& s, const PolyMatrix& f);

// Lazily created equality rows indexed by (monomial, i, j) with i <= j:
// "coefficient of x^alpha in entry (i,j) of the collected identity is zero".
class CoefficientRows {
 public:
  explicit CoefficientRows(SdpBuilder& b) : b_(b) {}
  int row(const ExponentVector& alpha, int i, int j);
  void add_var(const ExponentVector& alpha, int i, int j, int var, double c);
  void add_const(const ExponentVector& alpha, int i, int j, double c);
  // Adds sign * F(x) entrywise (i <= j).
  void add_polymatrix(const PolyMatrix& f, double sign);
  // Adds the affine expression "expr" to the (alpha, i, j) row.
  void add_expr(const ExponentVector& alpha, int i, int j, const AffineExpr& e, double sign);

 private:
  struct KeyLess {
    bool operator()(const std::tuple<ExponentVector, int, int>& a,
                    const std::tuple<ExponentVector, int, int>& b) const;
  };
  SdpBuilder& b_;
  std::map<std::tuple<ExponentVector, int, int>, int, KeyLess> rows_;
};

// Adds sign * (u_d(x) kron I_m)^T Z (u_d(x) kron I_m) to the rows (Z is m*N_d square).
void add_gram_sum(CoefficientRows& rows, const SdpBuilder::SymVar& z, int nvars, int d, int m, double sign);
// Adds sign * (Sigma_1, G)_m with Sigma_1 = (u_d kron I_{mq})^T Z (u_d kron I_{mq}).
void add_gram_localized(CoefficientRows& rows, const SdpBuilder::SymVar& z, const PolyMatrix& g, int nvars,
                        int d, int m, double sign);

// Reconstructs a Gram matrix variable from a solution vector.
Mat extract_sym(const SdpBuilder::SymVar& z, const Vec& y);

}  // namespace pmi
