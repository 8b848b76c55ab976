#pragma once
// Multivariate polynomials and symmetric polynomial matrices in the graded
// monomial order 1, x1, ..., xn, x1^2, x1 x2, ..., xn^d used everywhere in the
// library (Gram matrices, moment matrices and coefficient matching all share it).

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace pmi {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Base class of all library errors; `what()` carries a human-readable reason.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DimensionError : public Error {
 public:
  using Error::Error;
};
class DegreeError : public Error {
 public:
  using Error::Error;
};

// Exponent vector alpha in N^n; x^alpha = prod x_i^alpha_i.
using ExponentVector = std::vector<int>;

int degree(const ExponentVector& a);
ExponentVector exp_add(const ExponentVector& a, const ExponentVector& b);
ExponentVector exp_zero(int n);
ExponentVector exp_unit(int n, int i);

// Strict weak order matching the basis order: lower total degree first, then
// lexicographically descending (x1^2 before x1 x2 before x2^2).
struct GradedLess {
  bool operator()(const ExponentVector& a, const ExponentVector& b) const;
};

// Number of monomials of degree <= d in n variables, C(n+d, d).
long num_monomials(int n, int d);

// Basis u_d(x) as a list of exponent vectors in canonical order.
std::vector<ExponentVector> monomial_basis(int n, int d);

// 0-based position of x^alpha in u_d(x). Throws DegreeError if |alpha| > d.
long mono_index(const ExponentVector& alpha, int d);

// x^alpha evaluated at a point.
double monomial_value(const ExponentVector& alpha, const Vec& point);

// Enables/disables the stderr warning emitted when an asymmetric coefficient
// is symmetrized. Enabled by default.
void set_symmetry_warnings(bool enabled);

class Polynomial {
 public:
  using TermMap = std::map<ExponentVector, double, GradedLess>;

  explicit Polynomial(int nvars = 0) : nvars_(nvars) {}
  static Polynomial constant(int nvars, double c);
  static Polynomial variable(int nvars, int i);

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // Total degree; the zero polynomial has degree 0.
  int degree() const;

  // Accumulates c into the coefficient of x^alpha; exact zeros are pruned.
  void add_term(const ExponentVector& alpha, double c);
  double coeff(const ExponentVector& alpha) const;

  double eval(const Vec& point) const;
  Polynomial derivative(int i) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;
  Polynomial operator-() const { return *this * -1.0; }

 private:
  void check_same(const Polynomial& o) const;
  int nvars_;
  TermMap terms_;
};

Polynomial operator*(double s, const Polynomial& p);

// General (rectangular, not necessarily symmetric) polynomial matrix. Used for
// factors T(x) and for products of symmetric polynomial matrices.
class GenPolyMatrix {
 public:
  using TermMap = std::map<ExponentVector, Mat, GradedLess>;

  GenPolyMatrix(int nvars, int rows, int cols) : nvars_(nvars), rows_(rows), cols_(cols) {}

  int nvars() const { return nvars_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const TermMap& terms() const { return terms_; }
  int degree() const;

  void add_term(const ExponentVector& alpha, const Mat& c);
  void add_entry(const ExponentVector& alpha, int i, int j, double c);
  Mat coeff(const ExponentVector& alpha) const;

  Mat eval(const Vec& point) const;
  GenPolyMatrix transpose() const;

  GenPolyMatrix operator+(const GenPolyMatrix& o) const;
  GenPolyMatrix operator*(const GenPolyMatrix& o) const;
  GenPolyMatrix operator*(double s) const;

 private:
  int nvars_, rows_, cols_;
  TermMap terms_;
};

// Symmetric polynomial matrix M(x) = sum_alpha M_alpha x^alpha, M_alpha in S^m.
class PolyMatrix {
 public:
  using TermMap = std::map<ExponentVector, Mat, GradedLess>;

  PolyMatrix(int nvars = 0, int size = 0) : nvars_(nvars), size_(size) {}
  static PolyMatrix identity(int nvars, int size);
  static PolyMatrix constant(int nvars, const Mat& c);
  // Scalar polynomial as a 1x1 polynomial matrix.
  static PolyMatrix from_polynomial(const Polynomial& p);
  // Symmetrizes a square general polynomial matrix.
  static PolyMatrix from_general(const GenPolyMatrix& g);
  // Builds from entries; entries[i][j] must equal entries[j][i].
  static PolyMatrix from_entries(int nvars, const std::vector<std::vector<Polynomial>>& entries);

  int nvars() const { return nvars_; }
  int size() const { return size_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  // Accumulates a symmetric coefficient (symmetrized, with a warning above 1e-12).
  void add_term(const ExponentVector& alpha, const Mat& c);
  // Accumulates c into entries (i,j) and (j,i) (once when i == j).
  void add_entry(const ExponentVector& alpha, int i, int j, double c);
  Mat coeff(const ExponentVector& alpha) const;
  Polynomial entry(int i, int j) const;

  Mat eval(const Vec& point) const;
  GenPolyMatrix as_general() const;

  PolyMatrix operator+(const PolyMatrix& o) const;
  PolyMatrix operator-(const PolyMatrix& o) const;
  PolyMatrix operator*(double s) const;
  PolyMatrix operator-() const { return *this * -1.0; }
  // Product with a scalar polynomial.
  PolyMatrix operator*(const Polynomial& p) const;
  GenPolyMatrix operator*(const PolyMatrix& o) const;

 private:
  void check_same(const PolyMatrix& o) const;
  int nvars_, size_;
  TermMap terms_;
};

// Symmetric polynomial matrix in two groups of variables, P(y, x).
class BiPolyMatrix {
 public:
  using Key = std::pair<ExponentVector, ExponentVector>;  // (y-exponent, x-exponent)
  struct KeyLess {
    bool operator()(const Key& a, const Key& b) const;
  };
  using TermMap = std::map<Key, Mat, KeyLess>;

  BiPolyMatrix(int ny = 0, int nx = 0, int size = 0) : ny_(ny), nx_(nx), size_(size) {}

  int ny() const { return ny_; }
  int nx() const { return nx_; }
  int size() const { return size_; }
  const TermMap& terms() const { return terms_; }
  int y_degree() const;
  int x_degree() const;

  void add_term(const ExponentVector& ya, const ExponentVector& xa, const Mat& c);
  void add_entry(const ExponentVector& ya, const ExponentVector& xa, int i, int j, double c);

  // y-exponents (resp. x-exponents) appearing in the support.
  std::vector<ExponentVector> y_support() const;
  std::vector<ExponentVector> x_support() const;
  // P_beta(x): coefficient of y^beta, a polynomial matrix in x.
  PolyMatrix x_part(const ExponentVector& beta) const;
  // P_alpha(y): coefficient of x^alpha, a polynomial matrix in y.
  PolyMatrix y_part(const ExponentVector& alpha) const;
  // P(y0, x) and P(y, x0).
  PolyMatrix at_y(const Vec& y) const;
  PolyMatrix at_x(const Vec& x) const;
  Mat eval(const Vec& y, const Vec& x) const;

  BiPolyMatrix operator*(double s) const;
  BiPolyMatrix operator-() const { return *this * -1.0; }

 private:
  int ny_, nx_, size_;
  TermMap terms_;
};

// Kronecker product a kron b.
Mat kron(const Mat& a, const Mat& b);

// Hessian of a scalar polynomial as a symmetric polynomial matrix.
PolyMatrix hessian(const Polynomial& h);

// Tr_m(C): m x m matrix of traces of the q x q blocks of C (side m*q).
Mat block_trace(const Mat& c, int m, int q);

// (A, B)_m = Tr_m(A^T (I_m kron B)) for constant matrices.
Mat bilinear_pairing(const Mat& a, const Mat& b, int m);
// Same for polynomial matrices; A has side m*q, B has side q.
PolyMatrix bilinear_pairing(const PolyMatrix& a, const PolyMatrix& b);

// Symmetric polynomial matrix (u_d(x) kron I_s)^T Z (u_d(x) kron I_s).
PolyMatrix gram_to_polymatrix(const Mat& z, int nvars, int d, int s);

}  // namespace pmi
