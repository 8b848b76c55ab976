#include "pmi/polycore.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <numeric>

namespace pmi {

namespace {

std::atomic<bool> g_symmetry_warnings{true};

Mat symmetrized(const Mat& c) {
  if (c.rows() != c.cols()) throw DimensionError("coefficient matrix is not square");
  const double asym = (c - c.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 && g_symmetry_warnings.load()) {
    std::cerr << "warning: symmetrizing coefficient with asymmetry " << asym << "\n";
  }
  return 0.5 * (c + c.transpose());
}

template <class Map>
void accumulate(Map& terms, const ExponentVector& alpha, const Mat& c) {
  auto it = terms.find(alpha);
  if (it == terms.end()) {
    if (!c.isZero(0.0)) terms.emplace(alpha, c);
    return;
  }
  it->second += c;
  if (it->second.isZero(0.0)) terms.erase(it);
}

long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Number of exponent vectors in `vars` variables with total degree exactly `deg`.
long count_exact(int vars, int deg) {
  if (vars == 0) return deg == 0 ? 1 : 0;
  return binom(deg + vars - 1, vars - 1);
}

}  // namespace

int degree(const ExponentVector& a) { return std::accumulate(a.begin(), a.end(), 0); }

ExponentVector exp_add(const ExponentVector& a, const ExponentVector& b) {
  if (a.size() != b.size()) throw DimensionError("exponent length mismatch");
  ExponentVector r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

ExponentVector exp_zero(int n) { return ExponentVector(n, 0); }

ExponentVector exp_unit(int n, int i) {
  ExponentVector e(n, 0);
  e.at(i) = 1;
  return e;
}

bool GradedLess::operator()(const ExponentVector& a, const ExponentVector& b) const {
  const int da = degree(a), db = degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

long num_monomials(int n, int d) { return d < 0 ? 0 : binom(n + d, d); }

std::vector<ExponentVector> monomial_basis(int n, int d) {
  std::vector<ExponentVector> out;
  out.reserve(num_monomials(n, d));
  for (int deg = 0; deg <= d; ++deg) {
    // Descending lexicographic enumeration of exponents of total degree `deg`.
    ExponentVector e(n, 0);
    auto rec = [&](auto&& self, int pos, int rem) -> void {
      if (pos == n - 1 || n == 0) {
        if (n > 0) e[pos] = rem;
        if (n > 0 || rem == 0) out.push_back(e);
        return;
      }
      for (int v = rem; v >= 0; --v) {
        e[pos] = v;
        self(self, pos + 1, rem - v);
      }
      e[pos] = 0;
    };
    rec(rec, 0, deg);
  }
  return out;
}

long mono_index(const ExponentVector& alpha, int d) {
  const int deg = degree(alpha);
  for (int a : alpha)
    if (a < 0) throw DegreeError("negative exponent");
  if (deg > d) throw DegreeError("monomial degree " + std::to_string(deg) + " exceeds bound " + std::to_string(d));
  const int n = static_cast<int>(alpha.size());
  long idx = num_monomials(n, deg - 1);
  // Count same-degree monomials that precede alpha in descending lex order.
  int rem = deg;
  for (int i = 0; i < n - 1; ++i) {
    for (int v = rem; v > alpha[i]; --v) idx += count_exact(n - i - 1, rem - v);
    rem -= alpha[i];
  }
  return idx;
}

double monomial_value(const ExponentVector& alpha, const Vec& point) {
  if (static_cast<long>(alpha.size()) != point.size()) throw DimensionError("point length mismatch");
  double v = 1.0;
  for (size_t i = 0; i < alpha.size(); ++i)
    for (int k = 0; k < alpha[i]; ++k) v *= point[i];
  return v;
}

void set_symmetry_warnings(bool enabled) { g_symmetry_warnings.store(enabled); }

// ---------------------------------------------------------------- Polynomial

Polynomial Polynomial::constant(int nvars, double c) {
  Polynomial p(nvars);
  p.add_term(exp_zero(nvars), c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int i) {
  Polynomial p(nvars);
  p.add_term(exp_unit(nvars, i), 1.0);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [a, c] : terms_) d = std::max(d, pmi::degree(a));
  return d;
}

void Polynomial::add_term(const ExponentVector& alpha, double c) {
  if (static_cast<int>(alpha.size()) != nvars_) throw DimensionError("exponent length does not match nvars");
  for (int a : alpha)
    if (a < 0) throw DegreeError("negative exponent");
  auto it = terms_.find(alpha);
  if (it == terms_.end()) {
    if (c != 0.0) terms_.emplace(alpha, c);
    return;
  }
  it->second += c;
  if (it->second == 0.0) terms_.erase(it);
}

double Polynomial::coeff(const ExponentVector& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::eval(const Vec& point) const {
  double s = 0.0;
  for (const auto& [a, c] : terms_) s += c * monomial_value(a, point);
  return s;
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial d(nvars_);
  for (const auto& [a, c] : terms_) {
    if (a.at(i) == 0) continue;
    ExponentVector b = a;
    b[i] -= 1;
    d.add_term(b, c * a[i]);
  }
  return d;
}

void Polynomial::check_same(const Polynomial& o) const {
  if (o.nvars_ != nvars_) throw DimensionError("polynomials have different variable counts");
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  check_same(o);
  Polynomial r = *this;
  for (const auto& [a, c] : o.terms_) r.add_term(a, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  check_same(o);
  Polynomial r(nvars_);
  for (const auto& [a, c] : terms_)
    for (const auto& [b, d] : o.terms_) r.add_term(exp_add(a, b), c * d);
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial r(nvars_);
  for (const auto& [a, c] : terms_) r.add_term(a, c * s);
  return r;
}

Polynomial operator*(double s, const Polynomial& p) { return p * s; }

// ------------------------------------------------------------- GenPolyMatrix

int GenPolyMatrix::degree() const {
  int d = 0;
  for (const auto& [a, c] : terms_) d = std::max(d, pmi::degree(a));
  return d;
}

void GenPolyMatrix::add_term(const ExponentVector& alpha, const Mat& c) {
  if (static_cast<int>(alpha.size()) != nvars_) throw DimensionError("exponent length does not match nvars");
  if (c.rows() != rows_ || c.cols() != cols_) throw DimensionError("coefficient has wrong shape");
  accumulate(terms_, alpha, c);
}

void GenPolyMatrix::add_entry(const ExponentVector& alpha, int i, int j, double c) {
  Mat e = Mat::Zero(rows_, cols_);
  e(i, j) = c;
  add_term(alpha, e);
}

Mat GenPolyMatrix::coeff(const ExponentVector& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? Mat::Zero(rows_, cols_) : it->second;
}

Mat GenPolyMatrix::eval(const Vec& point) const {
  if (point.size() != nvars_) throw DimensionError("point length does not match nvars");
  Mat r = Mat::Zero(rows_, cols_);
  for (const auto& [a, c] : terms_) r += monomial_value(a, point) * c;
  return r;
}

GenPolyMatrix GenPolyMatrix::transpose() const {
  GenPolyMatrix r(nvars_, cols_, rows_);
  for (const auto& [a, c] : terms_) r.add_term(a, c.transpose());
  return r;
}

GenPolyMatrix GenPolyMatrix::operator+(const GenPolyMatrix& o) const {
  if (o.nvars_ != nvars_ || o.rows_ != rows_ || o.cols_ != cols_) throw DimensionError("shape mismatch in sum");
  GenPolyMatrix r = *this;
  for (const auto& [a, c] : o.terms_) r.add_term(a, c);
  return r;
}

GenPolyMatrix GenPolyMatrix::operator*(const GenPolyMatrix& o) const {
  if (o.nvars_ != nvars_ || cols_ != o.rows_) throw DimensionError("shape mismatch in product");
  GenPolyMatrix r(nvars_, rows_, o.cols_);
  for (const auto& [a, c] : terms_)
    for (const auto& [b, d] : o.terms_) r.add_term(exp_add(a, b), c * d);
  return r;
}

GenPolyMatrix GenPolyMatrix::operator*(double s) const {
  GenPolyMatrix r(nvars_, rows_, cols_);
  for (const auto& [a, c] : terms_) r.add_term(a, c * s);
  return r;
}

// ---------------------------------------------------------------- PolyMatrix

PolyMatrix PolyMatrix::identity(int nvars, int size) { return constant(nvars, Mat::Identity(size, size)); }

PolyMatrix PolyMatrix::constant(int nvars, const Mat& c) {
  PolyMatrix p(nvars, static_cast<int>(c.rows()));
  p.add_term(exp_zero(nvars), c);
  return p;
}

PolyMatrix PolyMatrix::from_polynomial(const Polynomial& q) {
  PolyMatrix p(q.nvars(), 1);
  for (const auto& [a, c] : q.terms()) p.add_entry(a, 0, 0, c);
  return p;
}

PolyMatrix PolyMatrix::from_general(const GenPolyMatrix& g) {
  if (g.rows() != g.cols()) throw DimensionError("polynomial matrix is not square");
  PolyMatrix p(g.nvars(), g.rows());
  for (const auto& [a, c] : g.terms()) p.add_term(a, c);
  return p;
}

PolyMatrix PolyMatrix::from_entries(int nvars, const std::vector<std::vector<Polynomial>>& entries) {
  const int m = static_cast<int>(entries.size());
  PolyMatrix p(nvars, m);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(entries[i].size()) != m) throw DimensionError("entry table is not square");
    for (int j = i; j < m; ++j) {
      if (!(entries[i][j] - entries[j][i]).is_zero()) throw DimensionError("entry table is not symmetric");
      for (const auto& [a, c] : entries[i][j].terms()) p.add_entry(a, i, j, c);
    }
  }
  return p;
}

int PolyMatrix::degree() const {
  int d = 0;
  for (const auto& [a, c] : terms_) d = std::max(d, pmi::degree(a));
  return d;
}

void PolyMatrix::add_term(const ExponentVector& alpha, const Mat& c) {
  if (static_cast<int>(alpha.size()) != nvars_) throw DimensionError("exponent length does not match nvars");
  if (c.rows() != size_ || c.cols() != size_) throw DimensionError("coefficient has wrong size");
  for (int a : alpha)
    if (a < 0) throw DegreeError("negative exponent");
  accumulate(terms_, alpha, symmetrized(c));
}

void PolyMatrix::add_entry(const ExponentVector& alpha, int i, int j, double c) {
  if (i < 0 || j < 0 || i >= size_ || j >= size_) throw DimensionError("entry index out of range");
  Mat e = Mat::Zero(size_, size_);
  e(i, j) = c;
  e(j, i) = c;
  add_term(alpha, e);
}

Mat PolyMatrix::coeff(const ExponentVector& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? Mat::Zero(size_, size_) : it->second;
}

Polynomial PolyMatrix::entry(int i, int j) const {
  Polynomial p(nvars_);
  for (const auto& [a, c] : terms_) p.add_term(a, c(i, j));
  return p;
}

Mat PolyMatrix::eval(const Vec& point) const {
  if (point.size() != nvars_) throw DimensionError("point length does not match nvars");
  Mat r = Mat::Zero(size_, size_);
  for (const auto& [a, c] : terms_) r += monomial_value(a, point) * c;
  return r;
}

GenPolyMatrix PolyMatrix::as_general() const {
  GenPolyMatrix g(nvars_, size_, size_);
  for (const auto& [a, c] : terms_) g.add_term(a, c);
  return g;
}

void PolyMatrix::check_same(const PolyMatrix& o) const {
  if (o.nvars_ != nvars_ || o.size_ != size_) throw DimensionError("polynomial matrices have different shapes");
}

PolyMatrix PolyMatrix::operator+(const PolyMatrix& o) const {
  check_same(o);
  PolyMatrix r = *this;
  for (const auto& [a, c] : o.terms_) accumulate(r.terms_, a, c);
  return r;
}

PolyMatrix PolyMatrix::operator-(const PolyMatrix& o) const { return *this + o * -1.0; }

PolyMatrix PolyMatrix::operator*(double s) const {
  PolyMatrix r(nvars_, size_);
  for (const auto& [a, c] : terms_) accumulate(r.terms_, a, Mat(c * s));
  return r;
}

PolyMatrix PolyMatrix::operator*(const Polynomial& p) const {
  if (p.nvars() != nvars_) throw DimensionError("variable count mismatch");
  PolyMatrix r(nvars_, size_);
  for (const auto& [a, c] : terms_)
    for (const auto& [b, s] : p.terms()) accumulate(r.terms_, exp_add(a, b), Mat(c * s));
  return r;
}

GenPolyMatrix PolyMatrix::operator*(const PolyMatrix& o) const { return as_general() * o.as_general(); }

// -------------------------------------------------------------- BiPolyMatrix

bool BiPolyMatrix::KeyLess::operator()(const Key& a, const Key& b) const {
  GradedLess lt;
  if (lt(a.first, b.first)) return true;
  if (lt(b.first, a.first)) return false;
  return lt(a.second, b.second);
}

int BiPolyMatrix::y_degree() const {
  int d = 0;
  for (const auto& [k, c] : terms_) d = std::max(d, degree(k.first));
  return d;
}

int BiPolyMatrix::x_degree() const {
  int d = 0;
  for (const auto& [k, c] : terms_) d = std::max(d, degree(k.second));
  return d;
}

void BiPolyMatrix::add_term(const ExponentVector& ya, const ExponentVector& xa, const Mat& c) {
  if (static_cast<int>(ya.size()) != ny_ || static_cast<int>(xa.size()) != nx_)
    throw DimensionError("exponent length does not match variable counts");
  if (c.rows() != size_ || c.cols() != size_) throw DimensionError("coefficient has wrong size");
  for (int a : ya)
    if (a < 0) throw DegreeError("negative exponent");
  for (int a : xa)
    if (a < 0) throw DegreeError("negative exponent");
  Key k{ya, xa};
  Mat s = symmetrized(c);
  auto it = terms_.find(k);
  if (it == terms_.end()) {
    if (!s.isZero(0.0)) terms_.emplace(k, s);
    return;
  }
  it->second += s;
  if (it->second.isZero(0.0)) terms_.erase(it);
}

void BiPolyMatrix::add_entry(const ExponentVector& ya, const ExponentVector& xa, int i, int j, double c) {
  if (i < 0 || j < 0 || i >= size_ || j >= size_) throw DimensionError("entry index out of range");
  Mat e = Mat::Zero(size_, size_);
  e(i, j) = c;
  e(j, i) = c;
  add_term(ya, xa, e);
}

std::vector<ExponentVector> BiPolyMatrix::y_support() const {
  std::map<ExponentVector, int, GradedLess> s;
  for (const auto& [k, c] : terms_) s[k.first] = 1;
  std::vector<ExponentVector> out;
  for (const auto& [a, v] : s) out.push_back(a);
  return out;
}

std::vector<ExponentVector> BiPolyMatrix::x_support() const {
  std::map<ExponentVector, int, GradedLess> s;
  for (const auto& [k, c] : terms_) s[k.second] = 1;
  std::vector<ExponentVector> out;
  for (const auto& [a, v] : s) out.push_back(a);
  return out;
}

PolyMatrix BiPolyMatrix::x_part(const ExponentVector& beta) const {
  PolyMatrix p(nx_, size_);
  for (const auto& [k, c] : terms_)
    if (k.first == beta) p.add_term(k.second, c);
  return p;
}

PolyMatrix BiPolyMatrix::y_part(const ExponentVector& alpha) const {
  PolyMatrix p(ny_, size_);
  for (const auto& [k, c] : terms_)
    if (k.second == alpha) p.add_term(k.first, c);
  return p;
}

PolyMatrix BiPolyMatrix::at_y(const Vec& y) const {
  if (y.size() != ny_) throw DimensionError("y length mismatch");
  PolyMatrix p(nx_, size_);
  for (const auto& [k, c] : terms_) p.add_term(k.second, monomial_value(k.first, y) * c);
  return p;
}

PolyMatrix BiPolyMatrix::at_x(const Vec& x) const {
  if (x.size() != nx_) throw DimensionError("x length mismatch");
  PolyMatrix p(ny_, size_);
  for (const auto& [k, c] : terms_) p.add_term(k.first, monomial_value(k.second, x) * c);
  return p;
}

Mat BiPolyMatrix::eval(const Vec& y, const Vec& x) const {
  if (y.size() != ny_ || x.size() != nx_) throw DimensionError("point length mismatch");
  Mat r = Mat::Zero(size_, size_);
  for (const auto& [k, c] : terms_) r += monomial_value(k.first, y) * monomial_value(k.second, x) * c;
  return r;
}

BiPolyMatrix BiPolyMatrix::operator*(double s) const {
  BiPolyMatrix r(ny_, nx_, size_);
  for (const auto& [k, c] : terms_) r.add_term(k.first, k.second, c * s);
  return r;
}

// ------------------------------------------------------------------ helpers

Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

PolyMatrix hessian(const Polynomial& h) {
  const int n = h.nvars();
  PolyMatrix H(n, n);
  for (int i = 0; i < n; ++i) {
    const Polynomial di = h.derivative(i);
    for (int j = i; j < n; ++j) {
      const Polynomial dij = di.derivative(j);
      for (const auto& [a, c] : dij.terms()) H.add_entry(a, i, j, c);
    }
  }
  return H;
}

Mat block_trace(const Mat& c, int m, int q) {
  if (c.rows() != c.cols() || c.rows() != static_cast<long>(m) * q) throw DimensionError("block_trace: side must equal m*q");
  Mat r(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) r(j, k) = c.block(j * q, k * q, q, q).trace();
  return r;
}

Mat bilinear_pairing(const Mat& a, const Mat& b, int m) {
  const int q = static_cast<int>(b.rows());
  if (b.cols() != q || a.rows() != a.cols() || a.rows() != static_cast<long>(m) * q)
    throw DimensionError("bilinear_pairing: size mismatch");
  // Entry (i,j) of Tr_m(A^T (I kron B)) is tr((A_{ji})^T B).
  Mat r(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i, j) = (a.block(j * q, i * q, q, q).transpose() * b).trace();
  return r;
}

PolyMatrix bilinear_pairing(const PolyMatrix& a, const PolyMatrix& b) {
  const int q = b.size();
  if (q == 0 || a.size() % q != 0) throw DimensionError("bilinear_pairing: size mismatch");
  if (a.nvars() != b.nvars()) throw DimensionError("bilinear_pairing: variable count mismatch");
  const int m = a.size() / q;
  PolyMatrix r(a.nvars(), m);
  for (const auto& [alpha, ca] : a.terms())
    for (const auto& [beta, cb] : b.terms()) r.add_term(exp_add(alpha, beta), bilinear_pairing(ca, cb, m));
  return r;
}

PolyMatrix gram_to_polymatrix(const Mat& z, int nvars, int d, int s) {
  const auto basis = monomial_basis(nvars, d);
  const long nb = static_cast<long>(basis.size());
  if (z.rows() != nb * s || z.cols() != nb * s) throw DimensionError("gram_to_polymatrix: Gram side mismatch");
  PolyMatrix p(nvars, s);
  std::map<ExponentVector, Mat, GradedLess> acc;
  for (long a = 0; a < nb; ++a)
    for (long b = 0; b < nb; ++b) {
      auto key = exp_add(basis[a], basis[b]);
      auto it = acc.find(key);
      if (it == acc.end()) it = acc.emplace(key, Mat::Zero(s, s)).first;
      it->second += z.block(a * s, b * s, s, s);
    }
  for (auto& [k, c] : acc) p.add_term(k, 0.5 * (c + c.transpose()));
  return p;
}

}  // namespace pmi
