#include "pmi/encode.hpp"

namespace pmi {

void AffineExpr::add(int var, double c) {
  if (c == 0.0) return;
  if (var < 0)
    constant += c;
  else
    terms[var] += c;
}

int MomentLayout::var(long alpha_idx, int i, int j) const {
  if (i > j) std::swap(i, j);
  if (unit_zero) return alpha_idx == 0 ? -1 : first + static_cast<int>(alpha_idx) - 1;
  const int per = m * (m + 1) / 2;
  return first + static_cast<int>(alpha_idx) * per + j * (j + 1) / 2 + i;
}

int MomentLayout::count() const {
  const long n = num_monomials(nvars, order);
  return unit_zero ? static_cast<int>(n - 1) : static_cast<int>(n) * m * (m + 1) / 2;
}

MomentSequence MomentLayout::extract(const Vec& y) const {
  MomentSequence s(nvars, m, order);
  const long n = num_monomials(nvars, order);
  for (long a = 0; a < n; ++a) {
    Mat blk(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const int v = var(a, i, j);
        blk(i, j) = v < 0 ? 1.0 : y[v];
      }
    s.set_block(a, blk);
  }
  return s;
}

PseudoMomentVector MomentLayout::extract_scalar(const Vec& y) const {
  if (m != 1) throw DimensionError("extract_scalar needs a scalar layout");
  PseudoMomentVector s(nvars, order);
  const long n = num_monomials(nvars, order);
  for (long a = 0; a < n; ++a) {
    const int v = var(a, 0, 0);
    s.values()[a] = v < 0 ? 1.0 : y[v];
  }
  return s;
}

MomentLayout add_moment_vars(SdpBuilder& b, int nvars, int m, int order, bool unit_zero) {
  if (unit_zero && m != 1) throw DimensionError("unit-normalized moments must be scalar");
  MomentLayout s;
  s.nvars = nvars;
  s.m = m;
  s.order = order;
  s.unit_zero = unit_zero;
  s.first = b.nvars();
  const int cnt = s.count();
  for (int i = 0; i < cnt; ++i) b.add_var();
  return s;
}

namespace {

void put(SdpBuilder& b, int blk, int r, int c, int var, double coef) {
  if (coef == 0.0) return;
  if (var < 0)
    b.block_const(blk, r, c, coef);
  else
    b.block_var(blk, r, c, var, coef);
}

}  // namespace

int add_moment_block(SdpBuilder& b, const MomentLayout& s, int d) {
  const auto basis = monomial_basis(s.nvars, d);
  const int n = static_cast<int>(basis.size());
  const int m = s.m;
  const int blk = b.add_block(m * n);
  for (int a = 0; a < n; ++a)
    for (int c = a; c < n; ++c) {
      const long idx = mono_index(exp_add(basis[a], basis[c]), s.order);
      for (int i = 0; i < m; ++i)
        for (int j = (a == c ? i : 0); j < m; ++j) put(b, blk, a * m + i, c * m + j, s.var(idx, i, j), 1.0);
    }
  return blk;
}

int add_localizing_block(SdpBuilder& b, const MomentLayout& s, const PolyMatrix& g, int d) {
  const auto basis = monomial_basis(s.nvars, d);
  const int n = static_cast<int>(basis.size());
  const int m = s.m, q = g.size(), mq = m * q;
  const int blk = b.add_block(mq * n);
  for (int a = 0; a < n; ++a)
    for (int c = a; c < n; ++c) {
      const auto ab = exp_add(basis[a], basis[c]);
      for (const auto& [gamma, gc] : g.terms()) {
        const long idx = mono_index(exp_add(ab, gamma), s.order);
        for (int i = 0; i < m; ++i)
          for (int u = 0; u < q; ++u) {
            const int r = a * mq + i * q + u;
            for (int j = 0; j < m; ++j)
              for (int v = 0; v < q; ++v) {
                const int col = c * mq + j * q + v;
                if (r > col) continue;
                put(b, blk, r, col, s.var(idx, i, j), gc(u, v));
              }
          }
      }
    }
  return blk;
}

AffineExpr riesz_expr(const MomentLayout& s, const PolyMatrix& f) {
  if (f.size() != s.m) throw DimensionError("riesz_expr: size mismatch");
  AffineExpr e;
  for (const auto& [alpha, c] : f.terms()) {
    const long idx = mono_index(alpha, s.order);
    for (int i = 0; i < s.m; ++i) {
      e.add(s.var(idx, i, i), c(i, i));
      for (int j = i + 1; j < s.m; ++j) e.add(s.var(idx, i, j), c(i, j) + c(j, i));
    }
  }
  return e;
}

bool CoefficientRows::KeyLess::operator()(const std::tuple<ExponentVector, int, int>& a,
                                          const std::tuple<ExponentVector, int, int>& b) const {
  GradedLess less;
  if (less(std::get<0>(a), std::get<0>(b))) return true;
  if (less(std::get<0>(b), std::get<0>(a))) return false;
  return std::make_pair(std::get<1>(a), std::get<2>(a)) < std::make_pair(std::get<1>(b), std::get<2>(b));
}

int CoefficientRows::row(const ExponentVector& alpha, int i, int j) {
  if (i > j) std::swap(i, j);
  auto key = std::make_tuple(alpha, i, j);
  auto it = rows_.find(key);
  if (it != rows_.end()) return it->second;
  const int r = b_.add_equality();
  rows_.emplace(std::move(key), r);
  return r;
}

void CoefficientRows::add_var(const ExponentVector& alpha, int i, int j, int var, double c) {
  if (c == 0.0) return;
  if (var < 0)
    b_.eq_const(row(alpha, i, j), c);
  else
    b_.eq_var(row(alpha, i, j), var, c);
}

void CoefficientRows::add_const(const ExponentVector& alpha, int i, int j, double c) {
  if (c == 0.0) return;
  b_.eq_const(row(alpha, i, j), c);
}

void CoefficientRows::add_polymatrix(const PolyMatrix& f, double sign) {
  for (const auto& [alpha, c] : f.terms())
    for (int j = 0; j < f.size(); ++j)
      for (int i = 0; i <= j; ++i) add_const(alpha, i, j, sign * c(i, j));
}

void CoefficientRows::add_expr(const ExponentVector& alpha, int i, int j, const AffineExpr& e, double sign) {
  for (const auto& [v, c] : e.terms) add_var(alpha, i, j, v, sign * c);
  add_const(alpha, i, j, sign * e.constant);
}

void add_gram_sum(CoefficientRows& rows, const SdpBuilder::SymVar& z, int nvars, int d, int m, double sign) {
  const auto basis = monomial_basis(nvars, d);
  const int n = static_cast<int>(basis.size());
  if (z.side != m * n) throw DimensionError("add_gram_sum: Gram side mismatch");
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      const auto alpha = exp_add(basis[a], basis[c]);
      for (int j = 0; j < m; ++j)
        for (int i = 0; i <= j; ++i) rows.add_var(alpha, i, j, z.var(a * m + i, c * m + j), sign);
    }
}

void add_gram_localized(CoefficientRows& rows, const SdpBuilder::SymVar& z, const PolyMatrix& g, int nvars,
                        int d, int m, double sign) {
  const auto basis = monomial_basis(nvars, d);
  const int n = static_cast<int>(basis.size());
  const int q = g.size(), mq = m * q;
  if (z.side != mq * n) throw DimensionError("add_gram_localized: Gram side mismatch");
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      const auto ab = exp_add(basis[a], basis[c]);
      for (const auto& [gamma, gc] : g.terms()) {
        const auto alpha = exp_add(ab, gamma);
        for (int j = 0; j < m; ++j)
          for (int i = 0; i <= j; ++i)
            for (int u = 0; u < q; ++u)
              for (int v = 0; v < q; ++v)
                if (gc(u, v) != 0.0)
                  rows.add_var(alpha, i, j, z.var(a * mq + i * q + u, c * mq + j * q + v), sign * gc(u, v));
      }
    }
}

Mat extract_sym(const SdpBuilder::SymVar& z, const Vec& y) {
  Mat out(z.side, z.side);
  for (int j = 0; j < z.side; ++j)
    for (int i = 0; i <= j; ++i) out(i, j) = out(j, i) = y[z.var(i, j)];
  return out;
}

}  // namespace pmi
