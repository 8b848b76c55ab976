#include "pmi/hierarchy.hpp"

#include <algorithm>
#include <string>

namespace pmi {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::SosConvex: return "sos-convex";
    case Mode::Convex: return "convex";
    case Mode::Linear: return "linear";
    case Mode::Eigmin: return "eigmin";
    case Mode::Nonconvex: return "nonconvex";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  for (Mode m : {Mode::SosConvex, Mode::Convex, Mode::Linear, Mode::Eigmin, Mode::Nonconvex})
    if (to_string(m) == s) return m;
  throw Error("unknown mode '" + s + "'");
}

void RpmioProblem::validate() const {
  if (nx < 1) throw DimensionError("nx must be positive");
  if (G.size() > 0 && G.nvars() != nx) throw DimensionError("G must be a polynomial matrix in x");
  if (mode == Mode::Eigmin) {
    if (F.size() < 1 || F.nvars() != nx) throw DimensionError("F must be a non-empty polynomial matrix in x");
    return;
  }
  if (ny < 1) throw DimensionError("ny must be positive");
  if (f.nvars() != ny) throw DimensionError("f must be a polynomial in y");
  for (const auto& t : theta)
    if (t.nvars() != ny) throw DimensionError("theta entries must be polynomials in y");
  if (P.size() < 1 || P.ny() != ny || P.nx() != nx) throw DimensionError("P must be a non-empty matrix in (y, x)");
  if (mode == Mode::Linear) {
    if (f.degree() > 1) throw DegreeError("linear mode needs an affine objective");
    if (P.y_degree() > 1) throw DegreeError("linear mode needs P affine in y");
    if (!theta.empty()) throw Error("linear mode does not take constraints on y");
  }
}

DegreeProfile degree_profile(const RpmioProblem& p) {
  DegreeProfile d;
  d.d_G = p.G.size() > 0 ? half_degree(p.G.degree()) : 0;
  if (p.mode == Mode::Eigmin) {
    d.k_x = std::max(p.F.degree(), p.G.size() > 0 ? p.G.degree() : 0);
    return d;
  }
  d.k_y = std::max(p.f.degree(), p.P.y_degree());
  for (const auto& t : p.theta) {
    d.k_y = std::max(d.k_y, t.degree());
    d.d_Theta = std::max(d.d_Theta, half_degree(t.degree()));
  }
  d.k_x = std::max(p.P.x_degree(), p.G.size() > 0 ? p.G.degree() : 0);
  return d;
}

int minimal_order(const RpmioProblem& p) {
  const auto d = degree_profile(p);
  int k = std::max({1, half_degree(d.k_x), d.d_G});
  if (p.mode == Mode::Convex || p.mode == Mode::Nonconvex) k = std::max(k, half_degree(d.k_y));
  return k;
}

PseudoMomentVector Relaxation::pseudo_moments(const Vec& dual_y) const {
  if (!s) throw Error("relaxation has no pseudo-moments in y");
  return s->extract_scalar(dual_y);
}

namespace {

const ExponentVector& key_y(const BiPolyMatrix::TermMap::value_type& t) { return t.first.first; }
const ExponentVector& key_x(const BiPolyMatrix::TermMap::value_type& t) { return t.first.second; }

// Moment side in x shared by all primals: variables S, block M_k(S) and M_{k-d_G}(GS).
MomentLayout moment_side(SdpBuilder& b, int nx, int m, const PolyMatrix& G, int k) {
  auto S = add_moment_vars(b, nx, m, 2 * k);
  add_moment_block(b, S, k);
  const int dG = G.size() > 0 ? half_degree(G.degree()) : 0;
  if (G.size() > 0 && k >= dG) add_localizing_block(b, S, G, k - dG);
  return S;
}

// SOS side in x shared by all duals: rows -= Sigma_0 + (Sigma_1, G)_m.
void sos_side(SdpBuilder& b, CoefficientRows& rows, int nx, int m, const PolyMatrix& G, int k) {
  const auto z0 = b.add_sym_matrix(m * static_cast<int>(num_monomials(nx, k)));
  b.add_psd(z0);
  add_gram_sum(rows, z0, nx, k, m, -1.0);
  if (G.size() == 0) return;
  const int dG = half_degree(G.degree());
  if (k < dG) return;
  const auto z1 = b.add_sym_matrix(m * G.size() * static_cast<int>(num_monomials(nx, k - dG)));
  b.add_psd(z1);
  add_gram_localized(rows, z1, G, nx, k - dG, m, -1.0);
}

void check_order(const RpmioProblem& p, const DegreeProfile& d, int k, int t) {
  if (k < std::max(half_degree(d.k_x), d.d_G))
    throw DegreeError("relaxation order " + std::to_string(k) + " is below ceil(k_x/2) = " +
                      std::to_string(std::max(half_degree(d.k_x), d.d_G)));
  if (2 * t < d.k_y) throw DegreeError("y-side order too small for the problem data");
  (void)p;
}

Relaxation build_rpmio(const RpmioProblem& p, int k, int t, Mode mode) {
  p.validate();
  Relaxation r;
  r.mode = mode;
  r.k = k;
  r.t_y = t;
  r.profile = degree_profile(p);
  check_order(p, r.profile, k, t);
  const int m = p.P.size();
  const int ny = p.ny, nx = p.nx;

  {  // primal: sup rho s.t. f - rho - L_S(P) in Q_t(Theta), S in M_k(G)
    SdpBuilder b;
    b.sense(Sense::Maximize);
    r.scalar_var = b.add_var();
    b.objective(r.scalar_var, 1.0);
    r.S = moment_side(b, nx, m, p.G, k);
    CoefficientRows rows(b);
    for (const auto& [beta, c] : p.f.terms()) rows.add_const(beta, 0, 0, c);
    rows.add_var(exp_zero(ny), 0, 0, r.scalar_var, -1.0);
    for (const auto& term : p.P.terms()) {
      const auto& c = term.second;
      const long idx = mono_index(key_x(term), r.S.order);
      for (int i = 0; i < m; ++i) {
        rows.add_var(key_y(term), 0, 0, r.S.var(idx, i, i), -c(i, i));
        for (int j = i + 1; j < m; ++j) rows.add_var(key_y(term), 0, 0, r.S.var(idx, i, j), -(c(i, j) + c(j, i)));
      }
    }
    const auto z0 = b.add_sym_matrix(static_cast<int>(num_monomials(ny, t)));
    b.add_psd(z0);
    add_gram_sum(rows, z0, ny, t, 1, -1.0);
    for (const auto& th : p.theta) {
      const int dj = half_degree(th.degree());
      if (t < dj) continue;
      const auto zj = b.add_sym_matrix(static_cast<int>(num_monomials(ny, t - dj)));
      b.add_psd(zj);
      add_gram_localized(rows, zj, PolyMatrix::from_polynomial(th), ny, t - dj, 1, -1.0);
    }
    r.primal = b.build();
  }
  {  // dual: inf H_s(f) s.t. s in M_t(Theta), H_s(P) in Q_k(G)
    SdpBuilder b;
    b.sense(Sense::Minimize);
    auto s = add_moment_vars(b, ny, 1, 2 * t, true);
    add_moment_block(b, s, t);
    for (const auto& th : p.theta) {
      const int dj = half_degree(th.degree());
      if (t >= dj) add_localizing_block(b, s, PolyMatrix::from_polynomial(th), t - dj);
    }
    const auto obj = riesz_expr(s, PolyMatrix::from_polynomial(p.f));
    for (const auto& [v, c] : obj.terms) b.objective(v, c);
    b.objective_offset(obj.constant);
    CoefficientRows rows(b);
    for (const auto& term : p.P.terms()) {
      const int v = s.var(mono_index(key_y(term), s.order), 0, 0);
      for (int j = 0; j < m; ++j)
        for (int i = 0; i <= j; ++i) rows.add_var(key_x(term), i, j, v, term.second(i, j));
    }
    sos_side(b, rows, nx, m, p.G, k);
    r.s = s;
    r.dual = b.build();
  }
  return r;
}

}  // namespace

Relaxation build_sos_convex(const RpmioProblem& p, int k) {
  const auto d = degree_profile(p);
  return build_rpmio(p, k, std::max(1, half_degree(d.k_y)), Mode::SosConvex);
}

Relaxation build_convex(const RpmioProblem& p, int k) {
  const auto d = degree_profile(p);
  if (k < half_degree(d.k_y)) throw DegreeError("relaxation order is below ceil(k_y/2)");
  return build_rpmio(p, k, k, p.mode == Mode::Nonconvex ? Mode::Nonconvex : Mode::Convex);
}

Relaxation build_rpsdp(const Vec& c, const std::vector<PolyMatrix>& pmats, const PolyMatrix& G, int k) {
  if (pmats.empty()) throw DimensionError("build_rpsdp needs at least P_0");
  const int l = static_cast<int>(c.size());
  if (static_cast<int>(pmats.size()) != l + 1) throw DimensionError("build_rpsdp: need l+1 matrices for l costs");
  const int m = pmats[0].size(), nx = pmats[0].nvars();
  int kx = G.size() > 0 ? G.degree() : 0;
  for (const auto& pm : pmats) {
    if (pm.size() != m || pm.nvars() != nx) throw DimensionError("build_rpsdp: inconsistent P_i");
    kx = std::max(kx, pm.degree());
  }
  const int dG = G.size() > 0 ? half_degree(G.degree()) : 0;
  if (k < std::max(half_degree(kx), dG)) throw DegreeError("relaxation order is below ceil(k_x/2)");

  Relaxation r;
  r.mode = Mode::Linear;
  r.k = k;
  r.profile.k_x = kx;
  r.profile.k_y = 1;
  r.profile.d_G = dG;
  {
    SdpBuilder b;
    b.sense(Sense::Maximize);
    r.S = moment_side(b, nx, m, G, k);
    const auto obj = riesz_expr(r.S, pmats[0]);
    for (const auto& [v, cc] : obj.terms) b.objective(v, cc);
    b.objective_offset(obj.constant);
    for (int i = 0; i < l; ++i) {
      const auto e = riesz_expr(r.S, pmats[i + 1]);
      const int row = b.add_equality();
      for (const auto& [v, cc] : e.terms) b.eq_var(row, v, cc);
      b.eq_const(row, e.constant - c[i]);
    }
    r.primal = b.build();
  }
  {
    SdpBuilder b;
    b.sense(Sense::Minimize);
    CoefficientRows rows(b);
    for (int i = 0; i < l; ++i) {
      const int v = b.add_var();
      r.y_vars.push_back(v);
      b.objective(v, c[i]);
      for (const auto& [alpha, cc] : pmats[i + 1].terms())
        for (int jj = 0; jj < m; ++jj)
          for (int ii = 0; ii <= jj; ++ii) rows.add_var(alpha, ii, jj, v, cc(ii, jj));
    }
    rows.add_polymatrix(pmats[0], -1.0);
    sos_side(b, rows, nx, m, G, k);
    r.dual = b.build();
  }
  return r;
}

Relaxation build_eigmin(const PolyMatrix& F, const PolyMatrix& G, int k) {
  const int m = F.size(), nx = F.nvars();
  const int kx = std::max(F.degree(), G.size() > 0 ? G.degree() : 0);
  const int dG = G.size() > 0 ? half_degree(G.degree()) : 0;
  if (k < std::max(half_degree(kx), dG)) throw DegreeError("relaxation order is below ceil(k_x/2)");
  Relaxation r;
  r.mode = Mode::Eigmin;
  r.k = k;
  r.profile.k_x = kx;
  r.profile.d_G = dG;
  {  // inf L_S(F) s.t. L_S(I) = 1
    SdpBuilder b;
    b.sense(Sense::Minimize);
    r.S = moment_side(b, nx, m, G, k);
    const auto obj = riesz_expr(r.S, F);
    for (const auto& [v, c] : obj.terms) b.objective(v, c);
    b.objective_offset(obj.constant);
    const auto tr = riesz_expr(r.S, PolyMatrix::identity(nx, m));
    const int row = b.add_equality();
    for (const auto& [v, c] : tr.terms) b.eq_var(row, v, c);
    b.eq_const(row, -1.0);
    r.primal = b.build();
  }
  {  // sup lambda s.t. F - lambda I in Q_k(G)
    SdpBuilder b;
    b.sense(Sense::Maximize);
    CoefficientRows rows(b);
    r.scalar_var = b.add_var();
    b.objective(r.scalar_var, 1.0);
    rows.add_polymatrix(F, 1.0);
    for (int i = 0; i < m; ++i) rows.add_var(exp_zero(nx), i, i, r.scalar_var, -1.0);
    sos_side(b, rows, nx, m, G, k);
    r.dual = b.build();
  }
  return r;
}

Relaxation build_relaxation(const RpmioProblem& p, int k) {
  p.validate();
  switch (p.mode) {
    case Mode::SosConvex: return build_sos_convex(p, k);
    case Mode::Convex:
    case Mode::Nonconvex: return build_convex(p, k);
    case Mode::Eigmin: return build_eigmin(p.F, p.G, k);
    case Mode::Linear: {
      // f = c_0 + c^T y and P = P'_0(x) + sum_i y_i P_i(x): the RPSDP data are
      // P_0 = -P'_0 and the costs c, with c_0 carried as an objective offset.
      Vec c(p.ny);
      for (int i = 0; i < p.ny; ++i) c[i] = p.f.coeff(exp_unit(p.ny, i));
      std::vector<PolyMatrix> pm(p.ny + 1, PolyMatrix(p.nx, p.P.size()));
      pm[0] = -p.P.x_part(exp_zero(p.ny));
      for (int i = 0; i < p.ny; ++i) pm[i + 1] = p.P.x_part(exp_unit(p.ny, i));
      auto r = build_rpsdp(c, pm, p.G, k);
      const double c0 = p.f.coeff(exp_zero(p.ny));
      r.primal.offset += c0;
      r.dual.offset += c0;
      r.profile = degree_profile(p);
      return r;
    }
  }
  throw Error("unreachable mode");
}

}  // namespace pmi
