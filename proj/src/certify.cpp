#include "pmi/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace pmi {

namespace {

double max_abs_coeff(const PolyMatrix& m) {
  double s = 0.0;
  for (const auto& [alpha, c] : m.terms()) s = std::max(s, c.cwiseAbs().maxCoeff());
  return s;
}

// Maximizes lambda <= 1 subject to every Gram block minus lambda I being PSD;
// the problem always has an interior, and lambda* >= 0 certifies membership.
int add_margin(SdpBuilder& b) {
  const int lam = b.add_var();
  b.objective(lam, 1.0);
  const int cap = b.add_block(1);
  b.block_const(cap, 0, 0, 1.0);
  b.block_var(cap, 0, 0, lam, -1.0);
  return lam;
}

void add_shifted_psd(SdpBuilder& b, const SdpBuilder::SymVar& z, int lam) {
  const int blk = b.add_block(z.side);
  for (int j = 0; j < z.side; ++j) {
    for (int i = 0; i <= j; ++i) b.block_var(blk, i, j, z.var(i, j), 1.0);
    b.block_var(blk, j, j, lam, -1.0);
  }
}

}  // namespace

SosMatrixResult certify_sos_matrix(const PolyMatrix& M, const CertifySettings& cs) {
  SosMatrixResult res;
  const int deg = M.degree();
  if (deg % 2 != 0) return res;
  const int n = M.nvars(), q = M.size(), d = deg / 2;
  const double scale = max_abs_coeff(M);
  if (scale == 0.0) {
    res.certified = true;
    res.gram = Mat::Zero(q * num_monomials(n, d), q * num_monomials(n, d));
    return res;
  }
  const PolyMatrix ms = M * (1.0 / scale);

  SdpBuilder b;
  b.sense(Sense::Maximize);
  const int lam = add_margin(b);
  const auto z = b.add_sym_matrix(q * static_cast<int>(num_monomials(n, d)));
  add_shifted_psd(b, z, lam);
  CoefficientRows rows(b);
  rows.add_polymatrix(ms, 1.0);
  add_gram_sum(rows, z, n, d, q, -1.0);
  const auto sol = solve(b.build(), cs.sdp);

  res.margin = sol.y[lam];
  const Mat gram = extract_sym(z, sol.y) * scale;
  const PolyMatrix diff = gram_to_polymatrix(gram, n, d, q) - M;
  res.reconstruction_error = max_abs_coeff(diff);
  res.certified = res.margin >= -cs.tol && res.reconstruction_error <= 1e-7 * std::max(1.0, scale);
  if (res.certified) res.gram = gram;
  return res;
}

bool certify_sos_convex(const Polynomial& h, const CertifySettings& cs) {
  return certify_sos_matrix(hessian(h), cs).certified;
}

bool certify_uniform_psd_sos_convex(const PolyMatrix& Q, const CertifySettings& cs) {
  const int l = Q.nvars(), m = Q.size();
  if (Q.degree() <= 2) {
    // Constant Hessian: the ml x ml matrix [Q_ij] must be PSD.
    Mat blocks = Mat::Zero(m * l, m * l);
    for (int i = 0; i < l; ++i)
      for (int j = i; j < l; ++j) {
        const Mat c = Q.coeff(exp_add(exp_unit(l, i), exp_unit(l, j)));
        if (i == j) {
          blocks.block(i * m, i * m, m, m) = c;
        } else {
          blocks.block(i * m, j * m, m, m) = 0.5 * c;
          blocks.block(j * m, i * m, m, m) = 0.5 * c;
        }
      }
    if (blocks.size() == 0) return true;
    const double scale = std::max(1.0, blocks.cwiseAbs().maxCoeff());
    return Eigen::SelfAdjointEigenSolver<Mat>(blocks).eigenvalues().minCoeff() >= -cs.tol * scale;
  }
  // General case: sum_alpha Q_alpha kron Hess(y^alpha) must be an SOS matrix.
  PolyMatrix h(l, m * l);
  for (const auto& [alpha, c] : Q.terms()) {
    Polynomial mono(l);
    mono.add_term(alpha, 1.0);
    for (const auto& [beta, hb] : hessian(mono).terms()) h.add_term(beta, kron(c, hb));
  }
  return certify_sos_matrix(h, cs).certified;
}

bool certify_archimedean(const PolyMatrix& G, double r, int d, const CertifySettings& cs) {
  if (r <= 0.0 || d < 0) throw Error("certify_archimedean needs r > 0 and d >= 0");
  const int n = G.nvars(), q = G.size();
  const int dG = half_degree(G.degree());
  const int d0 = std::max(1, d + dG);

  SdpBuilder b;
  b.sense(Sense::Maximize);
  const int lam = add_margin(b);
  CoefficientRows rows(b);
  rows.add_const(exp_zero(n), 0, 0, r * r);
  for (int i = 0; i < n; ++i) rows.add_const(exp_add(exp_unit(n, i), exp_unit(n, i)), 0, 0, -1.0);
  // <Sigma, G> = (Sigma, G)_1 with Sigma = (u_d kron I_q)^T Z1 (u_d kron I_q).
  const auto z1 = b.add_sym_matrix(q * static_cast<int>(num_monomials(n, d)));
  b.add_psd(z1);
  add_gram_localized(rows, z1, G, n, d, 1, -1.0);
  const auto z0 = b.add_sym_matrix(static_cast<int>(num_monomials(n, d0)));
  add_shifted_psd(b, z0, lam);
  add_gram_sum(rows, z0, n, d0, 1, -1.0);
  const auto sol = solve(b.build(), cs.sdp);
  return usable(sol.status) && sol.y[lam] >= -cs.tol;
}

StrongDualityReport diagnose_strong_duality(const RpmioProblem& p, std::uint64_t seed, int samples, double box) {
  StrongDualityReport rep;
  // (i) a constraint of the form a (b^2 - |y|^2), a > 0
  for (const auto& th : p.theta) {
    const double c0 = th.coeff(exp_zero(th.nvars()));
    const double a = -th.coeff(exp_add(exp_unit(th.nvars(), 0), exp_unit(th.nvars(), 0)));
    if (c0 <= 0.0 || a <= 0.0 || static_cast<int>(th.terms().size()) != th.nvars() + 1) continue;
    bool ball = true;
    for (int i = 0; i < th.nvars(); ++i)
      ball = ball && th.coeff(exp_add(exp_unit(th.nvars(), i), exp_unit(th.nvars(), i))) == -a;
    if (ball) {
      rep.ball_constraint = true;
      rep.ball_radius = std::sqrt(c0 / a);
      break;
    }
  }
  if (!rep.ball_constraint && p.mode != Mode::Eigmin && p.mode != Mode::Linear)
    rep.notes.push_back("no ball constraint b^2 - |y|^2 >= 0 found among the constraints on y");

  // (ii) interior evidence for {x : G(x) PSD}
  const int n = p.nx;
  auto interior = [&](const Vec& x) {
    if (p.G.size() == 0) return true;
    return Eigen::SelfAdjointEigenSolver<Mat>(p.G.eval(x), Eigen::EigenvaluesOnly).eigenvalues().minCoeff() > 1e-9;
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-box, box);
  Vec x = Vec::Zero(n);
  for (int s = 0; s <= samples; ++s) {
    if (s > 0)
      for (int i = 0; i < n; ++i) x[i] = unif(rng);
    if (interior(x)) {
      rep.interior_evidence = true;
      rep.interior_point = x;
      break;
    }
  }
  if (!rep.interior_evidence)
    rep.notes.push_back("no sampled x has G(x) positive definite; the feasible set in x may have empty interior");
  return rep;
}

}  // namespace pmi
