#include "pmi/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace pmi {

FecResult check_fec(const MomentSequence& S, int t_min, int k, int d, double tau_rank) {
  if (S.order() < 2 * k) throw DegreeError("check_fec: sequence order below 2k");
  FecResult r;
  for (int t = std::max(t_min, d); t <= k; ++t) {
    const auto hi = numerical_rank(moment_matrix(S, t), tau_rank);
    const auto lo = numerical_rank(moment_matrix(S, t - d), tau_rank);
    r.scanned.emplace_back(t, hi.rank, lo.rank);
    if (!r.holds || t == r.t) {
      r.rank_high = hi.rank;
      r.rank_low = lo.rank;
      r.sv_high = hi.singular_values;
      r.sv_low = lo.singular_values;
    }
    if (hi.rank == lo.rank) {
      r.holds = true;
      r.t = t;
      r.rank_high = hi.rank;
      r.rank_low = lo.rank;
      r.sv_high = hi.singular_values;
      r.sv_low = lo.singular_values;
      break;
    }
  }
  return r;
}

MomentSequence as_moment_sequence(const PseudoMomentVector& s) {
  MomentSequence out(s.nvars(), 1, s.order());
  for (long i = 0; i < s.values().size(); ++i) out.set_block(i, Mat::Constant(1, 1, s.values()[i]));
  return out;
}

namespace {

struct Attempt {
  bool ok = false;
  std::string error;
  ExtractionOutput out;
};

// Column echelon form of V (rows scanned in order, largest-entry column pivot).
// Returns U with U(pivots, :) = I and the pivot rows.
Mat column_echelon(const Mat& v, double tol, std::vector<int>& pivots) {
  Mat u = v;
  const int r = static_cast<int>(u.cols());
  int col = 0;
  pivots.clear();
  for (int i = 0; i < u.rows() && col < r; ++i) {
    Eigen::Index j;
    const double best = u.row(i).segment(col, r - col).cwiseAbs().maxCoeff(&j);
    if (best <= tol) continue;
    j += col;
    u.col(j).swap(u.col(col));
    u.col(col) /= u(i, col);
    for (int c = 0; c < r; ++c)
      if (c != col) u.col(c) -= u(i, c) * u.col(col);
    pivots.push_back(i);
    ++col;
  }
  if (col < r) throw ExtractionError("column echelon reduction found fewer pivots than the rank");
  return u;
}

Attempt attempt_extraction(const Mat& mt, const Mat& u, const std::vector<std::pair<ExponentVector, int>>& basis,
                           const std::vector<Mat>& nl, int nvars, int m, int t, std::uint64_t seed,
                           const ExtractionSettings& es) {
  Attempt at;
  const int r = static_cast<int>(basis.size());
  (void)u;
  // Random positive combination on the simplex.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(std::numeric_limits<double>::min(), 1.0);
  Vec c(nvars);
  for (int l = 0; l < nvars; ++l) c[l] = -std::log(unif(rng));
  c /= c.sum();
  Mat n = Mat::Zero(r, r);
  for (int l = 0; l < nvars; ++l) n += c[l] * nl[l];

  Eigen::RealSchur<Mat> schur(n);
  if (schur.info() != Eigen::Success) {
    at.error = "Schur decomposition failed";
    return at;
  }
  const Mat& a = schur.matrixU();
  const Mat& tt = schur.matrixT();
  const double nscale = 1.0 + tt.cwiseAbs().maxCoeff();
  for (int j = 0; j + 1 < r; ++j)
    if (std::abs(tt(j + 1, j)) > 1e-6 * nscale) {
      at.error = "combination matrix has complex eigenvalues";
      return at;
    }

  // Candidate points x^(j) = (a_j^T N_l a_j)_l, one per Schur column.
  std::vector<Vec> pts(r, Vec(nvars));
  for (int j = 0; j < r; ++j)
    for (int l = 0; l < nvars; ++l) pts[j][l] = a.col(j).dot(nl[l] * a.col(j));
  double pmax = 0.0;
  for (const auto& p : pts) pmax = std::max(pmax, p.cwiseAbs().maxCoeff());
  const double radius = es.cluster_radius * (1.0 + pmax);

  // Single-linkage clustering.
  std::vector<int> parent(r);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      if ((pts[i] - pts[j]).norm() <= radius) parent[find(i)] = find(j);
  std::vector<int> roots;
  std::vector<std::vector<int>> members;
  for (int i = 0; i < r; ++i) {
    const int root = find(i);
    auto it = std::find(roots.begin(), roots.end(), root);
    if (it == roots.end()) {
      roots.push_back(root);
      members.push_back({i});
    } else {
      members[it - roots.begin()].push_back(i);
    }
  }
  // Distinct atoms must have distinct values of the random combination;
  // otherwise the Schur vectors mix atoms and the seed is re-drawn.
  for (size_t p = 0; p < members.size(); ++p)
    for (size_t q = p + 1; q < members.size(); ++q)
      for (int i : members[p])
        for (int j : members[q])
          if (std::abs(tt(i, i) - tt(j, j)) <= 1e-7 * nscale) {
            at.error = "random combination does not separate the atoms";
            return at;
          }
  const int na = static_cast<int>(members.size());
  std::vector<Vec> points(na);
  for (int p = 0; p < na; ++p) {
    Vec mean = Vec::Zero(nvars);
    for (int i : members[p]) mean += pts[i];
    points[p] = mean / static_cast<double>(members[p].size());
  }

  // Weights from the first m columns: M_t(:, 0:m) = Lambda [W_1; ...; W_R].
  const auto mons = monomial_basis(nvars, t);
  const int nt = static_cast<int>(mons.size());
  Mat lambda = Mat::Zero(m * nt, m * na);
  for (int p = 0; p < na; ++p)
    for (int aidx = 0; aidx < nt; ++aidx) {
      const double v = monomial_value(mons[aidx], points[p]);
      for (int i = 0; i < m; ++i) lambda(aidx * m + i, p * m + i) = v;
    }
  Eigen::ColPivHouseholderQR<Mat> qr(lambda.transpose());
  qr.setThreshold(1e-10);
  if (qr.rank() < m * na) {
    at.error = "row deficiency: the recovered points do not determine the weights at this order (raise k)";
    return at;
  }
  const auto& perm = qr.colsPermutation().indices();
  Mat lr(m * na, m * na), br(m * na, m);
  for (int q = 0; q < m * na; ++q) {
    lr.row(q) = lambda.row(perm[q]);
    br.row(q) = mt.block(perm[q], 0, 1, m);
  }
  const Mat x = lr.fullPivLu().solve(br);

  ExtractionOutput& out = at.out;
  out.weight_slack = std::numeric_limits<double>::infinity();
  for (int p = 0; p < na; ++p) {
    Mat w = x.block(p * m, 0, m, m);
    w = 0.5 * (w + w.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es2(w);
    out.weight_slack = std::min(out.weight_slack, es2.eigenvalues().minCoeff());
    const Vec ev = es2.eigenvalues().cwiseMax(0.0);
    w = es2.eigenvectors() * ev.asDiagonal() * es2.eigenvectors().transpose();
    out.measure.atoms.push_back({points[p], w});
  }
  const Mat rebuilt = moment_matrix(assemble_from_measure(out.measure, 2 * t), t);
  out.residual = (mt - rebuilt).norm();
  if (out.residual > es.residual_tol * (1.0 + mt.norm())) {
    at.error = "reconstruction residual " + std::to_string(out.residual) + " above tolerance";
    return at;
  }
  at.ok = true;
  return at;
}

}  // namespace

ExtractionOutput extract_atoms(const MomentSequence& S, int t, int d_G, const ExtractionSettings& es) {
  if (S.order() < 2 * t) throw DegreeError("extract_atoms: sequence order below 2t");
  const int n = S.nvars(), m = S.m();
  const Mat mt = moment_matrix(S, t);
  const auto rk = numerical_rank(mt, es.tau_rank);
  const int r = rk.rank;
  if (r == 0) {
    ExtractionOutput out;
    out.residual = mt.norm();
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(mt);
  // Rank-revealing factor V = U sqrt(Lambda) on the r largest eigenvalues.
  Mat v(mt.rows(), r);
  for (int j = 0; j < r; ++j) {
    const Eigen::Index src = mt.rows() - 1 - j;
    v.col(j) = eig.eigenvectors().col(src) * std::sqrt(std::max(eig.eigenvalues()[src], 0.0));
  }
  // Entries of V scale like square roots of eigenvalues of M_t.
  const double pivot_tol = std::sqrt(es.tau_rank) * v.cwiseAbs().maxCoeff();
  std::vector<int> piv;
  const Mat u = column_echelon(v, pivot_tol, piv);

  const auto mons = monomial_basis(n, t);
  const int dmax = t - std::max(1, d_G);
  std::vector<std::pair<ExponentVector, int>> basis;
  for (int p : piv) {
    const auto& mono = mons[p / m];
    if (degree(mono) > dmax)
      throw ExtractionError("basis-degree violation: pivot monomial of degree " + std::to_string(degree(mono)) +
                            " exceeds t - d_G = " + std::to_string(dmax) + " (flatness is numerically spurious)");
    basis.emplace_back(mono, p % m);
  }
  // Multiplication matrices: row j of N_l expresses x_l * b_j in the basis.
  std::vector<Mat> nl(n, Mat(r, r));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < r; ++j) {
      const auto shifted = exp_add(basis[j].first, exp_unit(n, l));
      nl[l].row(j) = u.row(mono_index(shifted, t) * m + basis[j].second);
    }

  std::string last_error;
  for (int attempt = 0; attempt <= es.max_retries; ++attempt) {
    const std::uint64_t seed = es.seed + static_cast<std::uint64_t>(attempt);
    Attempt at = attempt_extraction(mt, u, basis, nl, n, m, t, seed, es);
    if (at.ok) {
      at.out.basis = basis;
      at.out.rank = r;
      at.out.seed_used = seed;
      at.out.attempts = attempt + 1;
      return at.out;
    }
    last_error = at.error;
  }
  throw ExtractionError("extraction failed after " + std::to_string(es.max_retries + 1) + " attempts: " + last_error);
}

Vec candidate_minimizer(const PseudoMomentVector& s) {
  const int l = s.nvars();
  Vec y(l);
  for (int i = 0; i < l; ++i) y[i] = s.at(exp_unit(l, i));
  return y;
}

ConvexMinimizer convex_minimizer_from_dual(const PseudoMomentVector& s, int t_min, int k, int d_Theta,
                                           const ExtractionSettings& es) {
  ConvexMinimizer out;
  const auto seq = as_moment_sequence(s);
  const int d = std::max(1, d_Theta);
  out.fec = check_fec(seq, t_min, k, d, es.tau_rank);
  if (out.fec.holds) {
    try {
      const auto ex = extract_atoms(seq, out.fec.t, d, es);
      Vec y = Vec::Zero(s.nvars());
      double total = 0.0;
      for (const auto& a : ex.measure.atoms) {
        y += a.weight(0, 0) * a.point;
        total += a.weight(0, 0);
      }
      out.atoms = ex.measure.atoms;
      out.y = y;
      out.from_atoms = true;
      if (std::abs(total - 1.0) > 1e-6) out.warning = "atom weights sum to " + std::to_string(total);
      return out;
    } catch (const ExtractionError& e) {
      out.warning = std::string("atom extraction failed: ") + e.what();
    }
  } else {
    out.warning = "flat extension condition on the pseudo-moments does not hold";
  }
  out.warning += "; falling back to the degree-one pseudo-moments (valid under SOS-convexity)";
  out.y = candidate_minimizer(s);
  return out;
}

RankOneResult rank_one_certificate(const PseudoMomentVector& s, int k_y, double tau_rank) {
  RankOneResult r;
  const int t = std::max(1, half_degree(k_y));
  if (s.order() < 2 * t) throw DegreeError("rank_one_certificate: pseudo-moment order below 2 ceil(k_y/2)");
  r.rank = numerical_rank(moment_matrix(s, t), tau_rank).rank;
  r.rank_one = r.rank == 1;
  if (r.rank_one) r.y_star = candidate_minimizer(s);
  return r;
}

namespace {

std::vector<Vec> factor_weight(const Mat& w, double tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (w + w.transpose()));
  std::vector<Vec> vs;
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i)
    if (es.eigenvalues()[i] > tol * scale) vs.push_back(es.eigenvectors().col(i) * std::sqrt(es.eigenvalues()[i]));
  return vs;
}

}  // namespace

std::vector<ActiveAtom> recover_active_set(const AtomicMeasure& mu, const Vec& y_star, const BiPolyMatrix& P,
                                           double tol) {
  std::vector<ActiveAtom> out;
  for (const auto& a : mu.atoms) {
    ActiveAtom aa;
    aa.point = a.point;
    aa.vectors = factor_weight(a.weight, tol);
    const Mat pv = P.eval(y_star, a.point);
    for (const auto& v : aa.vectors) aa.residuals.push_back((pv * v).norm());
    out.push_back(std::move(aa));
  }
  return out;
}

std::vector<ActiveAtom> recover_eigenvectors(const AtomicMeasure& mu, const PolyMatrix& F, double lambda, double tol) {
  std::vector<ActiveAtom> out;
  for (const auto& a : mu.atoms) {
    ActiveAtom aa;
    aa.point = a.point;
    aa.vectors = factor_weight(a.weight, tol);
    const Mat fx = F.eval(a.point);
    for (const auto& v : aa.vectors) aa.residuals.push_back((fx * v - lambda * v).norm());
    out.push_back(std::move(aa));
  }
  return out;
}

}  // namespace pmi
