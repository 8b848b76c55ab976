#include "pmi/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "pmi/schur.hpp"

namespace pmi {

Mat to_dense(const SparseSym& a, int side) {
  Mat d = Mat::Zero(side, side);
  for (const auto& en : a) {
    d(en.i, en.j) += en.v;
    if (en.i != en.j) d(en.j, en.i) += en.v;
  }
  return d;
}

SparseSym to_sparse(const Mat& a, double drop) {
  SparseSym s;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      if (std::abs(v) > drop) s.push_back({static_cast<int>(i), static_cast<int>(j), v});
    }
  return s;
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::NearOptimal: return "near-optimal";
    case SdpStatus::MaxIterations: return "max-iterations";
    case SdpStatus::InfeasibleSuspect: return "infeasible-suspect";
    case SdpStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

bool usable(SdpStatus s) { return s == SdpStatus::Optimal || s == SdpStatus::NearOptimal; }

void SdpInstance::validate() const {
  if (nfree < 1) throw Error("sdp: instance needs at least one free variable");
  if (b.size() != nfree) throw Error("sdp: objective length differs from nfree");
  if (E.cols() != nfree && E.rows() > 0) throw Error("sdp: equality matrix has wrong column count");
  if (e.size() != E.rows()) throw Error("sdp: equality right-hand side has wrong length");
  std::vector<char> used(nfree, 0);
  for (size_t k = 0; k < blocks.size(); ++k) {
    const auto& blk = blocks[k];
    const std::string where = "sdp: block " + std::to_string(k) + ": ";
    if (blk.side < 1) throw Error(where + "side must be at least 1");
    if (blk.C.rows() != blk.side || blk.C.cols() != blk.side) throw Error(where + "constant matrix has wrong size");
    if ((blk.C - blk.C.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + blk.C.cwiseAbs().maxCoeff()))
      throw Error(where + "constant matrix is not symmetric");
    if (static_cast<int>(blk.A.size()) != nfree) throw Error(where + "must list one coefficient matrix per variable");
    for (int i = 0; i < nfree; ++i)
      for (const auto& en : blk.A[i]) {
        if (en.i < 0 || en.j < en.i || en.j >= blk.side) throw Error(where + "entry outside the upper triangle");
        if (!std::isfinite(en.v)) throw Error(where + "non-finite coefficient");
        used[i] = 1;
      }
  }
  for (int r = 0; r < E.rows(); ++r)
    for (int i = 0; i < nfree; ++i)
      if (E(r, i) != 0.0) used[i] = 1;
  for (int i = 0; i < nfree; ++i)
    if (!used[i]) throw Error("sdp: variable " + std::to_string(i) + " appears in no constraint");
}

double SdpInstance::objective(const Vec& y) const { return b.dot(y) + offset; }

Mat SdpInstance::slack(int block, const Vec& y) const {
  const auto& blk = blocks.at(block);
  Mat s = blk.C;
  for (int i = 0; i < nfree; ++i)
    for (const auto& en : blk.A[i]) {
      s(en.i, en.j) -= y[i] * en.v;
      if (en.i != en.j) s(en.j, en.i) -= y[i] * en.v;
    }
  return s;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Any square factor F with F F^T = X, used for scaling and step lengths.
struct Factor {
  Mat F;
  bool ok = true;
};

Factor factorize(const Mat& x) {
  Factor f;
  Eigen::LLT<Mat> llt(x);
  if (llt.info() == Eigen::Success) {
    f.F = llt.matrixL();
    return f;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(x);
  Vec ev = es.eigenvalues();
  const double floor = std::max(1e-300, 1e-16 * ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -1e-8 * std::max(1.0, ev.cwiseAbs().maxCoeff())) f.ok = false;
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = std::sqrt(std::max(ev[i], floor));
  f.F = es.eigenvectors() * ev.asDiagonal();
  return f;
}

// Largest alpha with X + alpha dX PSD, given X = F F^T.
double max_step(const Mat& F, const Mat& dx) {
  Mat t = F.fullPivLu().solve(dx);
  t = F.fullPivLu().solve(t.transpose().eval()).transpose().eval();
  t = 0.5 * (t + t.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<Mat>(t, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return lmin >= 0.0 ? kInf : -1.0 / lmin;
}

double inner(const std::vector<Mat>& a, const std::vector<Mat>& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double fro2(const std::vector<Mat>& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return s;
}

class Solver {
 public:
  Solver(const SdpInstance& p, const SdpSettings& st)
      : p_(p), st_(st), support_(BlockSupport::build(p)), nb_(static_cast<int>(p.blocks.size())) {
    sign_ = p.sense == Sense::Maximize ? 1.0 : -1.0;
    b_ = sign_ * p.b;
    for (const auto& blk : p.blocks) norm_c_ += blk.C.squaredNorm();
    norm_c_ = std::sqrt(norm_c_);
    for (const auto& blk : p.blocks) ntotal_ += blk.side;
  }

  SdpSolution run();

 private:
  // A(X)_i = sum_b <A_{b,i}, X_b>
  Vec apply_a(const std::vector<Mat>& x) const {
    Vec r = Vec::Zero(p_.nfree);
    for (int b = 0; b < nb_; ++b)
      for (int i : support_.vars[b])
        for (const auto& en : p_.blocks[b].A[i]) r[i] += (en.i == en.j ? 1.0 : 2.0) * en.v * x[b](en.i, en.j);
    return r;
  }
  // sum_i y_i A_{b,i}
  Mat apply_at(int b, const Vec& y) const {
    const auto& blk = p_.blocks[b];
    Mat r = Mat::Zero(blk.side, blk.side);
    for (int i : support_.vars[b])
      for (const auto& en : blk.A[i]) {
        r(en.i, en.j) += y[i] * en.v;
        if (en.i != en.j) r(en.j, en.i) += y[i] * en.v;
      }
    return r;
  }

  bool factor_newton(const Mat& M);
  // M y = A(W A^T(y) W) applied blockwise, without the rounding of the assembled M.
  Vec apply_m(const std::vector<Mat>& W, const Vec& y) const {
    std::vector<Mat> t(nb_);
    for (int b = 0; b < nb_; ++b) t[b] = W[b] * apply_at(b, y) * W[b];
    return apply_a(t);
  }
  void solve_newton(const std::vector<Mat>& W, const Vec& h, const Vec& re, Vec& dy, Vec& dw) const;

  const SdpInstance& p_;
  const SdpSettings& st_;
  BlockSupport support_;
  int nb_;
  double sign_ = 1.0;
  Vec b_;
  double norm_c_ = 0.0;
  int ntotal_ = 0;

  // Newton system state
  double gamma_ = 0.0;
  Eigen::LLT<Mat> llt_;
  Eigen::LDLT<Mat> ldlt_;
  bool use_ldlt_ = false;
  Mat kinv_et_;
  Eigen::LDLT<Mat> sw_;
};

bool Solver::factor_newton(const Mat& M) {
  Mat K = M;
  const int neq = p_.neq();
  if (neq > 0) {
    const Mat ete = p_.E.transpose() * p_.E;
    const double md = std::max(M.diagonal().maxCoeff(), 1e-12);
    const double ed = std::max(ete.diagonal().maxCoeff(), 1e-300);
    gamma_ = md / ed;
    K += gamma_ * ete;
  }
  // Tiny diagonal shift guards against exact singularity without biasing the step.
  const double shift = 1e-15 * std::max(1.0, K.diagonal().cwiseAbs().maxCoeff());
  K.diagonal().array() += shift;
  llt_.compute(K);
  use_ldlt_ = llt_.info() != Eigen::Success;
  if (use_ldlt_) {
    ldlt_.compute(K);
    if (ldlt_.info() != Eigen::Success) return false;
  }
  if (neq > 0) {
    const Mat et = p_.E.transpose();
    kinv_et_ = use_ldlt_ ? Mat(ldlt_.solve(et)) : Mat(llt_.solve(et));
    const Mat sw = p_.E * kinv_et_;
    sw_.compute(0.5 * (sw + sw.transpose()));
    if (sw_.info() != Eigen::Success) return false;
  }
  return kinv_et_.allFinite() || neq == 0;
}

void Solver::solve_newton(const std::vector<Mat>& W, const Vec& h, const Vec& re, Vec& dy, Vec& dw) const {
  const int neq = p_.neq();
  auto kinv = [&](const Vec& v) -> Vec { return use_ldlt_ ? Vec(ldlt_.solve(v)) : Vec(llt_.solve(v)); };
  auto raw = [&](const Vec& hh, const Vec& rr, Vec& y, Vec& w) {
    if (neq == 0) {
      y = kinv(hh);
      w = Vec();
      return;
    }
    const Vec u = kinv(hh + gamma_ * (p_.E.transpose() * rr));
    w = sw_.solve(p_.E * u - rr);
    y = u - kinv_et_ * w;
  };
  raw(h, re, dy, dw);
  // Iterative refinement on the unaugmented system while the residual shrinks;
  // near the optimum of problems without an interior M is very ill-conditioned.
  // The residual is evaluated with the operator itself, so the refinement also
  // removes the rounding error of the assembled Schur complement.
  auto residual = [&](const Vec& y, const Vec& w, Vec& rh, Vec& rr) {
    rh = h - apply_m(W, y);
    rr = re;
    if (neq > 0) {
      rh -= p_.E.transpose() * w;
      rr = re - p_.E * y;
    }
    return std::sqrt(rh.squaredNorm() + rr.squaredNorm());
  };
  Vec rh, rr;
  double res = residual(dy, dw, rh, rr);
  for (int pass = 0; pass < 4 && res > 0.0; ++pass) {
    Vec cy, cw;
    raw(rh, rr, cy, cw);
    if (!cy.allFinite()) break;
    Vec ny = dy + cy, nw = neq > 0 ? Vec(dw + cw) : dw;
    Vec nrh, nrr;
    const double nres = residual(ny, nw, nrh, nrr);
    if (!(nres < 0.5 * res)) {
      if (nres < res) {
        dy = std::move(ny);
        dw = std::move(nw);
      }
      break;
    }
    dy = std::move(ny);
    dw = std::move(nw);
    rh = std::move(nrh);
    rr = std::move(nrr);
    res = nres;
  }
}

SdpSolution Solver::run() {
  const int n = p_.nfree;
  const int neq = p_.neq();
  SdpSolution sol;

  // Cold start: X = xi I, Z = eta I with scales from the data norms.
  std::vector<Mat> X(nb_), Z(nb_), G(nb_), W(nb_);
  std::vector<Vec> D(nb_);
  for (int b = 0; b < nb_; ++b) {
    const auto& blk = p_.blocks[b];
    double amax = 0.0, ratio = 0.0;
    for (int i : support_.vars[b]) {
      double an = 0.0;
      for (const auto& en : blk.A[i]) an += (en.i == en.j ? 1.0 : 2.0) * en.v * en.v;
      an = std::sqrt(an);
      amax = std::max(amax, an);
      ratio = std::max(ratio, (1.0 + std::abs(b_[i])) / (1.0 + an));
    }
    const double side = blk.side;
    const double xi = std::max({10.0, std::sqrt(side), side * ratio});
    const double eta = std::max({10.0, std::sqrt(side), amax, blk.C.norm()});
    X[b] = xi * Mat::Identity(blk.side, blk.side);
    Z[b] = eta * Mat::Identity(blk.side, blk.side);
  }
  Vec y = Vec::Zero(n), w = Vec::Zero(neq);

  const double norm_b = b_.norm();
  const double norm_e = p_.e.norm();
  SdpStatus status = SdpStatus::MaxIterations;
  int stall = 0;
  int last_progress = 0;
  double progress_mu = kInf;

  // Best iterate seen, by a merit combining gap and infeasibilities.
  double best_merit = kInf;
  SdpSolution best;

  std::vector<Mat> Rd(nb_), dX(nb_), dZ(nb_), Rc(nb_);
  int it = 0;
  for (; it <= st_.max_iter; ++it) {
    // Residuals.
    const Vec rp = b_ - apply_a(X) - (neq > 0 ? Vec(p_.E.transpose() * w) : Vec::Zero(n));
    for (int b = 0; b < nb_; ++b) Rd[b] = p_.blocks[b].C - apply_at(b, y) - Z[b];
    const Vec re = neq > 0 ? Vec(p_.e - p_.E * y) : Vec();
    const double pobj = b_.dot(y);
    double dobj = 0.0;
    for (int b = 0; b < nb_; ++b) dobj += p_.blocks[b].C.cwiseProduct(X[b]).sum();
    if (neq > 0) dobj += p_.e.dot(w);
    const double mu = inner(X, Z) / ntotal_;
    // Residuals are measured relative to the size of the terms that cancel in
    // them, so that cancellation error on large iterates is not mistaken for
    // infeasibility.
    std::vector<Mat> aty(nb_);
    for (int b = 0; b < nb_; ++b) aty[b] = apply_at(b, y);
    double lmi_inf = std::sqrt(fro2(Rd)) / (1.0 + std::max({norm_c_, std::sqrt(fro2(aty)), std::sqrt(fro2(Z))}));
    if (neq > 0) lmi_inf = std::max(lmi_inf, re.norm() / (1.0 + std::max(norm_e, Vec(p_.E * y).norm())));
    const Vec ax = apply_a(X);
    const double etw = neq > 0 ? Vec(p_.E.transpose() * w).norm() : 0.0;
    const double dual_inf = rp.norm() / (1.0 + std::max({norm_b, ax.norm(), etw}));

    const double rep_p = sign_ * pobj + p_.offset;
    const double rep_d = sign_ * dobj + p_.offset;
    SdpIterate rec;
    rec.iter = it;
    rec.primal_obj = rep_p;
    rec.dual_obj = rep_d;
    rec.primal_infeas = lmi_inf;
    rec.dual_infeas = dual_inf;
    rec.mu = mu;
    sol.history.push_back(rec);

    const double gap = std::abs(pobj - dobj);
    const double rel_gap = gap / (1.0 + std::abs(rep_p));
    const double merit = std::max({rel_gap / st_.gap_tol, lmi_inf / st_.feas_tol, dual_inf / st_.feas_tol});
    if (merit < best_merit || it == 0) {
      if (merit < 0.5 * best_merit) last_progress = it;
      best_merit = merit;
      best.y = y;
      best.X = X;
      best.Z = Z;
      best.w = w;
      best.primal_obj = rep_p;
      best.dual_obj = rep_d;
      best.gap = gap;
      best.primal_infeas = lmi_inf;
      best.dual_infeas = dual_inf;
      best.iterations = it;
    }
    if (mu < 0.5 * progress_mu) {
      progress_mu = mu;
      last_progress = it;
    }
    if (st_.verbose)
      std::cerr << "it " << it << " p " << rep_p << " d " << rep_d << " pinf " << lmi_inf << " dinf " << dual_inf
                << " mu " << mu << "\n";
    if (rel_gap <= st_.gap_tol && lmi_inf <= st_.feas_tol && dual_inf <= st_.feas_tol) {
      status = SdpStatus::Optimal;
      break;
    }
    if (it == st_.max_iter) break;
    // No halving of the merit for many iterations: the iterates have stagnated
    // (typically a problem without strictly feasible points); keep the best.
    if (it - last_progress >= 12) {
      status = SdpStatus::NumericalFailure;
      break;
    }
    // Divergence of either side indicates (near) infeasibility of the other.
    const double xs = std::sqrt(fro2(X)), ys = y.norm();
    if (xs > 1e12 * (1.0 + norm_c_ + norm_b) || ys > 1e12 * (1.0 + norm_c_ + norm_b)) {
      status = SdpStatus::InfeasibleSuspect;
      break;
    }

    // Nesterov-Todd scaling W = G G^T with G^{-1} X G^{-T} = G^T Z G = diag(D).
    bool scaling_ok = true;
    for (int b = 0; b < nb_; ++b) {
      const Factor fx = factorize(X[b]);
      const Factor fz = factorize(Z[b]);
      if (!fx.ok || !fz.ok) scaling_ok = false;
      Eigen::JacobiSVD<Mat> svd(fz.F.transpose() * fx.F, Eigen::ComputeFullU | Eigen::ComputeFullV);
      D[b] = svd.singularValues().cwiseMax(1e-300);
      G[b] = fx.F * svd.matrixV() * D[b].cwiseSqrt().cwiseInverse().asDiagonal();
      W[b] = G[b] * G[b].transpose();
      W[b] = 0.5 * (W[b] + W[b].transpose());
    }
    if (!scaling_ok) {
      status = SdpStatus::NumericalFailure;
      break;
    }

    const Mat M = schur_parallel(p_, support_, W, st_.threads);
    if (!factor_newton(M)) {
      status = SdpStatus::NumericalFailure;
      break;
    }

    auto direction = [&](const std::vector<Mat>& rc, Vec& dy, Vec& dw) {
      std::vector<Mat> tmp(nb_);
      for (int b = 0; b < nb_; ++b) tmp[b] = rc[b] - W[b] * Rd[b] * W[b];
      const Vec h = rp - apply_a(tmp);
      solve_newton(W, h, re, dy, dw);
      for (int b = 0; b < nb_; ++b) {
        dZ[b] = Rd[b] - apply_at(b, dy);
        dX[b] = rc[b] - W[b] * dZ[b] * W[b];
        dX[b] = 0.5 * (dX[b] + dX[b].transpose());
      }
    };
    auto steps = [&](double& ap, double& ad) {
      ap = ad = kInf;
      for (int b = 0; b < nb_; ++b) {
        ap = std::min(ap, max_step(factorize(X[b]).F, dX[b]));
        ad = std::min(ad, max_step(factorize(Z[b]).F, dZ[b]));
      }
    };

    // Predictor (affine scaling) direction.
    for (int b = 0; b < nb_; ++b) Rc[b] = -X[b];
    Vec dy, dw;
    direction(Rc, dy, dw);
    if (!dy.allFinite()) {
      status = SdpStatus::NumericalFailure;
      break;
    }
    double ap, ad;
    steps(ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu_aff = 0.0;
    for (int b = 0; b < nb_; ++b) mu_aff += (X[b] + ap * dX[b]).cwiseProduct(Z[b] + ad * dZ[b]).sum();
    mu_aff /= ntotal_;
    const double expon = std::max(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
    double sigma = std::min(1.0, std::pow(std::max(0.0, mu_aff / mu), expon));
    // Short predictor steps signal loss of centrality: center more strongly.
    const double amin = std::min(ap, ad);
    if (amin < 0.5) sigma = std::max(sigma, (1.0 - amin) * (1.0 - amin));

    // Corrector with the second-order Mehrotra term in the scaled space.
    for (int b = 0; b < nb_; ++b) {
      const Mat ginv = G[b].inverse();
      const Mat dxh = ginv * dX[b] * ginv.transpose();
      const Mat dzh = G[b].transpose() * dZ[b] * G[b];
      Mat r = -(dxh * dzh + dzh * dxh);
      const Vec& d = D[b];
      for (Eigen::Index i = 0; i < d.size(); ++i) r(i, i) += 2.0 * sigma * mu - 2.0 * d[i] * d[i];
      for (Eigen::Index i = 0; i < d.size(); ++i)
        for (Eigen::Index j = 0; j < d.size(); ++j) r(i, j) /= (d[i] + d[j]);
      Rc[b] = G[b] * r * G[b].transpose();
      Rc[b] = 0.5 * (Rc[b] + Rc[b].transpose());
    }
    direction(Rc, dy, dw);
    if (!dy.allFinite()) {
      status = SdpStatus::NumericalFailure;
      break;
    }
    steps(ap, ad);
    // A fixed, conservative fraction to the boundary keeps the iterates well
    // centred; on relaxations without strictly feasible points, longer steps
    // lose centrality and the Newton systems lose accuracy near the optimum.
    const double gstep = 0.8;
    ap = std::min(1.0, gstep * ap);
    ad = std::min(1.0, gstep * ad);
    sol.history.back().step_primal = ad;
    sol.history.back().step_dual = ap;

    for (int b = 0; b < nb_; ++b) {
      X[b] += ap * dX[b];
      Z[b] += ad * dZ[b];
    }
    if (neq > 0) w += ap * dw;
    y += ad * dy;

    stall = (ap < 1e-8 && ad < 1e-8) ? stall + 1 : 0;
    if (stall >= 3) {
      status = SdpStatus::NumericalFailure;
      break;
    }
  }

  SdpSolution out = status == SdpStatus::Optimal ? SdpSolution{} : best;
  if (status == SdpStatus::Optimal) {
    out.y = y;
    out.X = X;
    out.Z = Z;
    out.w = w;
    const auto& last = sol.history.back();
    out.primal_obj = last.primal_obj;
    out.dual_obj = last.dual_obj;
    out.gap = std::abs(out.primal_obj - out.dual_obj);
    out.primal_infeas = last.primal_infeas;
    out.dual_infeas = last.dual_infeas;
    out.iterations = it;
  } else {
    out.iterations = it;
  }
  if (status != SdpStatus::Optimal) {
    const double rel_gap = best.gap / (1.0 + std::abs(best.primal_obj));
    if (rel_gap <= st_.near_tol && best.primal_infeas <= st_.near_tol && best.dual_infeas <= st_.near_tol)
      status = SdpStatus::NearOptimal;
  }
  out.status = status;
  out.history = std::move(sol.history);
  return out;
}

}  // namespace

SdpSolution solve(const SdpInstance& p, const SdpSettings& settings) {
  p.validate();
  Solver s(p, settings);
  return s.run();
}

}  // namespace pmi
