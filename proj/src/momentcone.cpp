#include "pmi/momentcone.hpp"

#include <Eigen/SVD>

namespace pmi {

int half_degree(int deg) { return (deg + 1) / 2; }

// ---------------------------------------------------------- MomentSequence

MomentSequence::MomentSequence(int nvars, int m, int order)
    : nvars_(nvars), m_(m), order_(order), blocks_(num_monomials(nvars, order), Mat::Zero(m, m)) {
  if (nvars < 0 || m < 1 || order < 0) throw DimensionError("invalid moment sequence shape");
}

const Mat& MomentSequence::at(const ExponentVector& alpha) const {
  if (static_cast<int>(alpha.size()) != nvars_) throw DimensionError("exponent length mismatch");
  return blocks_[mono_index(alpha, order_)];
}

void MomentSequence::set(const ExponentVector& alpha, const Mat& value) {
  if (static_cast<int>(alpha.size()) != nvars_) throw DimensionError("exponent length mismatch");
  set_block(mono_index(alpha, order_), value);
}

void MomentSequence::set_block(long index, const Mat& value) {
  if (value.rows() != m_ || value.cols() != m_) throw DimensionError("moment block has wrong size");
  blocks_.at(index) = 0.5 * (value + value.transpose());
}

MomentSequence MomentSequence::truncated(int order) const {
  if (order > order_) throw DegreeError("cannot truncate to a higher order");
  MomentSequence r(nvars_, m_, order);
  for (long i = 0; i < r.count(); ++i) r.blocks_[i] = blocks_[i];
  return r;
}

// ------------------------------------------------------ PseudoMomentVector

PseudoMomentVector::PseudoMomentVector(int nvars, int order)
    : nvars_(nvars), order_(order), values_(Vec::Zero(num_monomials(nvars, order))) {}

double PseudoMomentVector::at(const ExponentVector& beta) const {
  if (static_cast<int>(beta.size()) != nvars_) throw DimensionError("exponent length mismatch");
  return values_[mono_index(beta, order_)];
}

void PseudoMomentVector::set(const ExponentVector& beta, double v) {
  if (static_cast<int>(beta.size()) != nvars_) throw DimensionError("exponent length mismatch");
  values_[mono_index(beta, order_)] = v;
}

// ---------------------------------------------------------------- matrices

RankInfo numerical_rank(const Mat& a, double rel_tol) {
  RankInfo info;
  if (a.size() == 0) return info;
  Eigen::JacobiSVD<Mat> svd(a);
  info.singular_values = svd.singularValues();
  const double smax = info.singular_values.size() ? info.singular_values[0] : 0.0;
  info.threshold = static_cast<double>(std::max(a.rows(), a.cols())) * smax * rel_tol;
  for (Eigen::Index i = 0; i < info.singular_values.size(); ++i)
    if (info.singular_values[i] > info.threshold) ++info.rank;
  return info;
}

Mat moment_matrix(const MomentSequence& s, int d) {
  if (d < 0 || 2 * d > s.order()) throw DegreeError("moment_matrix: order of S too small");
  const auto basis = monomial_basis(s.nvars(), d);
  const int m = s.m();
  const long nb = static_cast<long>(basis.size());
  Mat M(nb * m, nb * m);
  for (long a = 0; a < nb; ++a)
    for (long b = a; b < nb; ++b) {
      const Mat& blk = s.at(exp_add(basis[a], basis[b]));
      M.block(a * m, b * m, m, m) = blk;
      M.block(b * m, a * m, m, m) = blk;
    }
  return M;
}

Mat localizing_matrix(const MomentSequence& s, const PolyMatrix& g, int d) {
  if (g.nvars() != s.nvars()) throw DimensionError("localizing_matrix: variable count mismatch");
  if (d < 0 || 2 * d + g.degree() > s.order()) throw DegreeError("localizing_matrix: order of S too small");
  const auto basis = monomial_basis(s.nvars(), d);
  const int m = s.m(), q = g.size(), mq = m * q;
  const long nb = static_cast<long>(basis.size());
  Mat L = Mat::Zero(nb * mq, nb * mq);
  for (long a = 0; a < nb; ++a)
    for (long b = a; b < nb; ++b) {
      Mat blk = Mat::Zero(mq, mq);
      const auto ab = exp_add(basis[a], basis[b]);
      for (const auto& [gamma, gc] : g.terms()) blk += kron(s.at(exp_add(ab, gamma)), gc);
      L.block(a * mq, b * mq, mq, mq) = blk;
      L.block(b * mq, a * mq, mq, mq) = blk.transpose();
    }
  return L;
}

Mat moment_matrix(const PseudoMomentVector& s, int d) {
  if (d < 0 || 2 * d > s.order()) throw DegreeError("moment_matrix: order of s too small");
  const auto basis = monomial_basis(s.nvars(), d);
  const long nb = static_cast<long>(basis.size());
  Mat M(nb, nb);
  for (long a = 0; a < nb; ++a)
    for (long b = a; b < nb; ++b) M(a, b) = M(b, a) = s.at(exp_add(basis[a], basis[b]));
  return M;
}

Mat localizing_matrix(const PseudoMomentVector& s, const Polynomial& theta, int d) {
  if (theta.nvars() != s.nvars()) throw DimensionError("localizing_matrix: variable count mismatch");
  if (d < 0 || 2 * d + theta.degree() > s.order()) throw DegreeError("localizing_matrix: order of s too small");
  const auto basis = monomial_basis(s.nvars(), d);
  const long nb = static_cast<long>(basis.size());
  Mat L(nb, nb);
  for (long a = 0; a < nb; ++a)
    for (long b = a; b < nb; ++b) {
      double v = 0.0;
      const auto ab = exp_add(basis[a], basis[b]);
      for (const auto& [gamma, c] : theta.terms()) v += c * s.at(exp_add(ab, gamma));
      L(a, b) = L(b, a) = v;
    }
  return L;
}

// ------------------------------------------------------------- functionals

double riesz(const MomentSequence& s, const PolyMatrix& f) {
  if (f.nvars() != s.nvars() || f.size() != s.m()) throw DimensionError("riesz: shape mismatch");
  if (f.degree() > s.order()) throw DegreeError("riesz: degree of F exceeds order of S");
  double v = 0.0;
  for (const auto& [alpha, c] : f.terms()) v += (c.cwiseProduct(s.at(alpha))).sum();
  return v;
}

Polynomial riesz_y_polynomial(const MomentSequence& s, const BiPolyMatrix& p) {
  if (p.nx() != s.nvars() || p.size() != s.m()) throw DimensionError("riesz_y_polynomial: shape mismatch");
  if (p.x_degree() > s.order()) throw DegreeError("riesz_y_polynomial: x-degree of P exceeds order of S");
  Polynomial r(p.ny());
  for (const auto& [key, c] : p.terms()) r.add_term(key.first, c.cwiseProduct(s.at(key.second)).sum());
  return r;
}

PolyMatrix apply_y_functional(const PseudoMomentVector& s, const BiPolyMatrix& p) {
  if (p.ny() != s.nvars()) throw DimensionError("apply_y_functional: variable count mismatch");
  if (p.y_degree() > s.order()) throw DegreeError("apply_y_functional: y-degree of P exceeds order of s");
  PolyMatrix r(p.nx(), p.size());
  for (const auto& [key, c] : p.terms()) r.add_term(key.second, s.at(key.first) * c);
  return r;
}

double apply_y_functional(const PseudoMomentVector& s, const Polynomial& f) {
  if (f.nvars() != s.nvars()) throw DimensionError("apply_y_functional: variable count mismatch");
  if (f.degree() > s.order()) throw DegreeError("apply_y_functional: degree of f exceeds order of s");
  double v = 0.0;
  for (const auto& [beta, c] : f.terms()) v += c * s.at(beta);
  return v;
}

MomentSequence assemble_from_measure(const AtomicMeasure& mu, int order) {
  if (mu.atoms.empty()) throw DimensionError("assemble_from_measure: measure has no atoms");
  const int n = static_cast<int>(mu.atoms[0].point.size());
  const int m = static_cast<int>(mu.atoms[0].weight.rows());
  MomentSequence s(n, m, order);
  const auto basis = monomial_basis(n, order);
  for (long i = 0; i < static_cast<long>(basis.size()); ++i) {
    Mat acc = Mat::Zero(m, m);
    for (const auto& atom : mu.atoms) {
      if (atom.point.size() != n || atom.weight.rows() != m || atom.weight.cols() != m)
        throw DimensionError("assemble_from_measure: inconsistent atom shapes");
      acc += monomial_value(basis[i], atom.point) * atom.weight;
    }
    s.set_block(i, acc);
  }
  return s;
}

PseudoMomentVector assemble_pseudo_moments(const std::vector<Vec>& points, const std::vector<double>& weights,
                                           int order) {
  if (points.empty() || points.size() != weights.size()) throw DimensionError("assemble_pseudo_moments: bad input");
  const int n = static_cast<int>(points[0].size());
  PseudoMomentVector s(n, order);
  const auto basis = monomial_basis(n, order);
  for (long i = 0; i < static_cast<long>(basis.size()); ++i) {
    double v = 0.0;
    for (size_t j = 0; j < points.size(); ++j) v += weights[j] * monomial_value(basis[i], points[j]);
    s.values()[i] = v;
  }
  return s;
}

}  // namespace pmi
