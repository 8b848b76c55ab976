#include "pmi/builder.hpp"

#include <cmath>

namespace pmi {

int SdpBuilder::SymVar::var(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= side) throw DimensionError("SymVar index out of range");
  // Column-major upper triangle: entry (i,j) follows the j(j+1)/2 entries of earlier columns.
  return first + j * (j + 1) / 2 + i;
}

int SdpBuilder::add_var() { return nvars_++; }

SdpBuilder::SymVar SdpBuilder::add_sym_matrix(int side) {
  SymVar s;
  s.side = side;
  s.first = nvars_;
  nvars_ += side * (side + 1) / 2;
  return s;
}

int SdpBuilder::add_block(int side) {
  Block b;
  b.side = side;
  blocks_.push_back(std::move(b));
  return static_cast<int>(blocks_.size()) - 1;
}

void SdpBuilder::block_const(int blk, int i, int j, double v) {
  if (i > j) std::swap(i, j);
  blocks_.at(blk).constant[{i, j}] += v;
}

void SdpBuilder::block_var(int blk, int i, int j, int var, double v) {
  if (i > j) std::swap(i, j);
  blocks_.at(blk).coef[var][{i, j}] += v;
}

int SdpBuilder::add_psd(const SymVar& s) {
  const int blk = add_block(s.side);
  for (int j = 0; j < s.side; ++j)
    for (int i = 0; i <= j; ++i) block_var(blk, i, j, s.var(i, j), 1.0);
  return blk;
}

int SdpBuilder::add_equality() {
  eq_rows_.emplace_back();
  eq_const_.push_back(0.0);
  return static_cast<int>(eq_rows_.size()) - 1;
}

void SdpBuilder::eq_var(int row, int var, double v) { eq_rows_.at(row)[var] += v; }
void SdpBuilder::eq_const(int row, double v) { eq_const_.at(row) += v; }
void SdpBuilder::objective(int var, double coef) { obj_[var] += coef; }
void SdpBuilder::objective_offset(double v) { offset_ += v; }

SdpInstance SdpBuilder::build() const {
  SdpInstance p;
  p.nfree = nvars_;
  p.sense = sense_;
  p.offset = offset_;
  p.b = Vec::Zero(nvars_);
  for (const auto& [v, c] : obj_) p.b[v] = c;
  for (const auto& blk : blocks_) {
    SdpBlock out;
    out.side = blk.side;
    out.C = Mat::Zero(blk.side, blk.side);
    for (const auto& [ij, v] : blk.constant) {
      out.C(ij.first, ij.second) += v;
      if (ij.first != ij.second) out.C(ij.second, ij.first) += v;
    }
    out.A.assign(nvars_, {});
    for (const auto& [var, entries] : blk.coef)
      for (const auto& [ij, v] : entries)
        if (v != 0.0) out.A[var].push_back({ij.first, ij.second, -v});
    p.blocks.push_back(std::move(out));
  }
  // Rows without any variable are dropped; a nonzero constant there means the
  // affine system is inconsistent regardless of the PSD constraints.
  std::vector<int> live;
  for (size_t r = 0; r < eq_rows_.size(); ++r) {
    bool any = false;
    for (const auto& [v, c] : eq_rows_[r]) any = any || c != 0.0;
    if (any)
      live.push_back(static_cast<int>(r));
    else if (std::abs(eq_const_[r]) > 1e-14)
      throw Error("equality row has no variables but a nonzero constant");
  }
  const int neq = static_cast<int>(live.size());
  p.E = Mat::Zero(neq, nvars_);
  p.e = Vec::Zero(neq);
  for (int r = 0; r < neq; ++r) {
    for (const auto& [v, c] : eq_rows_[live[r]]) p.E(r, v) = c;
    p.e[r] = -eq_const_[live[r]];
  }
  return p;
}

}  // namespace pmi
