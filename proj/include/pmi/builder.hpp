#pragma once
// Incremental construction of SdpInstances from affine matrix expressions.
// A block is declared as "F_0 + sum_i y_i F_i PSD"; build() converts it to the
// instance convention C - sum_i y_i A_i with C = F_0, A_i = -F_i.

#include <map>
#include <utility>
#include <vector>

#include "pmi/sdp.hpp"

namespace pmi {

class SdpBuilder {
 public:
  // Symmetric matrix of fresh variables (upper triangle), e.g. a Gram matrix.
  struct SymVar {
    int side = 0;
    int first = -1;
    int var(int i, int j) const;
  };

  int add_var();
  SymVar add_sym_matrix(int side);

  int add_block(int side);
  // Adds v to entries (i,j) and (j,i) of the constant part of a block.
  void block_const(int blk, int i, int j, double v);
  // Adds v * y_var to entries (i,j) and (j,i) of a block.
  void block_var(int blk, int i, int j, int var, double v);
  // Declares a symmetric matrix variable PSD (adds a block that is the variable itself).
  int add_psd(const SymVar& s);

  int add_equality();
  // Row r reads sum_var coef * y_var + constant = 0.
  void eq_var(int row, int var, double v);
  void eq_const(int row, double v);

  void objective(int var, double coef);
  void objective_offset(double v);
  void sense(Sense s) { sense_ = s; }

  int nvars() const { return nvars_; }
  SdpInstance build() const;

 private:
  struct Block {
    int side = 0;
    std::map<std::pair<int, int>, double> constant;
    std::map<int, std::map<std::pair<int, int>, double>> coef;  // var -> entries
  };
  int nvars_ = 0;
  std::vector<Block> blocks_;
  std::vector<std::map<int, double>> eq_rows_;
  std::vector<double> eq_const_;
  std::map<int, double> obj_;
  double offset_ = 0.0;
  Sense sense_ = Sense::Maximize;
};

}  // namespace pmi
