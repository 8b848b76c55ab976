#include "pmi/sdpa.hpp"

#include <cstdio>
#include <sstream>
#include <vector>

namespace pmi {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string export_sdpa(const SdpInstance& p) {
  p.validate();
  const int neq = p.neq();
  const int nblocks = static_cast<int>(p.blocks.size()) + (neq > 0 ? 1 : 0);
  const double csign = p.sense == Sense::Maximize ? -1.0 : 1.0;
  std::ostringstream os;
  os << "*! pmi sense " << (p.sense == Sense::Maximize ? "max" : "min") << " offset " << fmt17(p.offset)
     << " eqblock " << (neq > 0 ? nblocks : 0) << "\n";
  os << p.nfree << "\n" << nblocks << "\n";
  for (std::size_t k = 0; k < p.blocks.size(); ++k) os << (k ? " " : "") << p.blocks[k].side;
  if (neq > 0) os << (p.blocks.empty() ? "" : " ") << -2 * neq;
  os << "\n";
  for (int i = 0; i < p.nfree; ++i) os << (i ? " " : "") << fmt17(csign * p.b[i]);
  os << "\n";
  // Constant matrix F_0 = -C.
  for (size_t k = 0; k < p.blocks.size(); ++k) {
    const auto& C = p.blocks[k].C;
    for (int j = 0; j < C.cols(); ++j)
      for (int i = 0; i <= j; ++i)
        if (C(i, j) != 0.0) os << "0 " << k + 1 << " " << i + 1 << " " << j + 1 << " " << fmt17(-C(i, j)) << "\n";
  }
  if (neq > 0)
    for (int r = 0; r < neq; ++r) {
      if (p.e[r] == 0.0) continue;
      os << "0 " << nblocks << " " << 2 * r + 1 << " " << 2 * r + 1 << " " << fmt17(p.e[r]) << "\n";
      os << "0 " << nblocks << " " << 2 * r + 2 << " " << 2 * r + 2 << " " << fmt17(-p.e[r]) << "\n";
    }
  for (int v = 0; v < p.nfree; ++v) {
    for (size_t k = 0; k < p.blocks.size(); ++k)
      for (const auto& en : p.blocks[k].A[v])
        os << v + 1 << " " << k + 1 << " " << en.i + 1 << " " << en.j + 1 << " " << fmt17(-en.v) << "\n";
    if (neq > 0)
      for (int r = 0; r < neq; ++r) {
        const double a = p.E(r, v);
        if (a == 0.0) continue;
        os << v + 1 << " " << nblocks << " " << 2 * r + 1 << " " << 2 * r + 1 << " " << fmt17(a) << "\n";
        os << v + 1 << " " << nblocks << " " << 2 * r + 2 << " " << 2 * r + 2 << " " << fmt17(-a) << "\n";
      }
  }
  return os.str();
}

SdpInstance import_sdpa(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Sense sense = Sense::Minimize;
  double offset = 0.0;
  int eqblock = 0;
  std::string body;
  bool header = true;
  while (std::getline(in, line)) {
    if (header && !line.empty() && (line[0] == '"' || line[0] == '*')) {
      if (line.rfind("*! pmi", 0) == 0) {
        std::istringstream ms(line.substr(6));
        std::string key;
        while (ms >> key) {
          if (key == "sense") {
            std::string v;
            ms >> v;
            sense = v == "max" ? Sense::Maximize : Sense::Minimize;
          } else if (key == "offset") {
            ms >> offset;
          } else if (key == "eqblock") {
            ms >> eqblock;
          }
        }
      }
      continue;
    }
    header = false;
    for (char& c : line)
      if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
    body += line + "\n";
  }
  std::istringstream ts(body);
  auto fail = [](const std::string& what) { throw Error("sdpa: " + what); };
  int m = 0, nb = 0;
  if (!(ts >> m) || m < 1) fail("bad variable count");
  if (!(ts >> nb) || nb < 1) fail("bad block count");
  std::vector<int> sizes(nb);
  for (auto& s : sizes)
    if (!(ts >> s) || s == 0) fail("bad block size");
  Vec c(m);
  for (int i = 0; i < m; ++i)
    if (!(ts >> c[i])) fail("bad objective vector");
  if (eqblock < 0 || eqblock > nb || (eqblock > 0 && (sizes[eqblock - 1] >= 0 || sizes[eqblock - 1] % 2 != 0)))
    fail("bad equality block marker");

  SdpInstance p;
  p.nfree = m;
  p.sense = sense;
  p.offset = offset;
  p.b = (sense == Sense::Maximize ? -1.0 : 1.0) * c;
  const int neq = eqblock > 0 ? -sizes[eqblock - 1] / 2 : 0;
  p.E = Mat::Zero(neq, m);
  p.e = Vec::Zero(neq);
  std::vector<int> map(nb, -1);
  for (int k = 0; k < nb; ++k) {
    if (k + 1 == eqblock) continue;
    map[k] = static_cast<int>(p.blocks.size());
    SdpBlock blk;
    blk.side = std::abs(sizes[k]);
    blk.C = Mat::Zero(blk.side, blk.side);
    blk.A.assign(m, {});
    p.blocks.push_back(std::move(blk));
  }
  int matno, blkno, i, j;
  double v;
  while (ts >> matno >> blkno >> i >> j >> v) {
    if (matno < 0 || matno > m || blkno < 1 || blkno > nb) fail("entry index out of range");
    const int side = std::abs(sizes[blkno - 1]);
    if (i > j) std::swap(i, j);
    if (i < 1 || j > side) fail("entry position out of range");
    if (sizes[blkno - 1] < 0 && i != j) fail("off-diagonal entry in diagonal block");
    if (blkno == eqblock) {
      // Odd positions carry +(E y - e); even positions are their negations.
      if (i % 2 == 0) continue;
      const int r = (i - 1) / 2;
      if (matno == 0)
        p.e[r] = v;
      else
        p.E(r, matno - 1) = v;
      continue;
    }
    auto& blk = p.blocks[map[blkno - 1]];
    if (matno == 0) {
      blk.C(i - 1, j - 1) = -v;
      blk.C(j - 1, i - 1) = -v;
    } else {
      blk.A[matno - 1].push_back({i - 1, j - 1, -v});
    }
  }
  if (!ts.eof()) fail("trailing garbage in entry list");
  p.validate();
  return p;
}

}  // namespace pmi
