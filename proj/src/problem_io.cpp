#include "pmi/problem_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace pmi {

namespace {

const json& field(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "missing required field");
  return *it;
}

void expect_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw SchemaError(path, "expected an object");
}

void expect_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array");
}

long as_int(const json& v, const std::string& path, long lo, long hi) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
  const long x = v.get<long>();
  if (x < lo || x > hi)
    throw SchemaError(path, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
  return x;
}

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(path, "expected a finite number");
  return x;
}

ExponentVector as_exponent(const json& v, const std::string& path, int n) {
  expect_array(v, path);
  if (static_cast<int>(v.size()) != n)
    throw SchemaError(path, "expected " + std::to_string(n) + " exponents, got " + std::to_string(v.size()));
  ExponentVector a(n);
  for (int i = 0; i < n; ++i) a[i] = static_cast<int>(as_int(v[i], path + "[" + std::to_string(i) + "]", 0, 64));
  return a;
}

Vec as_vector(const json& v, const std::string& path, int n) {
  expect_array(v, path);
  if (n >= 0 && static_cast<int>(v.size()) != n)
    throw SchemaError(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
  Vec x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x[i] = as_real(v[i], path + "[" + std::to_string(i) + "]");
  return x;
}

Mat as_matrix(const json& v, const std::string& path, int n) {
  expect_array(v, path);
  if (static_cast<int>(v.size()) != n) throw SchemaError(path, "expected " + std::to_string(n) + " rows");
  Mat a(n, n);
  for (int i = 0; i < n; ++i) a.row(i) = as_vector(v[i], path + "[" + std::to_string(i) + "]", n).transpose();
  return a;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw SchemaError(path + "." + it.key(), "unknown field");
}

Polynomial parse_poly(const json& v, const std::string& path, int n) {
  expect_array(v, path);
  Polynomial p(n);
  for (std::size_t t = 0; t < v.size(); ++t) {
    const std::string tp = path + "[" + std::to_string(t) + "]";
    expect_object(v[t], tp);
    reject_unknown(v[t], {"y_exp", "coeff"}, tp);
    p.add_term(as_exponent(field(v[t], "y_exp", tp), tp + ".y_exp", n), as_real(field(v[t], "coeff", tp), tp + ".coeff"));
  }
  return p;
}

std::pair<int, int> parse_entry(const json& term, const std::string& tp, int size) {
  const int r = static_cast<int>(as_int(field(term, "row", tp), tp + ".row", 0, size - 1));
  const int c = static_cast<int>(as_int(field(term, "col", tp), tp + ".col", 0, size - 1));
  if (r > c) throw SchemaError(tp + ".row", "row must not exceed col (upper triangle only)");
  return {r, c};
}

PolyMatrix parse_xmatrix(const json& v, const std::string& path, int n, int size) {
  expect_array(v, path);
  PolyMatrix p(n, size);
  for (std::size_t t = 0; t < v.size(); ++t) {
    const std::string tp = path + "[" + std::to_string(t) + "]";
    expect_object(v[t], tp);
    reject_unknown(v[t], {"x_exp", "row", "col", "coeff"}, tp);
    const auto a = as_exponent(field(v[t], "x_exp", tp), tp + ".x_exp", n);
    const auto [r, c] = parse_entry(v[t], tp, size);
    p.add_entry(a, r, c, as_real(field(v[t], "coeff", tp), tp + ".coeff"));
  }
  return p;
}

json exp_json(const ExponentVector& a) { return json(a); }

void poly_terms(json& out, const Polynomial& p) {
  out = json::array();
  for (const auto& [a, c] : p.terms()) out.push_back({{"y_exp", exp_json(a)}, {"coeff", c}});
}

json xmatrix_terms(const PolyMatrix& p) {
  json out = json::array();
  for (const auto& [a, c] : p.terms())
    for (int j = 0; j < c.cols(); ++j)
      for (int i = 0; i <= j; ++i)
        if (c(i, j) != 0.0) out.push_back({{"x_exp", exp_json(a)}, {"row", i}, {"col", j}, {"coeff", c(i, j)}});
  return out;
}

}  // namespace

ProblemFile problem_from_json(const json& doc) {
  const std::string root = "$";
  expect_object(doc, root);
  reject_unknown(doc, {"nx", "ny", "m", "q", "mode", "objective", "theta", "P", "G", "F", "samples_X", "comment"}, root);
  ProblemFile pf;
  RpmioProblem& p = pf.problem;
  const auto& mode_v = field(doc, "mode", root);
  if (!mode_v.is_string()) throw SchemaError("$.mode", "expected a string");
  try {
    p.mode = mode_from_string(mode_v.get<std::string>());
  } catch (const Error& e) {
    throw SchemaError("$.mode", e.what());
  }
  const bool eig = p.mode == Mode::Eigmin;
  p.nx = static_cast<int>(as_int(field(doc, "nx", root), "$.nx", 1, 16));
  p.ny = static_cast<int>(as_int(field(doc, "ny", root), "$.ny", eig ? 0 : 1, 16));
  const int m = static_cast<int>(as_int(field(doc, "m", root), "$.m", 1, 64));
  const int q = static_cast<int>(as_int(field(doc, "q", root), "$.q", 1, 64));

  if (eig) {
    for (const char* k : {"objective", "theta", "P"})
      if (doc.contains(k)) throw SchemaError(std::string("$.") + k, "not allowed in eigmin mode (use F)");
    p.F = parse_xmatrix(field(doc, "F", root), "$.F", p.nx, m);
    if (p.F.is_zero()) throw SchemaError("$.F", "must have at least one nonzero term");
  } else {
    if (doc.contains("F")) throw SchemaError("$.F", "only allowed in eigmin mode");
    p.f = parse_poly(field(doc, "objective", root), "$.objective", p.ny);
    if (doc.contains("theta")) {
      const auto& th = doc["theta"];
      expect_array(th, "$.theta");
      for (std::size_t j = 0; j < th.size(); ++j)
        p.theta.push_back(parse_poly(th[j], "$.theta[" + std::to_string(j) + "]", p.ny));
    }
    const auto& P = field(doc, "P", root);
    expect_array(P, "$.P");
    p.P = BiPolyMatrix(p.ny, p.nx, m);
    for (std::size_t t = 0; t < P.size(); ++t) {
      const std::string tp = "$.P[" + std::to_string(t) + "]";
      expect_object(P[t], tp);
      reject_unknown(P[t], {"y_exp", "x_exp", "row", "col", "coeff"}, tp);
      const auto ya = as_exponent(field(P[t], "y_exp", tp), tp + ".y_exp", p.ny);
      const auto xa = as_exponent(field(P[t], "x_exp", tp), tp + ".x_exp", p.nx);
      const auto [r, c] = parse_entry(P[t], tp, m);
      p.P.add_entry(ya, xa, r, c, as_real(field(P[t], "coeff", tp), tp + ".coeff"));
    }
    if (p.mode == Mode::Linear) {
      if (p.f.degree() > 1) throw SchemaError("$.objective", "linear mode needs an affine objective");
      if (p.P.y_degree() > 1) throw SchemaError("$.P", "linear mode needs P affine in y");
      if (!p.theta.empty()) throw SchemaError("$.theta", "linear mode takes no constraints on y");
    }
  }
  p.G = doc.contains("G") ? parse_xmatrix(doc["G"], "$.G", p.nx, q) : PolyMatrix(p.nx, q);
  if (p.G.is_zero()) {
    // No constraint on x: G = 1 (the whole space).
    if (q != 1) throw SchemaError("$.G", "an empty G requires q = 1");
    p.G = PolyMatrix::identity(p.nx, 1);
  }
  if (doc.contains("samples_X")) {
    const auto& s = doc["samples_X"];
    expect_array(s, "$.samples_X");
    for (std::size_t i = 0; i < s.size(); ++i)
      pf.samples_X.push_back(as_vector(s[i], "$.samples_X[" + std::to_string(i) + "]", p.nx));
  }
  try {
    p.validate();
  } catch (const Error& e) {
    throw SchemaError("$", e.what());
  }
  return pf;
}

json problem_to_json(const ProblemFile& pf) {
  const RpmioProblem& p = pf.problem;
  json doc;
  doc["nx"] = p.nx;
  doc["ny"] = p.ny;
  doc["m"] = p.m();
  doc["q"] = p.G.size();
  doc["mode"] = to_string(p.mode);
  if (p.mode == Mode::Eigmin) {
    doc["F"] = xmatrix_terms(p.F);
  } else {
    poly_terms(doc["objective"], p.f);
    doc["theta"] = json::array();
    for (const auto& t : p.theta) {
      json tj;
      poly_terms(tj, t);
      doc["theta"].push_back(tj);
    }
    json P = json::array();
    for (const auto& [key, c] : p.P.terms())
      for (int j = 0; j < c.cols(); ++j)
        for (int i = 0; i <= j; ++i)
          if (c(i, j) != 0.0)
            P.push_back({{"y_exp", exp_json(key.first)}, {"x_exp", exp_json(key.second)}, {"row", i}, {"col", j},
                         {"coeff", c(i, j)}});
    doc["P"] = P;
  }
  doc["G"] = xmatrix_terms(p.G);
  if (!pf.samples_X.empty()) {
    doc["samples_X"] = json::array();
    for (const auto& x : pf.samples_X) doc["samples_X"].push_back(vector_to_json(x));
  }
  return doc;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("$", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
}

MomentSequence moments_from_json(const json& doc, int* d_G) {
  expect_object(doc, "$");
  // A solve report: use the moments dumped for its last order.
  if (doc.contains("orders")) {
    const auto& orders = doc["orders"];
    expect_array(orders, "$.orders");
    for (auto it = orders.rbegin(); it != orders.rend(); ++it)
      if (it->contains("moments")) {
        if (d_G) {
          *d_G = 1;
          if (doc.contains("degree_profile") && doc["degree_profile"].contains("d_G"))
            *d_G = std::max(1, doc["degree_profile"]["d_G"].get<int>());
        }
        return moments_from_json((*it)["moments"], nullptr);
      }
    throw SchemaError("$.orders", "the report holds no moments (solve with --dump-moments)");
  }
  const int n = static_cast<int>(as_int(field(doc, "nvars", "$"), "$.nvars", 1, 16));
  const int m = static_cast<int>(as_int(field(doc, "m", "$"), "$.m", 1, 64));
  const int order = static_cast<int>(as_int(field(doc, "order", "$"), "$.order", 0, 40));
  if (d_G) *d_G = doc.contains("d_G") ? static_cast<int>(as_int(doc["d_G"], "$.d_G", 0, 20)) : 1;
  if (doc.contains("moments") == doc.contains("atoms"))
    throw SchemaError("$", "exactly one of \"moments\" and \"atoms\" is required");
  if (doc.contains("atoms")) {
    const auto& at = doc["atoms"];
    expect_array(at, "$.atoms");
    if (at.empty()) throw SchemaError("$.atoms", "expected at least one atom");
    AtomicMeasure mu;
    for (std::size_t i = 0; i < at.size(); ++i) {
      const std::string tp = "$.atoms[" + std::to_string(i) + "]";
      expect_object(at[i], tp);
      mu.atoms.push_back({as_vector(field(at[i], "point", tp), tp + ".point", n),
                          as_matrix(field(at[i], "weight", tp), tp + ".weight", m)});
    }
    return assemble_from_measure(mu, order);
  }
  MomentSequence s(n, m, order);
  const auto& ms = doc["moments"];
  expect_array(ms, "$.moments");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const std::string tp = "$.moments[" + std::to_string(i) + "]";
    expect_object(ms[i], tp);
    const auto a = as_exponent(field(ms[i], "exp", tp), tp + ".exp", n);
    if (degree(a) > order) throw SchemaError(tp + ".exp", "degree exceeds the order");
    s.set(a, as_matrix(field(ms[i], "value", tp), tp + ".value", m));
  }
  return s;
}

json moments_to_json(const MomentSequence& s) {
  json doc;
  doc["nvars"] = s.nvars();
  doc["m"] = s.m();
  doc["order"] = s.order();
  doc["moments"] = json::array();
  const auto basis = monomial_basis(s.nvars(), s.order());
  for (long i = 0; i < s.count(); ++i) doc["moments"].push_back({{"exp", exp_json(basis[i])}, {"value", matrix_to_json(s.block(i))}});
  return doc;
}

json matrix_to_json(const Mat& a) {
  json out = json::array();
  for (int i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    out.push_back(row);
  }
  return out;
}

json vector_to_json(const Vec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json measure_to_json(const AtomicMeasure& mu) {
  json out = json::array();
  for (const auto& a : mu.atoms) out.push_back({{"point", vector_to_json(a.point)}, {"weight", matrix_to_json(a.weight)}});
  return out;
}

}  // namespace pmi
