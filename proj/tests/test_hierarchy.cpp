#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "support.hpp"

using namespace pmi;
using namespace testing_support;

namespace {

double min_eig(const Mat& a) { return Eigen::SelfAdjointEigenSolver<Mat>(a, Eigen::EigenvaluesOnly).eigenvalues()(0); }

// min y1 + y2 s.t. [[y1, x1], [x1, y2]] PSD on the unit disc; optimum 2 at (1, 1).
RpmioProblem disc_problem(Mode mode) {
  RpmioProblem p;
  p.nx = 2;
  p.ny = 2;
  p.mode = mode;
  p.f = Polynomial(2);
  p.f.add_term({1, 0}, 1.0);
  p.f.add_term({0, 1}, 1.0);
  p.P = BiPolyMatrix(2, 2, 2);
  p.P.add_entry({1, 0}, {0, 0}, 0, 0, 1.0);
  p.P.add_entry({0, 1}, {0, 0}, 1, 1, 1.0);
  p.P.add_entry({0, 0}, {1, 0}, 0, 1, 1.0);
  p.G = PolyMatrix(2, 1);
  p.G.add_entry({0, 0}, 0, 0, 1.0);
  p.G.add_entry({2, 0}, 0, 0, -1.0);
  p.G.add_entry({0, 2}, 0, 0, -1.0);
  return p;
}

struct SolvedPair {
  SdpSolution primal, dual;
};

SolvedPair solve_pair(const Relaxation& r) { return {solve(r.primal), solve(r.dual)}; }

// Points of the quarter arcs {x1^2 + x2^2 = 1, x1 x2 >= 0}.
std::vector<Vec> arc_points(int count) {
  std::vector<Vec> out;
  const int half = count / 2;
  for (int i = 0; i < count; ++i) {
    const double t = (M_PI / 2) * (i % half) / (half - 1);
    Vec x(2);
    x << std::cos(t), std::sin(t);
    out.push_back(i < half ? x : Vec(-x));
  }
  return out;
}

}  // namespace

TEST_CASE("degree profiles of the quarter-arc problems") {
  const auto f1 = load_problem("arc_f1.json").problem;
  const auto d = degree_profile(f1);
  CHECK(d.k_y == 2);
  CHECK(d.k_x == 2);
  CHECK(d.d_G == 1);
  CHECK(d.d_Theta == 0);
  CHECK(minimal_order(f1) == 1);

  const auto cv = load_problem("arc_convex.json").problem;
  CHECK(degree_profile(cv).k_y == 6);
  CHECK(minimal_order(cv) == 3);

  const auto eg = load_problem("eigmin_ellipse.json").problem;
  CHECK(degree_profile(eg).k_y == 0);
  CHECK(minimal_order(eg) == 1);
}

TEST_CASE("a theta constraint contributes its half-degree") {
  auto p = load_problem("arc_f1.json").problem;
  Polynomial th(2);
  th.add_term({0, 0}, 1.0);
  th.add_term({4, 0}, -1.0);
  p.theta.push_back(th);
  CHECK(degree_profile(p).d_Theta == 2);
}

TEST_CASE("relaxation layout: S in the primal, s in the dual") {
  const auto p = load_problem("arc_f1.json").problem;
  const auto r = build_relaxation(p, 2);
  CHECK(r.k == 2);
  CHECK(r.S.m == 2);
  CHECK(r.S.order == 4);
  REQUIRE(r.s.has_value());
  CHECK(r.s->unit_zero);
  CHECK(r.t_y == 1);
  CHECK_NOTHROW(r.primal.validate());
  CHECK_NOTHROW(r.dual.validate());
  CHECK(r.primal.sense == Sense::Maximize);
  CHECK(r.dual.sense == Sense::Minimize);

  const auto rc = build_convex(p, 2);
  CHECK(rc.t_y == 2);
}

TEST_CASE("relaxation orders below the minimum are rejected") {
  const auto p = load_problem("arc_convex.json").problem;
  CHECK_THROWS_AS(build_relaxation(p, 2), DegreeError);
}

TEST_CASE("robust PSD program reproduces the smallest-eigenvalue relaxation") {
  const auto p = load_problem("eigmin_ellipse.json").problem;
  for (int k = 1; k <= 2; ++k) {
    const auto eig = solve_pair(build_eigmin(p.F, p.G, k));
    // inf -y s.t. F - y I in Q_k(G): the negated smallest-eigenvalue bound.
    Vec c(1);
    c << -1.0;
    const auto lin = solve_pair(build_rpsdp(c, {p.F * -1.0, PolyMatrix::identity(2, p.F.size()) * -1.0}, p.G, k));
    REQUIRE(usable(eig.dual.status));
    REQUIRE(usable(lin.dual.status));
    CHECK(lin.dual.primal_obj == doctest::Approx(-eig.dual.primal_obj).epsilon(1e-5));
    CHECK(lin.primal.primal_obj == doctest::Approx(-eig.primal.primal_obj).epsilon(1e-5));
  }
}

TEST_CASE("eigenvalue relaxation of the ellipse-coupled problem reaches -4") {
  const auto p = load_problem("eigmin_ellipse.json").problem;
  const auto r = solve_pair(build_relaxation(p, 2));
  REQUIRE(usable(r.dual.status));
  CHECK(r.dual.primal_obj == doctest::Approx(-4.0).epsilon(1e-5));
  CHECK(r.primal.primal_obj == doctest::Approx(-4.0).epsilon(1e-5));
}

TEST_CASE("linear mode and SOS-convex mode agree on an affine problem") {
  const auto lin = solve_pair(build_relaxation(disc_problem(Mode::Linear), 1));
  const auto sc = solve_pair(build_relaxation(disc_problem(Mode::SosConvex), 1));
  REQUIRE(usable(lin.dual.status));
  REQUIRE(usable(sc.dual.status));
  CHECK(lin.dual.primal_obj == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(sc.dual.primal_obj == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(lin.primal.primal_obj == doctest::Approx(sc.primal.primal_obj).epsilon(1e-6));
}

TEST_CASE("linear mode rejects a nonlinear objective") {
  auto p = load_problem("arc_f1.json").problem;
  p.mode = Mode::Linear;
  CHECK_THROWS(build_relaxation(p, 2));
}

TEST_CASE("SOS-convex and convex constructions agree on an SOS-convex objective") {
  const auto p = load_problem("arc_f1.json").problem;
  const auto a = solve_pair(build_sos_convex(p, 2));
  const auto b = solve_pair(build_convex(p, 2));
  REQUIRE(usable(a.dual.status));
  REQUIRE(usable(b.dual.status));
  CHECK(a.dual.primal_obj == doctest::Approx(0.835786).epsilon(1e-5));
  CHECK(b.dual.primal_obj == doctest::Approx(a.dual.primal_obj).epsilon(1e-5));
}

TEST_CASE("relaxation values are non-increasing in the order for SOS-convex problems") {
  for (const char* name : {"arc_f1.json", "arc_f2.json"}) {
    const auto p = load_problem(name).problem;
    double prev = 1e300;
    for (int k = 1; k <= 3; ++k) {
      const auto d = solve(build_relaxation(p, k).dual);
      REQUIRE(usable(d.status));
      CHECK(d.primal_obj <= prev + 1e-6);
      prev = d.primal_obj;
    }
  }
}

TEST_CASE("primal and dual relaxations bracket each other") {
  const auto p = load_problem("arc_f2.json").problem;
  const auto r = solve_pair(build_relaxation(p, 2));
  REQUIRE(usable(r.primal.status));
  REQUIRE(usable(r.dual.status));
  CHECK(r.primal.primal_obj <= r.dual.primal_obj + 1e-6);
  CHECK(r.dual.primal_obj == doctest::Approx(0.611146).epsilon(1e-5));
}

TEST_CASE("coefficient matching covers every monomial and entry of a Gram identity") {
  std::mt19937_64 rng(41);
  const int n = 2, d = 1, m = 2;
  const int side = m * static_cast<int>(num_monomials(n, d));
  const Mat z = random_psd(rng, side, side);
  const auto target = gram_to_polymatrix(z, n, d, m);

  SdpBuilder b;
  const auto zv = b.add_sym_matrix(side);
  b.add_psd(zv);
  CoefficientRows rows(b);
  add_gram_sum(rows, zv, n, d, m, 1.0);
  rows.add_polymatrix(target, -1.0);
  const auto inst = b.build();
  CHECK(inst.neq() == 3 * static_cast<int>(num_monomials(n, 2 * d)));
  Vec y = Vec::Zero(inst.nfree);
  for (int i = 0; i < side; ++i)
    for (int j = i; j < side; ++j) y[zv.var(i, j)] = z(i, j);
  CHECK((inst.E * y - inst.e).norm() <= 1e-12);
  CHECK((extract_sym(zv, y) - z).norm() == 0.0);
}

TEST_CASE("coefficient matching of a localized Gram term") {
  std::mt19937_64 rng(42);
  const auto g = load_problem("arc_f1.json").problem.G;
  const int n = 2, d = 0, m = 2, q = g.size();
  const int side = m * q * static_cast<int>(num_monomials(n, d));
  const Mat z = random_psd(rng, side, side);
  const auto target = bilinear_pairing(gram_to_polymatrix(z, n, d, m * q), g);

  SdpBuilder b;
  const auto zv = b.add_sym_matrix(side);
  b.add_psd(zv);
  CoefficientRows rows(b);
  add_gram_localized(rows, zv, g, n, d, m, 1.0);
  rows.add_polymatrix(target, -1.0);
  const auto inst = b.build();
  Vec y = Vec::Zero(inst.nfree);
  for (int i = 0; i < side; ++i)
    for (int j = i; j < side; ++j) y[zv.var(i, j)] = z(i, j);
  CHECK((inst.E * y - inst.e).norm() <= 1e-12);
}

TEST_CASE("SOS matrix certificates") {
  // [[1 + x^2, x], [x, 1]] = (1, x)^T (1, x) + diag(x^2 ... ) is SOS.
  PolyMatrix a(1, 2);
  a.add_entry({0}, 0, 0, 1.0);
  a.add_entry({2}, 0, 0, 1.0);
  a.add_entry({1}, 0, 1, 1.0);
  a.add_entry({0}, 1, 1, 1.0);
  const auto r = certify_sos_matrix(a);
  CHECK(r.certified);
  REQUIRE(r.gram.has_value());
  CHECK(min_eig(*r.gram) >= -1e-8);
  CHECK(r.reconstruction_error <= 1e-7);

  PolyMatrix neg(1, 1);
  neg.add_entry({2}, 0, 0, -1.0);
  CHECK_FALSE(certify_sos_matrix(neg).certified);
}

TEST_CASE("SOS-convexity checks on objectives") {
  CHECK(certify_sos_convex(load_problem("arc_f1.json").problem.f));
  CHECK(certify_sos_convex(load_problem("arc_f2.json").problem.f));
  CHECK_FALSE(certify_sos_convex(convex_not_sos_convex()));
  Polynomial cubic(1);
  cubic.add_term({3}, 1.0);
  CHECK_FALSE(certify_sos_convex(cubic));
}

TEST_CASE("uniform PSD-SOS-convexity of -P at the sample points") {
  const auto f1 = load_problem("arc_f1.json");
  for (const auto& x : f1.samples_X) CHECK(certify_uniform_psd_sos_convex(-f1.problem.P.at_x(x)));
  const auto nc = load_problem("arc_nonconvex.json");
  bool all = true;
  for (const auto& x : nc.samples_X) all = all && certify_uniform_psd_sos_convex(-nc.problem.P.at_x(x));
  CHECK_FALSE(all);
}

TEST_CASE("Archimedean certificates") {
  const auto g = load_problem("arc_f1.json").problem.G;
  CHECK(certify_archimedean(g, 1.1, 1));
  PolyMatrix disc(2, 1);
  disc.add_entry({0, 0}, 0, 0, 1.0);
  disc.add_entry({2, 0}, 0, 0, -1.0);
  disc.add_entry({0, 2}, 0, 0, -1.0);
  CHECK(certify_archimedean(disc, 1.0, 0));
  PolyMatrix half(2, 1);  // x1 >= 0 is unbounded
  half.add_entry({1, 0}, 0, 0, 1.0);
  CHECK_FALSE(certify_archimedean(half, 10.0, 1));
}

TEST_CASE("strong-duality diagnostics") {
  const auto arc = diagnose_strong_duality(load_problem("arc_f1.json").problem, 7);
  CHECK_FALSE(arc.interior_evidence);
  const auto eg = diagnose_strong_duality(load_problem("eigmin_ellipse.json").problem, 7);
  CHECK(eg.interior_evidence);
  REQUIRE(eg.interior_point.size() == 2);
  CHECK(min_eig(load_problem("eigmin_ellipse.json").problem.G.eval(eg.interior_point)) > 0.0);
}

TEST_CASE("minimizers returned by the hierarchy are robustly feasible") {
  DriverSettings ds;
  ds.timestamps = false;
  const auto pts = arc_points(200);
  for (const char* name : {"arc_f1.json", "arc_f2.json", "arc_nonconvex.json"}) {
    INFO(name);
    auto p = load_problem(name).problem;
    const auto rep = run_hierarchy(p, minimal_order(p), 3, ds);
    REQUIRE(rep.outcome == Outcome::Certified);
    REQUIRE(rep.orders.back().minimizer.has_value());
    const Vec y = *rep.orders.back().minimizer;
    double worst = 1e300;
    for (const auto& x : pts) worst = std::min(worst, min_eig(p.P.eval(y, x)));
    CHECK(worst >= -1e-5);
  }
}

TEST_CASE("an active theta constraint is respected by the minimizer") {
  auto p = disc_problem(Mode::SosConvex);
  Polynomial th(2);  // y1 >= 2, so the optimum moves to (2, 1/2)
  th.add_term({1, 0}, 1.0);
  th.add_term({0, 0}, -2.0);
  p.theta.push_back(th);
  DriverSettings ds;
  ds.timestamps = false;
  const auto rep = run_hierarchy(p, minimal_order(p), 3, ds);
  REQUIRE(rep.outcome == Outcome::Certified);
  const Vec y = *rep.orders.back().minimizer;
  CHECK(th.eval(y) >= -1e-6);
  double worst = 1e300;
  for (int i = 0; i < 200; ++i) {
    Vec x(2);
    x << std::cos(2 * M_PI * i / 200), std::sin(2 * M_PI * i / 200);
    worst = std::min(worst, min_eig(p.P.eval(y, x)));
  }
  CHECK(worst >= -1e-5);
  CHECK(p.f.eval(y) == doctest::Approx(2.5).epsilon(1e-5));
}
