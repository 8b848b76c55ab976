#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "support.hpp"

using namespace pmi;
using namespace testing_support;

namespace {

// Brute-force graded order: all exponents of degree <= d, sorted by degree and
// then lexicographically descending (x1 before x2).
std::vector<ExponentVector> enumerate_basis(int n, int d) {
  std::vector<ExponentVector> out;
  ExponentVector a(n, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n) {
      out.push_back(a);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      a[i] = e;
      rec(i + 1, left - e);
    }
    a[i] = 0;
  };
  rec(0, d);
  std::stable_sort(out.begin(), out.end(), [](const ExponentVector& x, const ExponentVector& y) {
    const int dx = degree(x), dy = degree(y);
    if (dx != dy) return dx < dy;
    return x > y;
  });
  return out;
}

}  // namespace

TEST_CASE("mono_index places x1 x2 fifth in the bivariate quadratic basis") {
  CHECK(mono_index({1, 1}, 2) == 4);
  const auto b = monomial_basis(2, 2);
  REQUIRE(b.size() == 6);
  CHECK(b[0] == ExponentVector{0, 0});
  CHECK(b[1] == ExponentVector{1, 0});
  CHECK(b[2] == ExponentVector{0, 1});
  CHECK(b[3] == ExponentVector{2, 0});
  CHECK(b[4] == ExponentVector{1, 1});
  CHECK(b[5] == ExponentVector{0, 2});
}

TEST_CASE("mono_index of the constant monomial is zero") {
  for (int n = 1; n <= 5; ++n) CHECK(mono_index(exp_zero(n), 3) == 0);
}

TEST_CASE("mono_index matches brute-force enumeration of the graded basis") {
  const auto b = enumerate_basis(3, 2);
  const auto it = std::find(b.begin(), b.end(), ExponentVector{0, 1, 1});
  CHECK(mono_index({0, 1, 1}, 2) == it - b.begin());
  for (int n = 1; n <= 4; ++n)
    for (int d = 0; d <= 5; ++d) {
      const auto ref = enumerate_basis(n, d);
      REQUIRE(static_cast<long>(ref.size()) == num_monomials(n, d));
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(mono_index(ref[i], d) == static_cast<long>(i));
    }
}

TEST_CASE("mono_index round-trips through the basis") {
  for (int n = 1; n <= 4; ++n)
    for (int d = 0; d <= 5; ++d) {
      const auto b = monomial_basis(n, d);
      for (long i = 0; i < static_cast<long>(b.size()); ++i) REQUIRE(mono_index(b[i], d) == i);
    }
}

TEST_CASE("mono_index rejects degree overflow") { CHECK_THROWS_AS(mono_index({2, 1}, 2), DegreeError); }

TEST_CASE("evaluating the circle-arc constraint matrix at (1, 0)") {
  const auto pf = load_problem("arc_f1.json");
  Vec x(2);
  x << 1.0, 0.0;
  const Mat g = pf.problem.G.eval(x);
  Mat expect = Mat::Zero(4, 4);
  expect(1, 1) = 2.0;
  CHECK((g - expect).norm() < 1e-15);
}

TEST_CASE("a constant polynomial matrix evaluates to its coefficient") {
  std::mt19937_64 rng(1);
  const Mat c = random_sym(rng, 3);
  const auto p = PolyMatrix::constant(2, c);
  CHECK((p.eval(random_vec(rng, 2)) - c).norm() == 0.0);
}

TEST_CASE("evaluation agrees with per-entry scalar evaluation") {
  std::mt19937_64 rng(2);
  const auto p = random_polymatrix(rng, 3, 3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec x = random_vec(rng, 3);
    const Mat v = p.eval(x);
    CHECK((v - v.transpose()).norm() == 0.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (const auto& [a, c] : p.terms()) {
          double mono = 1.0;
          for (int l = 0; l < 3; ++l)
            for (int e = 0; e < a[l]; ++e) mono *= x[l];
          s += c(i, j) * mono;
        }
        CHECK(v(i, j) == doctest::Approx(s).epsilon(1e-12));
      }
  }
}

TEST_CASE("evaluation rejects a point of the wrong length") {
  const auto p = PolyMatrix::identity(2, 2);
  CHECK_THROWS_AS(p.eval(Vec::Zero(3)), DimensionError);
}

TEST_CASE("sums and products evaluate pointwise") {
  std::mt19937_64 rng(3);
  const auto a = random_polymatrix(rng, 2, 3, 2);
  const auto b = random_polymatrix(rng, 2, 3, 2);
  Polynomial s(2);
  s.add_term({1, 0}, 0.7);
  s.add_term({0, 2}, -1.3);
  s.add_term({0, 0}, 0.2);
  const auto sum = a + b;
  const auto prod = a * b;
  const auto scaled = a * s;
  for (int t = 0; t < 100; ++t) {
    const Vec x = random_vec(rng, 2);
    const Mat ea = a.eval(x), eb = b.eval(x);
    CHECK((sum.eval(x) - (ea + eb)).norm() <= 1e-10 * (1.0 + (ea + eb).norm()));
    CHECK((prod.eval(x) - ea * eb).norm() <= 1e-10 * (1.0 + (ea * eb).norm()));
    CHECK((scaled.eval(x) - s.eval(x) * ea).norm() <= 1e-10 * (1.0 + ea.norm()));
  }
}

TEST_CASE("asymmetric coefficients are symmetrized") {
  set_symmetry_warnings(false);
  PolyMatrix p(1, 2);
  Mat c(2, 2);
  c << 1.0, 2.0, 0.0, 1.0;
  p.add_term({0}, c);
  set_symmetry_warnings(true);
  CHECK(p.coeff({0})(0, 1) == doctest::Approx(1.0));
  CHECK(p.coeff({0})(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("zero coefficients are not stored") {
  Polynomial p(2);
  p.add_term({1, 0}, 2.0);
  p.add_term({1, 0}, -2.0);
  CHECK(p.is_zero());
  PolyMatrix q(2, 2);
  q.add_entry({0, 1}, 0, 1, 1.0);
  q.add_entry({0, 1}, 0, 1, -1.0);
  CHECK(q.is_zero());
}

TEST_CASE("block_trace of the identity") {
  CHECK((block_trace(Mat::Identity(4, 4), 2, 2) - 2.0 * Mat::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("block_trace with a single block is the trace") {
  std::mt19937_64 rng(4);
  const Mat c = random_sym(rng, 5);
  CHECK(block_trace(c, 1, 5)(0, 0) == doctest::Approx(c.trace()));
}

TEST_CASE("block_trace matches a naive block loop") {
  std::mt19937_64 rng(5);
  Mat c(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) c(i, j) = std::uniform_real_distribution<double>(-1, 1)(rng);
  const Mat t = block_trace(c, 2, 3);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      double s = 0.0;
      for (int l = 0; l < 3; ++l) s += c(3 * j + l, 3 * k + l);
      CHECK(t(j, k) == doctest::Approx(s).epsilon(1e-14));
    }
}

TEST_CASE("block_trace rejects a side not divisible by q") { CHECK_THROWS(block_trace(Mat::Zero(5, 5), 2, 2)); }

TEST_CASE("block_trace of a Kronecker product is tr(B) A") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const Mat a = random_sym(rng, 3), b = random_sym(rng, 4);
    CHECK((block_trace(kron(a, b), 3, 4) - b.trace() * a).norm() <= 1e-12);
  }
}

TEST_CASE("pairing the identity with G puts tr G on the diagonal") {
  const auto pf = load_problem("arc_f1.json");
  const PolyMatrix& g = pf.problem.G;
  const auto out = bilinear_pairing(PolyMatrix::identity(2, 2 * g.size()), g);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 5; ++t) {
    const Vec x = random_vec(rng, 2);
    const Mat v = out.eval(x);
    CHECK(v(0, 0) == doctest::Approx(g.eval(x).trace()));
    CHECK(v(1, 1) == doctest::Approx(g.eval(x).trace()));
    CHECK(std::abs(v(0, 1)) < 1e-14);
  }
}

TEST_CASE("pairing with m = 1 is the trace inner product") {
  std::mt19937_64 rng(8);
  const Mat a = random_sym(rng, 3), b = random_sym(rng, 3);
  CHECK(bilinear_pairing(a, b, 1)(0, 0) == doctest::Approx((a.transpose() * b).trace()));
}

TEST_CASE("pairing matches Tr_m(A^T (I_m kron B)) computed entrywise") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    const Mat a = random_sym(rng, 4), b = random_sym(rng, 2);
    const Mat big = a.transpose() * kron(Mat::Identity(2, 2), b);
    Mat ref(2, 2);
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) ref(j, k) = big.block(2 * j, 2 * k, 2, 2).trace();
    CHECK((bilinear_pairing(a, b, 2) - ref).norm() <= 1e-13);
  }
}

TEST_CASE("pairing rejects incompatible sizes") {
  CHECK_THROWS(bilinear_pairing(Mat::Zero(5, 5), Mat::Zero(2, 2), 2));
}

TEST_CASE("Hessian of a quadratic is constant") {
  const auto pf = load_problem("arc_f1.json");
  const auto h = hessian(pf.problem.f);
  CHECK(h.degree() == 0);
  CHECK((h.coeff({0, 0}) - 2.0 * Mat::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("Gram matrices map to u^T Z u") {
  std::mt19937_64 rng(10);
  const int n = 2, d = 2, q = 2;
  const long s = num_monomials(n, d);
  const Mat z = random_psd(rng, q * static_cast<int>(s), 3);
  const auto p = gram_to_polymatrix(z, n, d, q);
  const auto basis = monomial_basis(n, d);
  for (int t = 0; t < 10; ++t) {
    const Vec x = random_vec(rng, n);
    Mat u = Mat::Zero(q * s, q);
    for (long i = 0; i < s; ++i) u.block(i * q, 0, q, q) = monomial_value(basis[i], x) * Mat::Identity(q, q);
    CHECK((p.eval(x) - u.transpose() * z * u).norm() <= 1e-11);
  }
}
