#pragma once
// Shared fixtures for the unit tests and the acceptance binary.

#include <random>
#include <string>

#include "pmi/driver.hpp"

namespace testing_support {

using namespace pmi;

inline ProblemFile load_problem(const std::string& name) {
  return problem_from_json(read_json_file(std::string(PMI_TEST_DATA_DIR) + "/" + name));
}

// A bivariate sextic that is convex but not SOS-convex.
inline Polynomial convex_not_sos_convex() {
  Polynomial h(2);
  struct T {
    int a, b;
    double c;
  };
  const T ts[] = {{0, 0, 89},          {1, 0, 48},         {0, 1, -364},         {2, 0, 721},
                  {1, 1, 316},         {0, 2, 3817. / 4},  {3, 0, -14},          {2, 1, -2550},
                  {1, 2, -968},        {0, 3, -2060},      {4, 0, 363},          {3, 1, 794},
                  {2, 2, 7269. / 2},   {1, 3, 49},         {0, 4, 49171. / 16},  {5, 0, -9},
                  {4, 1, -363},        {3, 2, -3825. / 2}, {2, 3, -4041. / 2},   {1, 4, 1710},
                  {0, 5, -9005. / 4},  {6, 0, 77},         {5, 1, -301. / 2},    {4, 2, 2143. / 4},
                  {3, 3, 1671. / 2},   {2, 4, 14901. / 16}, {1, 5, -1399. / 2},  {0, 6, 51531. / 64}};
  for (const auto& t : ts) h.add_term(ExponentVector{t.a, t.b}, t.c);
  return h;
}

inline Mat random_psd(std::mt19937_64& rng, int n, int rank) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat b(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) b(i, j) = u(rng);
  return b * b.transpose();
}

inline Mat random_sym(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = u(rng);
  return 0.5 * (a + a.transpose());
}

inline Vec random_vec(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

// Random polynomial matrix with entries of degree <= d.
inline PolyMatrix random_polymatrix(std::mt19937_64& rng, int n, int size, int d) {
  PolyMatrix p(n, size);
  for (const auto& a : monomial_basis(n, d)) p.add_term(a, random_sym(rng, size));
  return p;
}

// Random measure: `atoms` points in [-1, 1]^n with PSD weights of rank 1..m.
inline AtomicMeasure random_measure(std::mt19937_64& rng, int n, int m, int atoms) {
  AtomicMeasure mu;
  std::uniform_int_distribution<int> rk(1, m);
  for (int i = 0; i < atoms; ++i) mu.atoms.push_back({random_vec(rng, n), random_psd(rng, m, rk(rng))});
  return mu;
}

}  // namespace testing_support
