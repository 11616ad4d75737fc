#include "doctest.h"
#include "support.hpp"

using namespace fftest;

TEST_CASE("rationals serialize as p/q") {
  CHECK(to_string(Q("6/4")) == "3/2");
  CHECK(to_string(Q("-10/5")) == "-2");
  CHECK(to_string(Q("0")) == "0");
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("x"), Error);
}

TEST_CASE("rref examples") {
  auto r = rref(M({{2, 4}, {1, 2}}));
  CHECK(r.reduced == M({{1, 2}, {0, 0}}));
  CHECK(r.pivots == std::vector<std::size_t>{0});
  auto id = rref(Matrix::identity(3));
  CHECK(id.reduced == Matrix::identity(3));
  CHECK(id.pivots == std::vector<std::size_t>{0, 1, 2});
  auto sw = rref(M({{0, 1}, {1, 0}}));
  CHECK(sw.reduced == Matrix::identity(2));
}

TEST_CASE("kernel examples") {
  CHECK(kernel(M({{1, 1}})) == M({{-1, 1}}));
  CHECK(kernel(Matrix::identity(3)).rows() == 0);
  Matrix k = kernel(M({{1, 2}, {2, 4}}));
  REQUIRE(k.rows() == 1);
  CHECK(k(0, 0) == -2 * k(0, 1));
}

TEST_CASE("rank-nullity on random matrices") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 40; ++it) {
    Matrix m = random_matrix(rng, 1 + it % 6, -2, 2, 0.5);
    Matrix k = kernel(m);
    CHECK(rank(m) == m.cols() - k.rows());
    for (std::size_t r = 0; r < k.rows(); ++r) CHECK(is_zero(m.apply(k.row(r))));
  }
}

TEST_CASE("charpoly examples") {
  CHECK(charpoly(Matrix(2, 2)) == P({0, 0, 1}));
  CHECK(charpoly(M({{0, 1}, {-1, 0}})) == P({1, 0, 1}));
  CHECK(charpoly(M({{1, 1}, {0, 1}})) == P({1, -2, 1}));
  // sympy oracle
  CHECK(charpoly(M({{2, 1, 0, 3}, {0, 2, 5, 1}, {1, 0, -1, 2}, {4, 1, 1, 0}})) == P({-16, 3, -15, -3, 1}));
  CHECK_THROWS_AS(charpoly(Matrix(2, 3)), Error);
}

TEST_CASE("charpoly annihilates (Cayley-Hamilton)") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 30; ++it) {
    Matrix m = random_matrix(rng, 1 + it % 7, -3, 3, 0.6);
    CHECK(charpoly(m).eval(m).is_zero());
  }
}

TEST_CASE("factorization over Q (sympy oracle)") {
  auto f = factor(P({-1, 0, 0, 0, 1}));
  REQUIRE(f.size() == 3);
  CHECK(f[0].first == P({-1, 1}));
  CHECK(f[1].first == P({1, 1}));
  CHECK(f[2].first == P({1, 0, 1}));
  auto g = factor(P({-3, 1}) * P({1, 0, 1}) * P({1, 0, 1}));
  REQUIRE(g.size() == 2);
  CHECK(g[1].first == P({1, 0, 1}));
  CHECK(g[1].second == 2);
  // irreducible over Q, reducible modulo every prime
  CHECK(factor(P({1, 0, 0, 0, -1, 0, 0, 0, 1})).size() == 1);
  auto h = factor(P({-2, 0, 1}) * P({-3, 0, 1}) * P({-6, 0, 1}));
  CHECK(h.size() == 3);
  auto k = factor(P({6, 5, -38, 5, 6}));
  REQUIRE(k.size() == 4);
  CHECK(k[0].first.degree() == 1);
}

TEST_CASE("jordan_chevalley examples") {
  auto a = jordan_chevalley(M({{0, 1}, {0, 0}}));
  CHECK(a.ss.is_zero());
  CHECK(a.nil == M({{0, 1}, {0, 0}}));
  auto b = jordan_chevalley(M({{1, 1}, {0, 1}}));
  CHECK(b.ss == Matrix::identity(2));
  CHECK(b.nil == M({{0, 1}, {0, 0}}));
  auto c = jordan_chevalley(M({{0, 1}, {-1, 0}}));
  CHECK(c.ss == M({{0, 1}, {-1, 0}}));
  CHECK(c.nil.is_zero());
  CHECK_THROWS_AS(jordan_chevalley(Matrix(1, 2)), Error);
}

TEST_CASE("jordan_chevalley properties") {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 40; ++it) {
    const std::size_t n = 1 + it % 5;
    Matrix base = random_matrix(rng, n, -2, 2, 0.5);
    // repeated eigenvalues make the nilpotent part nontrivial
    Matrix m = base * base - base;
    auto jc = jordan_chevalley(m);
    CHECK(jc.ss + jc.nil == m);
    CHECK(commutator(jc.ss, jc.nil).is_zero());
    CHECK(is_nilpotent(jc.nil));
    CHECK(is_semisimple(jc.ss));
    CHECK(polynomial_in(m, jc.ss).has_value());
  }
}

TEST_CASE("minimal polynomial") {
  CHECK(minimal_polynomial(Matrix::identity(3)) == P({-1, 1}));
  CHECK(minimal_polynomial(M({{1, 1}, {0, 1}})) == P({1, -2, 1}));
}
