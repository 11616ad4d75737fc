#include "doctest.h"
#include "random_objects.hpp"

using namespace fftest;

namespace {

Vector e(std::size_t i, std::size_t K = 0) { return Vector::unit(Side::V, K, i); }
Vector f(std::size_t i, std::size_t K = 0) { return Vector::unit(Side::W, K, i); }
EpSet evens() { return EpSet(0, 2, {}, {0}); }
Subspace span_evens() { return Subspace::aligned(Side::V, 0, evens()); }

std::size_t bound_for(const Subspace& w, std::size_t n) { return n + w.threshold() + 2 * w.period() + 2; }

}  // namespace

TEST_CASE("validate_model examples") {
  CHECK(model_report(plain_model()).valid);
  CHECK(model_report(row_of_ones_model()).valid);
  Model dup = plain_model();
  dup.v_augs = {EpSeq({1}, {0})};
  dup.cross = Matrix(1, 0);
  auto rep = model_report(dup);
  CHECK_FALSE(rep.valid);
  REQUIRE(rep.witness);
  Vector expected = Vector::aug_unit(Side::V, 1, 0);
  expected.set(0, -1);
  CHECK(*rep.witness == expected);
  CHECK_THROWS_WITH_AS(validate_model(dup), doctest::Contains("a0 - e0"), Error);
}

TEST_CASE("pair examples") {
  Model m = plain_model();
  CHECK(pair(m, e(3), f(3)) == 1);
  CHECK(pair(m, e(3), f(4)) == 0);
  Model ones = row_of_ones_model();
  CHECK(pair(ones, Vector::aug_unit(Side::V, 1, 0), f(7)) == 1);
  CHECK_THROWS_AS(pair(m, e(1), e(1)), Error);
}

TEST_CASE("subspace_op examples") {
  Subspace s = subspace_op(SubspaceOp::Sum, span_evens(), Subspace::span(Side::V, 0, {e(1)}));
  CHECK(s == Subspace::from_parts(Side::V, 0, evens(), 0, 1, {}, {e(1)}));
  // the aligned part is maximal, so e1 joins it
  CHECK(s.aligned_set() == set_op(SetOp::Union, evens(), EpSet::finite({1})));
  CHECK(s.corrections().empty());
  Subspace threes = Subspace::aligned(Side::V, 0, EpSet(0, 3, {}, {0}));
  Subspace six = subspace_op(SubspaceOp::Intersection, span_evens(), threes);
  CHECK(six == Subspace::aligned(Side::V, 0, EpSet(0, 6, {}, {0})));
  CHECK(subspace_op(SubspaceOp::Intersection, s, s) == s);
  CHECK_THROWS_AS(subspace_op(SubspaceOp::Sum, s, Subspace::zero(Side::W, 0)), Error);
}

TEST_CASE("perp examples") {
  Model m = plain_model();
  CHECK(perp(m, Subspace::span(Side::V, 0, {e(0)})) == Subspace::aligned(Side::W, 0, EpSet(1, 1, {}, {0})));
  Model ones = row_of_ones_model();
  CHECK(perp(ones, Subspace::aligned(Side::V, 1, EpSet::all())) == Subspace::zero(Side::W, 0));
  CHECK(perp(m, Subspace::zero(Side::V, 0)) == Subspace::full(Side::W, 0));
  // {x : x_0 + ṽ-coefficient = 0}
  Subspace g0 = Subspace::span(Side::W, 0, {f(0)});
  Subspace p = perp(ones, g0);
  Vector d = Vector::aug_unit(Side::V, 1, 0);
  d.set(0, -1);
  CHECK(p.member(d));
  CHECK(p.member(e(5, 1)));
  CHECK_FALSE(p.member(e(0, 1)));
  CHECK(p.aligned_set() == EpSet(1, 1, {}, {0}));
}

TEST_CASE("closure examples") {
  Model m = plain_model();
  CHECK(closure(m, span_evens()) == span_evens());
  CHECK(is_closed(m, span_evens()));
  Model ones = row_of_ones_model();
  Subspace all_e = Subspace::aligned(Side::V, 1, EpSet::all());
  CHECK(closure(ones, all_e) == Subspace::full(Side::V, 1));
  CHECK_FALSE(is_closed(ones, all_e));
  CHECK(closure(m, Subspace::zero(Side::V, 0)) == Subspace::zero(Side::V, 0));
}

TEST_CASE("member examples") {
  CHECK(span_evens().member(e(4)));
  CHECK_FALSE(span_evens().member(e(3)));
  Subspace all_e = Subspace::aligned(Side::V, 1, EpSet::all());
  CHECK_FALSE(all_e.member(Vector::aug_unit(Side::V, 1, 0)));
  Subspace two = Subspace::span(Side::V, 0, {e(0), e(1)});
  CHECK(two.member(add(e(0), e(1))));
  CHECK_THROWS_AS(two.member(f(0)), Error);
}

TEST_CASE("truncate examples") {
  CHECK(truncate(plain_model(), 3).pairing == Matrix::identity(3));
  auto t = truncate(row_of_ones_model(), 2);
  CHECK(t.pairing == M({{1, 0}, {0, 1}, {1, 1}}));
  CHECK(t.v_radical == M({{-1, -1, 1}}));
  CHECK(t.w_radical.rows() == 0);
  CHECK(truncate(span_evens(), 5) == M({{1, 0, 0, 0, 0}, {0, 0, 1, 0, 0}, {0, 0, 0, 0, 1}}));
  CHECK_THROWS_AS(truncate(plain_model(), 0), Error);
}

TEST_CASE("balanced classes") {
  // zero-sum vectors on the tail: not closed in the plain model
  Subspace z = Subspace::balanced(Side::V, 0, 0, 1, {0});
  CHECK(z.member(add(e(2), scale(-1, e(9)))));
  CHECK_FALSE(z.member(e(2)));
  CHECK(perp(plain_model(), z) == Subspace::zero(Side::W, 0));
  CHECK_FALSE(is_closed(plain_model(), z));
  // in the row-of-ones model that same subspace is the perp of span{ṽ}'s dual image
  Model ones = row_of_ones_model();
  Subspace vt = Subspace::span(Side::V, 1, {Vector::aug_unit(Side::V, 1, 0)});
  Subspace q = perp(ones, vt);
  CHECK(q == Subspace::balanced(Side::W, 0, 0, 1, {0}));
  CHECK(q.balanced_residues() == std::vector<std::size_t>{0});
}

TEST_CASE("form models") {
  Model sym = form_model(FormKind::Symmetric);
  CHECK(theta(sym, e(0)) == f(1));
  CHECK(theta_inverse(sym, theta(sym, e(6))) == e(6));
  Subspace fp = form_perp(sym, Subspace::span(Side::V, 0, {e(0)}));
  CHECK(fp.aligned_set() == set_op(SetOp::Complement, EpSet::finite({1})));
  Model alt = form_model(FormKind::Antisymmetric);
  CHECK(form_value(alt, e(0), e(1)) == 1);
  CHECK(form_value(alt, e(1), e(0)) == -1);
  CHECK(form_value(alt, e(2), e(2)) == 0);
  Involution bad = default_involution(FormKind::Symmetric);
  bad.block = {0, 1};  // fixed points
  CHECK_THROWS_AS(form_model(FormKind::Antisymmetric, bad), Error);

  // a non-default involution: head (0 2)(1), blocks of 4 paired (0 3)(1 2)
  Involution t;
  t.threshold = 3;
  t.period = 4;
  t.head = {2, 1, 0};
  t.head_signs = {1, -1, 1};
  t.block = {3, 2, 1, 0};
  t.block_signs = {-1, 1, 1, -1};
  Model m = form_model(FormKind::Symmetric, t);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    Vector u = random_vector(rng, Side::V, 0, 12), v = random_vector(rng, Side::V, 0, 12);
    CHECK(form_value(m, u, v) == form_value(m, v, u));
    CHECK(theta_inverse(m, theta(m, u)) == u);
  }
  for (int k = 0; k < 60; ++k) {
    Subspace a = random_subspace(rng, plain_model(), Side::V);
    Subspace ta = theta(m, a);
    CHECK(theta_inverse(m, ta) == a);
    for (const auto& v : generators_below(a, 16)) CHECK(ta.member(theta(m, v)));
    Subspace fp2 = form_perp(m, a);
    for (const auto& u : generators_below(fp2, 16))
      for (const auto& v : generators_below(a, 16)) CHECK(form_value(m, v, u) == 0);
  }
}

TEST_CASE("decomposition round-trips and canonical equality") {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 300; ++k) {
    Model m = random_model(rng);
    Side s = k % 2 ? Side::V : Side::W;
    Subspace a = random_subspace(rng, m, s);
    auto bal = a.balanced_residues();
    Subspace back = Subspace::from_parts(s, a.aug_count(), a.aligned_set(), a.threshold(), a.period(), bal,
                                         a.corrections());
    CHECK(back == a);
    Subspace r = a.refined(a.threshold() + 3, a.period() * 2);
    CHECK(Subspace::from_window(s, r.aug_count(), r.threshold(), r.period(), r.tail(), r.lattice()) == a);
    for (const auto& c : a.corrections()) {
      CHECK(a.member(c));
      for (const auto& [i, x] : c.basis) CHECK_FALSE(a.aligned_set().contains(i));
    }
    Subspace b = random_subspace(rng, m, s);
    CHECK((a == b) == (contains(a, b) && contains(b, a)));
  }
}

TEST_CASE("sum and intersection against generator truncations") {
  std::mt19937_64 rng(1234);
  int nontrivial_cap = 0, balanced_seen = 0;
  for (int k = 0; k < 150; ++k) {
    Model m = random_model(rng);
    const Side s = Side::V;
    const std::size_t K = m.aug_count(s);
    Subspace a = random_subspace(rng, m, s), b = random_subspace(rng, m, s);
    Subspace sum = subspace_op(SubspaceOp::Sum, a, b), cap = subspace_op(SubspaceOp::Intersection, a, b);
    CHECK(contains(sum, a));
    CHECK(contains(sum, b));
    CHECK(contains(a, cap));
    CHECK(contains(b, cap));
    balanced_seen += !sum.balanced_residues().empty();
    nontrivial_cap += !cap.is_finite_dimensional() && cap != a && cap != b;
    for (std::size_t n : {4, 9, 15}) {
      const std::size_t bound = std::max({bound_for(a, n), bound_for(b, n), bound_for(sum, n), bound_for(cap, n)});
      Matrix ta = generator_truncation(generators_below(a, bound), K, n, bound);
      Matrix tb = generator_truncation(generators_below(b, bound), K, n, bound);
      CHECK(truncate(a, n) == ta);
      CHECK(truncate(cap, n) == (ta.rows() && tb.rows() ? row_space_intersection(ta, tb) : Matrix(0, n + K)));
      auto gs = generators_below(a, bound);
      auto gb = generators_below(b, bound);
      gs.insert(gs.end(), gb.begin(), gb.end());
      CHECK(truncate(sum, n) == generator_truncation(gs, K, n, bound));
    }
  }
  CHECK(nontrivial_cap > 20);
  CHECK(balanced_seen > 10);
}

TEST_CASE("perp against direct pairing") {
  std::mt19937_64 rng(4321);
  int aug_mixed = 0;
  for (int k = 0; k < 150; ++k) {
    Model m = random_model(rng);
    const Side s = k % 2 ? Side::V : Side::W, o = opposite(s);
    Subspace a = random_subspace(rng, m, s);
    Subspace p = perp(m, a);
    CHECK(p.side() == o);
    for (const auto& c : p.corrections()) aug_mixed += !is_zero(c.aug) && !c.basis.empty();
    for (std::size_t n : {5, 12}) {
      // finite section of the annihilator, from pairings against a spanning family
      const std::size_t bound = bound_for(a, n) + m.window().threshold + 2 * m.window().period;
      auto gens = generators_below(a, bound);
      const std::size_t Ko = m.aug_count(o);
      Matrix sys(0, n + Ko);
      for (const auto& g : gens) {
        Vec row(n + Ko);
        for (std::size_t j = 0; j < n; ++j) row[j] = pair(m, g, Vector::unit(o, Ko, j));
        for (std::size_t l = 0; l < Ko; ++l) row[n + l] = pair(m, g, Vector::aug_unit(o, Ko, l));
        sys.append_row(row);
      }
      Matrix direct = sys.rows() ? kernel(sys) : Matrix::identity(n + Ko);
      CHECK(truncate(p, n) == row_basis(direct));
    }
  }
  CHECK(aug_mixed > 10);
}

TEST_CASE("perp laws on random subspaces") {
  std::mt19937_64 rng(555);
  for (int k = 0; k < 200; ++k) {
    Model m = random_model(rng);
    const Side s = k % 2 ? Side::V : Side::W;
    Subspace a = random_subspace(rng, m, s), b = random_subspace(rng, m, s);
    Subspace pa = perp(m, a);
    CHECK(perp(m, perp(m, pa)) == pa);
    Subspace ca = closure(m, a);
    CHECK(contains(ca, a));
    CHECK(closure(m, ca) == ca);
    Subspace ab = subspace_op(SubspaceOp::Sum, a, b);
    CHECK(contains(pa, perp(m, ab)));
    CHECK(orthogonal(m, a, pa));
  }
}

TEST_CASE("aligned subspaces are closed in the plain model") {
  std::mt19937_64 rng(808);
  Model m = plain_model();
  for (int k = 0; k < 300; ++k) {
    Subspace a = random_subspace(rng, m, k % 2 ? Side::V : Side::W, false);
    CHECK(is_closed(m, a));
  }
}
