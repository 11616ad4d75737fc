#include "doctest.h"
#include "flagforge/epcore.hpp"
#include "support.hpp"

using namespace fftest;

namespace {

EpSet evens() { return EpSet(0, 2, {}, {0}); }

EpSet random_set(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> nd(0, 5), pd(1, 6);
  std::bernoulli_distribution coin(0.5);
  const std::size_t n = nd(rng), p = pd(rng);
  std::vector<std::size_t> pre, res;
  for (std::size_t i = 0; i < n; ++i)
    if (coin(rng)) pre.push_back(i);
  for (std::size_t r = 0; r < p; ++r)
    if (coin(rng)) res.push_back(r);
  return EpSet(n, p, pre, res);
}

EpSeq random_seq(std::mt19937_64& rng, long lo = -2, long hi = 2) {
  std::uniform_int_distribution<std::size_t> nd(0, 3), pd(1, 3);
  std::uniform_int_distribution<long> vd(lo, hi);
  Vec pre(nd(rng)), rep(pd(rng));
  for (auto& x : pre) x = vd(rng);
  for (auto& x : rep) x = vd(rng);
  return EpSeq(pre, rep);
}

}  // namespace

TEST_CASE("set_op examples") {
  CHECK(set_op(SetOp::Complement, evens()) == EpSet(0, 2, {}, {1}));
  CHECK(set_op(SetOp::Intersection, evens(), EpSet(0, 3, {}, {0})) == EpSet(0, 6, {}, {0}));
  EpSet s(4, 3, {1, 2}, {2});
  CHECK(set_op(SetOp::Union, s, set_op(SetOp::Complement, s)).is_all());
}

TEST_CASE("canonical form is minimal") {
  // period 4 with residues {0,2} is the evens
  CHECK(EpSet(0, 4, {}, {0, 2}) == evens());
  // a prefix that agrees with the tail rolls back
  EpSet s(5, 2, {0, 2, 4}, {0});
  CHECK(s.threshold() == 0);
  CHECK(s.period() == 2);
  // a genuine defect stays
  EpSet t(3, 2, {0, 2}, {1});
  CHECK(t.threshold() == 3);
  CHECK(EpSet::finite({}).is_empty());
  CHECK(EpSet::finite({3, 7}).threshold() == 8);
  CHECK(EpSet::finite({3, 7}).max_member() == 7);
  CHECK_THROWS_AS(EpSet(2, 0, {}, {}), Error);
  CHECK_THROWS_AS(EpSet(2, 2, {5}, {}), Error);
}

TEST_CASE("count_below agrees with enumeration") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    EpSet s = random_set(rng);
    for (std::size_t n = 0; n < 40; ++n) CHECK(s.count_below(n) == s.members_below(n).size());
  }
}

TEST_CASE("set algebra obeys boolean laws on random triples") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 10000; ++t) {
    EpSet a = random_set(rng), b = random_set(rng), c = random_set(rng);
    auto U = [](const EpSet& x, const EpSet& y) { return set_op(SetOp::Union, x, y); };
    auto I = [](const EpSet& x, const EpSet& y) { return set_op(SetOp::Intersection, x, y); };
    auto C = [](const EpSet& x) { return set_op(SetOp::Complement, x); };
    Window w = stabilization_window({a, b, c});
    const std::size_t bound = w.threshold + 2 * w.period;
    EpSet lhs = I(a, U(b, c)), rhs = U(I(a, b), I(a, c));
    EpSet dm1 = C(U(a, b)), dm2 = I(C(a), C(b));
    EpSet diff = set_op(SetOp::Difference, a, b);
    for (std::size_t n = 0; n < bound; ++n) {
      const bool ia = a.contains(n), ib = b.contains(n), ic = c.contains(n);
      if (lhs.contains(n) != (ia && (ib || ic))) FAIL("distributivity membership");
      if (diff.contains(n) != (ia && !ib)) FAIL("difference membership");
    }
    // canonical forms make the laws structural
    if (lhs != rhs || dm1 != dm2 || C(C(a)) != a) FAIL("law failed");
  }
}

TEST_CASE("EpSeq canonical form") {
  EpSeq s({1, 2, 1, 2}, {1, 2});
  CHECK(s.threshold() == 0);
  CHECK(s.repeat() == Vec{1, 2});
  EpSeq t({5}, {3, 3, 3});
  CHECK(t.preperiod() == Vec{5});
  CHECK(t.repeat() == Vec{3});
  EpSeq u({0, 7}, {1, 7});  // 0,7,1,7,1,7... rolls back to pre [0], repeat [7,1]
  CHECK(u.preperiod() == Vec{0});
  CHECK(u.repeat() == (Vec{7, 1}));
  CHECK(EpSeq().is_zero());
  CHECK_THROWS_AS(EpSeq({}, {}), Error);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 500; ++k) {
    EpSeq a = random_seq(rng), b = random_seq(rng);
    EpSeq sum = seq_add(a, b);
    for (std::size_t n = 0; n < 30; ++n) CHECK(sum.value(n) == a.value(n) + b.value(n));
    CHECK(seq_add(a, seq_scale(-1, a)).is_zero());
  }
}

TEST_CASE("stabilization_window examples") {
  CHECK(stabilization_window({evens()}) == Window{0, 2});
  CHECK(stabilization_window({EpSet(3, 2, {0, 2}, {1}), EpSet(1, 3, {0}, {1})}) == Window{3, 6});
  CHECK(stabilization_window({}) == Window{0, 1});
}

TEST_CASE("ep_linear_solve examples") {
  auto one = ep_linear_solve({{EpSeq::constant(1), EpSet::all()}});
  CHECK(one.constraints == M({{1}}));

  auto zero = ep_linear_solve({{EpSeq(), EpSet::all()}});
  CHECK(zero.constraints.rows() == 0);
  CHECK(zero.correction.is_zero());

  auto alt = ep_linear_solve({{EpSeq({}, {1, 0}), EpSet::all()}, {EpSeq({}, {0, 1}), EpSet::all()}});
  CHECK(alt.constraints == Matrix::identity(2));

  // (1,1,0,0,0,...) − (1,0,0,...) leaves a finite correction
  auto fin = ep_linear_solve({{EpSeq({1, 1}, {0}), EpSet::all()}, {EpSeq({}, {1}), EpSet::all()}});
  CHECK(fin.constraints == M({{0, 1}}));
  CHECK(fin.correction_for({1, 0}) == Vec{-1, -1});
}

// Solutions (d, c) with c finitely supported and c_i + s(i) = 0 everywhere,
// enumerated exactly inside a support bound and compared as subspaces.
TEST_CASE("ep_linear_solve is complete against brute force") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 300; ++t) {
    std::uniform_int_distribution<std::size_t> kd(1, 3);
    const std::size_t K = kd(rng);
    std::vector<std::pair<EpSeq, EpSet>> conds;
    for (std::size_t k = 0; k < K; ++k) conds.emplace_back(random_seq(rng, -1, 1), random_set(rng));
    auto sol = ep_linear_solve(conds);
    const std::size_t B = sol.window.threshold + 2 * sol.window.period;
    const std::size_t check = B + sol.window.threshold + 2 * sol.window.period;
    // unknowns: d (K) then c_0..c_{B-1}
    Matrix sys(0, K + B);
    for (std::size_t i = 0; i < check; ++i) {
      Vec r(K + B);
      for (std::size_t k = 0; k < K; ++k) r[k] = conds[k].second.contains(i) ? conds[k].first.value(i) : Rational(0);
      if (i < B) r[K + i] = 1;
      sys.append_row(r);
    }
    Matrix brute = kernel(sys);
    Matrix ours(0, K + B);
    Matrix free_d = kernel(sol.constraints.rows() ? sol.constraints : Matrix(0, K));
    if (sol.constraints.rows() == 0) free_d = Matrix::identity(K);
    for (std::size_t j = 0; j < free_d.rows(); ++j) {
      Vec d = free_d.row(j), c = sol.correction_for(d);
      Vec row(K + B);
      for (std::size_t k = 0; k < K; ++k) row[k] = d[k];
      for (std::size_t i = 0; i < c.size(); ++i) row[K + i] = c[i];
      ours.append_row(row);
    }
    CHECK(same_row_space(brute, ours));
  }
}
