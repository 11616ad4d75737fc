#include "doctest.h"
#include "flagforge/coherence.hpp"
#include "random_finitary.hpp"

using namespace fftest;

namespace {

Vector e(std::size_t i, std::size_t K = 0) { return Vector::unit(Side::V, K, i); }

bool all_agree(const std::vector<CoherenceCheck>& cs) {
  for (const auto& c : cs) {
    if (!c.agrees()) {
      MESSAGE("disagreement: " << c.op << " on " << c.object);
      return false;
    }
  }
  return true;
}

bool any_naive_gap(const std::vector<CoherenceCheck>& cs) {
  for (const auto& c : cs)
    for (const auto& l : c.levels)
      if (!l.naive) return true;
  return false;
}

const CoherenceCheck& find(const std::vector<CoherenceCheck>& cs, const std::string& op) {
  for (const auto& c : cs)
    if (c.op == op) return c;
  FAIL("missing op " << op);
  return cs.front();
}

}  // namespace

TEST_CASE("coherence: levels and row helpers") {
  CHECK(certified_levels(Window{0, 1}) == std::vector<std::size_t>{1, 2, 3});
  CHECK(certified_levels(Window{3, 2}) == std::vector<std::size_t>{3, 5, 7});
  CHECK(guard_level(5, Window{3, 2}) == 9);
  Matrix r = M({{1, 0, 1, 0}, {0, 1, 0, 0}});
  CHECK(cut_rows(r, 4, 2, 0) == M({{0, 1}}));
  CHECK(lift_rows(M({{1, 2, 7}}), 2, 4, 1) == M({{1, 2, 0, 0, 7}}));
  // perp of span{e0} at level 3 in the plain model
  CHECK(finite_perp(plain_model(), Side::V, M({{1, 0, 0}}), 3, 3) == M({{0, 1, 0}, {0, 0, 1}}));
}

TEST_CASE("coherence: zero-sum class needs a guard level") {
  const Model m = plain_model();
  const Subspace z = Subspace::balanced(Side::V, 0, 0, 2, {1});
  auto cs = subspace_coherence(m, z, "z");
  CHECK(all_agree(cs));
  // level-n truncation alone sees a constant functional on the odd indices below n
  CHECK_FALSE(find(cs, "perp").levels[1].naive);
  CHECK(find(cs, "is_closed").agrees());
}

TEST_CASE("coherence: augmented model") {
  const Model ones = row_of_ones_model();
  const Subspace v = Subspace::aligned(Side::V, 1, EpSet::all());
  auto cv = subspace_coherence(ones, v, "V");
  CHECK(all_agree(cv));
  CHECK_FALSE(is_closed(ones, v));
  const Subspace vt = Subspace::span(Side::V, 1, {Vector::aug_unit(Side::V, 1, 0)});
  CHECK(all_agree(subspace_coherence(ones, vt, "vtilde")));
  // truncations of the augmented model are degenerate below any level
  CHECK(truncate(ones, 3).degenerate());
}

TEST_CASE("coherence: sums below the window need a guard level") {
  const Model m = plain_model();
  Vector a0 = e(0);
  a0.set(5, 1);
  const Subspace a = Subspace::span(Side::V, 0, {a0});
  const Subspace b = Subspace::span(Side::V, 0, {e(5)});
  auto cs = pair_coherence(m, a, b, "a,b");
  CHECK(all_agree(cs));
  // below the window the level-3 truncations miss e0 ∈ a + b
  CHECK(truncate(subspace_op(SubspaceOp::Sum, a, b), 3) == M({{1, 0, 0}}));
  CHECK(truncate(a, 3).rows() == 0);
  CHECK(truncate(b, 3).rows() == 0);
  CHECK(cut_rows(row_space_sum(truncate(a, 6), truncate(b, 6)), 6, 3, 0) == M({{1, 0, 0}}));
}

TEST_CASE("coherence: form models") {
  for (FormKind k : {FormKind::Symmetric, FormKind::Antisymmetric}) {
    const Model m = form_model(k);
    const Subspace ev = Subspace::aligned(Side::V, 0, EpSet(0, 2, {}, {0}));
    auto cs = subspace_coherence(m, ev, "evens");
    CHECK(all_agree(cs));
    CHECK(find(cs, "theta").agrees());
    CHECK(find(cs, "form_perp").agrees());
  }
}

TEST_CASE("coherence: random subspaces, couples and elements") {
  std::mt19937_64 rng(909);
  int naive_gaps = 0, checks = 0;
  for (int it = 0; it < 40; ++it) {
    const Model m = nondegenerate_model(rng);
    const Subspace a = random_subspace(rng, m, Side::V);
    const Subspace b = random_subspace(rng, m, Side::V);
    const Subspace c = random_subspace(rng, m, Side::W);
    CAPTURE(a.to_string());
    CAPTURE(b.to_string());
    auto cs = subspace_coherence(m, a, "a");
    auto more = pair_coherence(m, a, b, "a,b");
    cs.insert(cs.end(), more.begin(), more.end());
    more = subspace_coherence(m, c, "c");
    cs.insert(cs.end(), more.begin(), more.end());
    CHECK(all_agree(cs));
    naive_gaps += any_naive_gap(cs);
    checks += static_cast<int>(cs.size());
  }
  for (int it = 0; it < 20; ++it) {
    const Model m = nondegenerate_model(rng);
    const TautCouple t = random_couple(rng, m);
    const FinitaryElement x = random_element(rng, m), y = random_element(rng, m);
    CHECK(all_agree(element_coherence(m, x, y, "x,y")));
    CHECK(all_agree(membership_coherence(m, x, t, "x")));
    CHECK(all_agree(couple_coherence(m, t, "t")));
  }
  CHECK(checks > 200);
  CHECK(naive_gaps > 3);
}
