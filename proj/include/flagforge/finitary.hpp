#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flagforge/genflag.hpp"

namespace flagforge {

/// Finite-rank operator Σ v_k ⊗ w_k with v_k ∈ V, w_k ∈ V*, acting by u ↦ Σ ⟨u, w_k⟩ v_k.
///
/// Stored as the coefficient matrix M = Σ v_k w_kᵀ in truncated coordinates
/// [basis < level | aug]; the level is the least one holding every basis index used.
class FinitaryElement {
public:
  FinitaryElement() = default;
  FinitaryElement(std::size_t v_augs, std::size_t w_augs);

  static FinitaryElement rank_one(const Vector& v, const Vector& w);
  static FinitaryElement from_terms(std::size_t v_augs, std::size_t w_augs,
                                    const std::vector<std::pair<Vector, Vector>>& terms);
  /// M in coordinates [basis < level | aug] × [basis < level | aug].
  static FinitaryElement from_matrix(std::size_t v_augs, std::size_t w_augs, std::size_t level, const Matrix& m);

  std::size_t v_augs() const noexcept { return k_; }
  std::size_t w_augs() const noexcept { return ks_; }
  std::size_t level() const noexcept { return n_; }
  const Matrix& matrix() const noexcept { return m_; }
  /// Coefficient matrix re-expressed at a level ≥ level().
  Matrix matrix_at(std::size_t level) const;

  /// Canonical rank decomposition: the w's are the rref rows of M, so the v's are independent.
  std::vector<std::pair<Vector, Vector>> terms() const;
  std::size_t rank() const;
  bool is_zero() const;
  /// Coefficient of e_i ⊗ f_j.
  Rational entry(std::size_t i, std::size_t j) const;

  friend bool operator==(const FinitaryElement& a, const FinitaryElement& b) {
    return a.k_ == b.k_ && a.ks_ == b.ks_ && a.n_ == b.n_ && a.m_ == b.m_;
  }
  std::string to_string() const;

private:
  void trim();
  std::size_t k_ = 0, ks_ = 0, n_ = 0;
  Matrix m_{0, 0};
};

FinitaryElement add(const FinitaryElement& a, const FinitaryElement& b);
FinitaryElement scale(const Rational& c, const FinitaryElement& a);
FinitaryElement subtract(const FinitaryElement& a, const FinitaryElement& b);
/// Operator product a∘b: (v⊗w)(v′⊗w′) = ⟨v′, w⟩ v⊗w′.
FinitaryElement compose(const Model& m, const FinitaryElement& a, const FinitaryElement& b);
FinitaryElement bracket(const Model& m, const FinitaryElement& a, const FinitaryElement& b);
/// Σ ⟨v_k, w_k⟩
Rational trace(const Model& m, const FinitaryElement& x);
/// On V: u ↦ Σ ⟨u, w_k⟩ v_k.  On V*: y ↦ −Σ ⟨v_k, y⟩ w_k.
Vector act(const Model& m, const FinitaryElement& x, const Vector& u);

/// x·F ⊆ F for every member F of the flag (V-side or V*-side).
bool in_stabilizer(const Model& m, const FinitaryElement& x, const FinitePairFlag& f);
/// Entry (i, j) ≠ 0 ⇒ σ(i) ≤ σ(j). Pure-basis model only.
bool in_stabilizer(const FinitaryElement& x, const BasisOrderFlag& b);
/// The image x·S, as a basis of vectors (S on either side).
std::vector<Vector> image(const Model& m, const FinitaryElement& x, const Subspace& s);

bool in_joint_stabilizer(const Model& m, const FinitaryElement& x, const TautCouple& t);
bool in_nilradical(const Model& m, const FinitaryElement& x, const TautCouple& t);

/// Induced action of x on F″_γ/F′_γ for the c-pair γ. `basis` spans the image of x
/// modulo F′ and `matrix` is the action restricted there; the block trace is its trace.
struct BlockComponent {
  std::vector<Vector> basis;
  Matrix matrix{0, 0};
  Rational trace;
  bool infinite_quotient = false;
  bool is_zero() const { return basis.empty(); }
};
/// `shuffle_seed` picks a randomized complement instead of the pivot rule.
BlockComponent block_component(const Model& m, const FinitaryElement& x, const TautCouple& t, std::size_t c_index,
                               std::optional<std::uint64_t> shuffle_seed = std::nullopt);
/// Block traces for every c-pair, in c_pairs order.
std::vector<Rational> block_traces(const Model& m, const FinitaryElement& x, const TautCouple& t);
/// c-pair indices whose quotient is infinite-dimensional.
std::vector<std::size_t> infinite_blocks(const TautCouple& t);

enum class Ambient { Gl, Sl };
std::string ambient_name(Ambient a);

bool in_pminus(const Model& m, const FinitaryElement& x, const TautCouple& t, Ambient ambient);

/// p₋ ⊆ p ⊆ p₊ cut out by homogeneous linear conditions on the block-trace vector.
struct TraceConditionSubalgebra {
  TautCouple couple;
  Ambient ambient = Ambient::Gl;
  Matrix constraints{0, 0};  // columns follow couple.c_pairs
};
/// Throws InvalidTraceConditions when the conditions do not contain p₋.
TraceConditionSubalgebra make_trace_condition_subalgebra(const TautCouple& t, Ambient ambient, const Matrix& constraints);
bool tc_member(const Model& m, const FinitaryElement& x, const TraceConditionSubalgebra& s);

/// x ∈ N(p₋), decided by the criterion N(p₋) = p₊.
bool normalizer_test(const Model& m, const FinitaryElement& x, const TautCouple& t);
/// Cross-check: [x, y] ∈ p₋ for every y in a generator battery of p₋ at the given level.
bool normalizer_sample(const Model& m, const FinitaryElement& x, const TautCouple& t, Ambient ambient,
                       std::size_t level);
/// x ∈ p′ = St(fᶜ) ∩ St(gᶜ).
bool perp_parabolic_member(const Model& m, const FinitaryElement& x, const TautCouple& t);

/// Rank-one generators F″_α ⊗ G″_β (α ≤ β) with vectors truncated at `level`.
/// Each generator is tagged with the c-pair it traces on, if any.
struct TaggedGenerator {
  FinitaryElement element;
  std::optional<std::size_t> c_index;
};
std::vector<TaggedGenerator> pplus_generators(const Model& m, const TautCouple& t, std::size_t level);
/// Generators of p₋ ∩ span(pplus_generators).
std::vector<FinitaryElement> pminus_generators(const Model& m, const TautCouple& t, Ambient ambient,
                                               std::size_t level);

// ---------------------------------------------------------------- orthogonal and symplectic

enum class ClassicalKind { So, Sp };
std::string classical_name(ClassicalKind k);

/// Λ(u⊗v) = u⊗Θv − v⊗Θu and S(u⊗v) = u⊗Θv + v⊗Θu for u, v ∈ V.
FinitaryElement wedge(const Model& m, const Vector& u, const Vector& v);
FinitaryElement sym(const Model& m, const Vector& u, const Vector& v);
/// Termwise Λ or S with each w reinterpreted in V through Θ⁻¹.
FinitaryElement lambda_op(const Model& m, const FinitaryElement& x);
FinitaryElement s_op(const Model& m, const FinitaryElement& x);

/// B(xu, y) + B(u, xy) = 0 for all u, y; the kind must match the form.
bool in_classical(const Model& m, const FinitaryElement& x, ClassicalKind k);
/// The couple (f, Θf); f must be self-taut.
TautCouple self_taut_couple(const Model& m, const FinitePairFlag& f);
/// x ∈ g and x ∈ p₋ of the couple (f, Θf) with the gl criterion.
bool in_so_sp_stabilizer_minus(const Model& m, const FinitaryElement& x, const FinitePairFlag& f, ClassicalKind k);

}  // namespace flagforge
