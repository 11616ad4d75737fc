#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flagforge/exactnum.hpp"

namespace flagforge {

/// Subspace of n×n rational matrices. The basis is kept as the rref of the flattened
/// matrices, so the coordinates of a member are its entries at the pivot positions.
class MatSpace {
public:
  MatSpace() = default;
  explicit MatSpace(std::size_t n) : n_(n), flat_(0, n * n) {}
  static MatSpace span(std::size_t n, const std::vector<Matrix>& ms);
  static MatSpace from_flat(std::size_t n, const Matrix& rows);

  std::size_t n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return flat_.rows(); }
  const Matrix& flat() const noexcept { return flat_; }
  Matrix basis(std::size_t i) const;
  std::vector<Matrix> basis() const;
  bool contains(const Matrix& x) const;
  bool contains(const MatSpace& s) const;
  Vec coords(const Matrix& x) const;  // x must be a member
  Matrix element(const Vec& c) const;

  friend bool operator==(const MatSpace& a, const MatSpace& b) { return a.n_ == b.n_ && a.flat_ == b.flat_; }
  friend bool operator!=(const MatSpace& a, const MatSpace& b) { return !(a == b); }

private:
  std::size_t n_ = 0;
  Matrix flat_{0, 0};
  std::vector<std::size_t> pivots_;
};

MatSpace space_sum(const MatSpace& a, const MatSpace& b);
MatSpace space_intersection(const MatSpace& a, const MatSpace& b);
/// span{[a_i, b_j]}
MatSpace bracket_space(const MatSpace& a, const MatSpace& b);

/// A MatSpace closed under the commutator.
class FdLieAlgebra : public MatSpace {
public:
  FdLieAlgebra() = default;
  explicit FdLieAlgebra(std::size_t n) : MatSpace(n) {}
  /// Throws NotClosed when the span is not a subalgebra.
  static FdLieAlgebra from_space(const MatSpace& s);
  static FdLieAlgebra from_basis(std::size_t n, const std::vector<Matrix>& ms) {
    return from_space(MatSpace::span(n, ms));
  }
};

/// Smallest subalgebra containing gens.
FdLieAlgebra lie_close(std::size_t n, const std::vector<Matrix>& gens);
FdLieAlgebra gl(std::size_t n);
FdLieAlgebra sl(std::size_t n);
/// Upper triangular matrices.
FdLieAlgebra borel(std::size_t n);
/// Block upper triangular matrices for consecutive blocks of the given sizes.
FdLieAlgebra block_parabolic(const std::vector<std::size_t>& sizes);

FdLieAlgebra derived(const FdLieAlgebra& g);
bool is_solvable(const FdLieAlgebra& g);
bool is_nilpotent_algebra(const FdLieAlgebra& g);
/// ad x on g in g's coordinates (x ∈ g).
Matrix ad_matrix(const FdLieAlgebra& g, const Matrix& x);
Matrix killing_matrix(const FdLieAlgebra& g);
/// Nondegenerate Killing form.
bool is_semisimple_algebra(const FdLieAlgebra& g);
bool is_ideal(const FdLieAlgebra& g, const MatSpace& i);

/// {x ∈ k : [x, s] = 0 for s in ss}
FdLieAlgebra centralizer(const FdLieAlgebra& k, const std::vector<Matrix>& ss);
/// {x ∈ k : [x, h] ⊆ h}
FdLieAlgebra normalizer(const FdLieAlgebra& k, const MatSpace& h);

/// κ-orthogonal of [g, g].
FdLieAlgebra solvable_radical(const FdLieAlgebra& g);
/// Associative algebra generated by gens (with the identity when unital).
MatSpace assoc_closure(std::size_t n, const std::vector<Matrix>& gens, bool unital);
/// Radical of an associative matrix algebra containing 1: {x : tr(xy) = 0 for all y}.
MatSpace jacobson_radical(const MatSpace& a);
/// Nilpotent elements of the solvable radical.
FdLieAlgebra linear_nilradical(const FdLieAlgebra& g);
/// Semisimple subalgebra l with [g,g] = (r ∩ [g,g]) ⊕ l.
FdLieAlgebra levi_component(const FdLieAlgebra& g);

/// Basis element of g whose Jordan parts leave g, if any.
std::optional<Matrix> splittable_witness(const FdLieAlgebra& g);
FdLieAlgebra splittable_closure(const FdLieAlgebra& g);

/// Commuting semisimple elements.
bool is_toral(const MatSpace& t);
/// t toral in k with no semisimple element of z_k(t) outside t.
bool is_maximal_torus(const FdLieAlgebra& k, const MatSpace& t);
/// Greedy extension by semisimple parts of centralizer elements.
MatSpace maximal_torus(const FdLieAlgebra& k, std::mt19937_64& rng);

struct FdDecomposition {
  FdLieAlgebra nilradical;
  FdLieAlgebra levi;
  FdLieAlgebra torus;
  FdLieAlgebra reductive_part;
};
/// Throws NotSplittable (with a witness) on non-splittable input.
FdDecomposition locally_reductive_part(const FdLieAlgebra& g, std::uint64_t seed = 1);

struct CartanReport {
  bool via_d = false;  // h nilpotent and h = z_k(h_ss)
  bool via_e = false;  // h = z_k(t) for the maximal torus t = h_ss
  bool via_f = false;  // h equals the splittable closure of its Fitting null component
  bool is_cartan = false;
  bool self_normalizing = false;
  bool nilpotent = false;
};
CartanReport cartan_queries(const FdLieAlgebra& k, const FdLieAlgebra& h);
FdLieAlgebra cartan_from_torus(const FdLieAlgebra& k, const MatSpace& t);
FdLieAlgebra fitting_null(const FdLieAlgebra& k, const FdLieAlgebra& h);

// ---------------------------------------------------------------- modules

/// Chain of subspaces of ℚⁿ (row bases) from 0 to ℚⁿ with irreducible quotients.
struct CompositionSeries {
  std::vector<Matrix> chain;
  bool certified = false;
};
/// Las Vegas MeatAxe: radical split, endomorphism split, then Norton's test with
/// Holt–Rees dual spin. Every quotient carries an irreducibility certificate.
CompositionSeries composition_series(std::size_t n, const std::vector<Matrix>& gens, std::mt19937_64& rng);
/// Smallest subspace containing the rows of `start` and stable under gens.
Matrix spin(const Matrix& start, const std::vector<Matrix>& gens);

/// {X : X F_i ⊆ F_i}, solved directly.
MatSpace fd_stabilizer(std::size_t n, const std::vector<Matrix>& chain);
/// Σ F_i ⊗ ann(F_{i−1})
MatSpace fd_stabilizer_formula(std::size_t n, const std::vector<Matrix>& chain);
/// Σ F_i ⊗ ann(F_i)
MatSpace fd_nilradical_formula(std::size_t n, const std::vector<Matrix>& chain);
/// Rows spanning {w : w·v = 0 for v in the row space}.
Matrix annihilator_rows(std::size_t n, const Matrix& rows);

struct FdCouple {
  std::vector<Matrix> chain;       // k-stable, irreducible quotients
  std::vector<Matrix> dual_chain;  // annihilators, increasing
  bool certified = false;
  bool quotients_irreducible = false;
  bool nilradical_matches = false;  // n_k = n_p ∩ k
};
FdCouple invariant_taut_couple(const FdLieAlgebra& k, std::uint64_t seed = 1);

struct ParabolicReport {
  bool is_parabolic = false;
  bool borel_restriction_check = false;
};
ParabolicReport fd_parabolic_tests(const FdLieAlgebra& p, std::uint64_t seed = 1);

/// Solvable subalgebra of g that no basis element of g extends solvably.
FdLieAlgebra borel_of(const FdLieAlgebra& g, std::uint64_t seed = 1);
/// b solvable and lie_close(b + x) non-solvable for every x in a complement basis.
bool is_maximal_solvable_in(const FdLieAlgebra& g, const FdLieAlgebra& b);
/// n_g ⋉ p_red; throws NotParabolicInput when p_red is not a parabolic of g_red.
FdLieAlgebra parabolic_bijection_check(const FdLieAlgebra& g, const FdLieAlgebra& p_red, std::uint64_t seed = 1);

}  // namespace flagforge
