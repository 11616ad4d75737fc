#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "flagforge/finitary.hpp"

namespace flagforge {

/// Agreement of one countable-model operation with its finite computation at one level.
/// `exact`: equal truncations. `mod_radical`: equal after adding the truncated radical.
/// `naive`: the finite computation fed only with level-n truncations also agrees.
struct LevelAgreement {
  std::size_t level = 0;
  bool exact = false;
  bool mod_radical = false;
  bool naive = false;
};

struct CoherenceCheck {
  std::string op;
  std::string object;
  std::vector<LevelAgreement> levels;
  bool agrees() const;
};

/// {N*, N*+p*, N*+2p*} with N* ≥ 1.
std::vector<std::size_t> certified_levels(const Window& w);
/// Level past which inputs are sampled for the finite computation at level n.
std::size_t guard_level(std::size_t n, const Window& w);
Window subspace_window(const Subspace& s);

/// Rows (level `from`, side s) ∩ span{basis < to} ⊕ augs, re-expressed at level `to`.
Matrix cut_rows(const Matrix& rows, std::size_t from, std::size_t to, std::size_t aug_count);
/// Rows at level `from` re-expressed at a level `to` ≥ from.
Matrix lift_rows(const Matrix& rows, std::size_t from, std::size_t to, std::size_t aug_count);
/// {y at level `to`, opposite side : ⟨r, y⟩ = 0 for every row r}, rows given at level `from` ≥ to.
Matrix finite_perp(const Model& m, Side s, const Matrix& rows, std::size_t from, std::size_t to);

/// perp, closure, is_closed and (form models) theta and form_perp.
std::vector<CoherenceCheck> subspace_coherence(const Model& m, const Subspace& a, const std::string& name);
/// sum and intersection.
std::vector<CoherenceCheck> pair_coherence(const Model& m, const Subspace& a, const Subspace& b,
                                           const std::string& name);
/// compose, bracket, trace and the actions on sample vectors.
std::vector<CoherenceCheck> element_coherence(const Model& m, const FinitaryElement& x, const FinitaryElement& y,
                                              const std::string& name);
/// Stabilizer memberships and the nilradical test against brute force on truncated flags.
std::vector<CoherenceCheck> membership_coherence(const Model& m, const FinitaryElement& x, const TautCouple& t,
                                                 const std::string& name);
/// Every member of both flags, plus the c-pair perp relations.
std::vector<CoherenceCheck> couple_coherence(const Model& m, const TautCouple& t, const std::string& name);

}  // namespace flagforge
