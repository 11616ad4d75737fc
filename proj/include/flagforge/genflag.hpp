#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flagforge/pairedspace.hpp"

namespace flagforge {

/// 0 = F_0 ⊊ F_1 ⊊ … ⊊ F_k = full. Pair α is (F_α, F_{α+1}).
struct FinitePairFlag {
  Side side = Side::V;
  std::size_t aug_count = 0;
  std::vector<Subspace> chain;

  std::size_t pair_count() const { return chain.size() - 1; }
  const Subspace& lower(std::size_t a) const { return chain.at(a); }
  const Subspace& upper(std::size_t a) const { return chain.at(a + 1); }
  /// Index of s in the chain, if present.
  std::optional<std::size_t> index_of(const Subspace& s) const;
  std::string to_string() const;
};

/// Deduplicates, adds the endpoints and sorts. Throws NotAChain on incomparable members.
FinitePairFlag flag_from_chain(Side side, std::size_t aug_count, const std::vector<Subspace>& members);

struct FlagClass {
  bool semiclosed = false;
  bool closed = false;
  bool maximal_semiclosed = false;
};
FlagClass classify_flag(const Model& m, const FinitePairFlag& f);

/// Pairs (α in f, β in g) with closed predecessors, matched by G′_β = (F″_α)^⊥ and F′_α = (G″_β)^⊥.
struct CPair {
  std::size_t f_pair;
  std::size_t g_pair;
  friend bool operator==(const CPair&, const CPair&) = default;
};

struct TautCouple {
  FinitePairFlag f;  // in V
  FinitePairFlag g;  // in V*
  std::vector<CPair> c_pairs;

  std::optional<std::size_t> partner_of_f(std::size_t a) const;
  std::optional<std::size_t> partner_of_g(std::size_t b) const;
};

/// Throws NotSemiclosed or NotTaut (with the offending subspace).
TautCouple make_taut_couple(const Model& m, const FinitePairFlag& f, const FinitePairFlag& g);

/// α < β iff ⟨F″_α, G″_β⟩ = 0.
bool pair_order(const Model& m, const TautCouple& t, std::size_t alpha, std::size_t beta);

/// Largest G″_β with α ≤ β (α < β, or β the c-partner of α); nullopt when none.
std::optional<std::size_t> last_g_at_or_above(const Model& m, const TautCouple& t, std::size_t alpha);

/// Keeps the closed members; each non-closed successor merges into its closure.
FinitePairFlag fc_flag(const Model& m, const FinitePairFlag& f);

enum class IsoTag { Isotropic, Coisotropic, Both, Neither };
std::string iso_tag_name(IsoTag t);

struct SelfTautReport {
  bool self_taut = false;
  std::vector<IsoTag> tags;  // one per chain member
  /// α ↦ β with F′_β = (F″_α)^⊥, over pairs with closed predecessor (only when self-taut).
  std::vector<std::pair<std::size_t, std::size_t>> c_bijection;
};
SelfTautReport self_taut_and_iso(const Model& m, const FinitePairFlag& f);

enum class BlockKind { FinitePoints, OmegaUp, OmegaDown };
std::string block_kind_name(BlockKind k);

struct OrderBlock {
  BlockKind kind = BlockKind::OmegaUp;
  EpSet members;                                // used by Omega blocks
  std::vector<std::vector<std::size_t>> points;  // used by FinitePoints: indices sharing each position
};

/// Generalized flag in pure-basis form: e_i sits at position σ(i). Blocks are ordered;
/// inside an Omega block the position is the rank of i (ascending or descending).
class BasisOrderFlag {
public:
  static BasisOrderFlag make(std::vector<OrderBlock> blocks);

  const std::vector<OrderBlock>& blocks() const noexcept { return blocks_; }
  std::size_t block_of(std::size_t i) const;
  /// (block, signed key) ordered lexicographically.
  std::pair<std::size_t, long> position(std::size_t i) const;
  /// -1, 0, 1 for σ(i) <, =, > σ(j).
  int compare(std::size_t i, std::size_t j) const;
  bool is_maximal_closed() const;

private:
  std::vector<OrderBlock> blocks_;
  std::vector<EpSet> sets_;
};

}  // namespace flagforge
