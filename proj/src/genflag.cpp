#include "flagforge/genflag.hpp"

#include <algorithm>

namespace flagforge {

std::optional<std::size_t> FinitePairFlag::index_of(const Subspace& s) const {
  for (std::size_t i = 0; i < chain.size(); ++i)
    if (chain[i] == s) return i;
  return std::nullopt;
}

std::string FinitePairFlag::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (i) out += " < ";
    out += chain[i].to_string();
  }
  return out;
}

FinitePairFlag flag_from_chain(Side side, std::size_t aug_count, const std::vector<Subspace>& members) {
  std::vector<Subspace> all{Subspace::zero(side, aug_count), Subspace::full(side, aug_count)};
  for (const auto& s : members) {
    if (s.side() != side || s.aug_count() != aug_count) fail("ModelMismatch", "flag member on the wrong side");
    if (std::find(all.begin(), all.end(), s) == all.end()) all.push_back(s);
  }
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (!contains(all[i], all[j]) && !contains(all[j], all[i]))
        fail("NotAChain", all[i].to_string() + " vs " + all[j].to_string());
  // In a chain, the number of members below s is a strict rank.
  std::vector<std::pair<std::size_t, std::size_t>> rank;
  for (std::size_t i = 0; i < all.size(); ++i) {
    std::size_t below = 0;
    for (const auto& t : all) below += contains(all[i], t);
    rank.emplace_back(below, i);
  }
  std::sort(rank.begin(), rank.end());
  FinitePairFlag f{side, aug_count, {}};
  for (const auto& [r, i] : rank) f.chain.push_back(all[i]);
  return f;
}

FlagClass classify_flag(const Model& m, const FinitePairFlag& f) {
  FlagClass c;
  std::vector<Subspace> cl;
  std::vector<bool> closed;
  for (const auto& s : f.chain) {
    cl.push_back(closure(m, s));
    closed.push_back(cl.back() == s);
  }
  c.semiclosed = true;
  for (std::size_t a = 0; a < f.pair_count(); ++a)
    if (!closed[a] && cl[a] != f.upper(a)) c.semiclosed = false;
  if (!c.semiclosed) return c;
  c.closed = std::all_of(closed.begin(), closed.end(), [](bool b) { return b; });
  c.maximal_semiclosed = true;
  for (std::size_t a = 0; a < f.pair_count(); ++a) {
    if (!closed[a]) continue;
    auto q = quotient_dimension(f.upper(a), f.lower(a));
    if (!q || *q != 1) c.maximal_semiclosed = false;
  }
  return c;
}

std::optional<std::size_t> TautCouple::partner_of_f(std::size_t a) const {
  for (const auto& c : c_pairs)
    if (c.f_pair == a) return c.g_pair;
  return std::nullopt;
}

std::optional<std::size_t> TautCouple::partner_of_g(std::size_t b) const {
  for (const auto& c : c_pairs)
    if (c.g_pair == b) return c.f_pair;
  return std::nullopt;
}

namespace {

void require_semiclosed(const Model& m, const FinitePairFlag& f) {
  if (!classify_flag(m, f).semiclosed) fail("NotSemiclosed", f.to_string());
}

void require_perps_in(const Model& m, const FinitePairFlag& from, const FinitePairFlag& into) {
  for (const auto& s : from.chain)
    if (!into.index_of(perp(m, s))) fail("NotTaut", s.to_string());
}

}  // namespace

TautCouple make_taut_couple(const Model& m, const FinitePairFlag& f, const FinitePairFlag& g) {
  if (f.side != Side::V || g.side != Side::W) fail("ModelMismatch", "couple needs a V flag and a V* flag");
  if (f.aug_count != m.aug_count(Side::V) || g.aug_count != m.aug_count(Side::W))
    fail("ModelMismatch", "flag augmentations do not match the model");
  require_semiclosed(m, f);
  require_semiclosed(m, g);
  require_perps_in(m, f, g);
  require_perps_in(m, g, f);

  TautCouple t{f, g, {}};
  std::vector<std::size_t> g_closed;
  for (std::size_t b = 0; b < g.pair_count(); ++b)
    if (is_closed(m, g.lower(b))) g_closed.push_back(b);
  std::size_t f_closed = 0;
  for (std::size_t a = 0; a < f.pair_count(); ++a) {
    if (!is_closed(m, f.lower(a))) continue;
    ++f_closed;
    // G′_β = (F″_α)^⊥ picks β; the dual identity must then hold as well.
    auto b = g.index_of(perp(m, f.upper(a)));
    if (!b || *b + 1 >= g.chain.size() || perp(m, g.upper(*b)) != f.lower(a))
      fail("NotTaut", "no matching pair for " + f.upper(a).to_string());
    t.c_pairs.push_back({a, *b});
  }
  if (f_closed != g_closed.size()) fail("NotTaut", "closed-predecessor pairs do not match up");
  for (const auto& c : t.c_pairs)
    if (std::find(g_closed.begin(), g_closed.end(), c.g_pair) == g_closed.end())
      fail("NotTaut", "matched pair with non-closed predecessor");
  return t;
}

bool pair_order(const Model& m, const TautCouple& t, std::size_t alpha, std::size_t beta) {
  return orthogonal(m, t.f.upper(alpha), t.g.upper(beta));
}

std::optional<std::size_t> last_g_at_or_above(const Model& m, const TautCouple& t, std::size_t alpha) {
  std::optional<std::size_t> best;
  const auto partner = t.partner_of_f(alpha);
  for (std::size_t b = 0; b < t.g.pair_count(); ++b)
    if (pair_order(m, t, alpha, b) || partner == b) best = b;
  return best;
}

FinitePairFlag fc_flag(const Model& m, const FinitePairFlag& f) {
  require_semiclosed(m, f);
  FinitePairFlag out{f.side, f.aug_count, {}};
  for (const auto& s : f.chain)
    if (is_closed(m, s)) out.chain.push_back(s);
  return out;
}

std::string iso_tag_name(IsoTag t) {
  switch (t) {
    case IsoTag::Isotropic: return "isotropic";
    case IsoTag::Coisotropic: return "coisotropic";
    case IsoTag::Both: return "both";
    case IsoTag::Neither: return "neither";
  }
  return "?";
}

SelfTautReport self_taut_and_iso(const Model& m, const FinitePairFlag& f) {
  if (m.form_kind == FormKind::None || !m.iota) fail("NoFormOnModel", "self-tautness needs a form");
  if (f.side != Side::V) fail("ModelMismatch", "form flags live in V");
  SelfTautReport r;
  r.self_taut = true;
  std::vector<Subspace> perps;
  for (const auto& s : f.chain) {
    perps.push_back(form_perp(m, s));
    const bool iso = contains(perps.back(), s), co = contains(s, perps.back());
    r.tags.push_back(iso && co ? IsoTag::Both : iso ? IsoTag::Isotropic : co ? IsoTag::Coisotropic : IsoTag::Neither);
    if (!f.index_of(perps.back())) r.self_taut = false;
  }
  if (!r.self_taut) return r;
  for (std::size_t a = 0; a < f.pair_count(); ++a) {
    if (!is_closed(m, f.lower(a))) continue;
    const std::size_t b = *f.index_of(perps[a + 1]);
    if (b < f.pair_count()) r.c_bijection.emplace_back(a, b);
  }
  return r;
}

std::string block_kind_name(BlockKind k) {
  switch (k) {
    case BlockKind::FinitePoints: return "finite";
    case BlockKind::OmegaUp: return "omega_up";
    case BlockKind::OmegaDown: return "omega_down";
  }
  return "?";
}

BasisOrderFlag BasisOrderFlag::make(std::vector<OrderBlock> blocks) {
  BasisOrderFlag b;
  EpSet covered;
  for (auto& blk : blocks) {
    if (blk.kind == BlockKind::FinitePoints) {
      std::vector<std::size_t> all;
      for (const auto& pt : blk.points) {
        if (pt.empty()) fail("InvalidBlocks", "empty point");
        all.insert(all.end(), pt.begin(), pt.end());
      }
      std::sort(all.begin(), all.end());
      if (std::adjacent_find(all.begin(), all.end()) != all.end()) fail("InvalidBlocks", "index repeated in a block");
      blk.members = EpSet::finite(all);
    } else if (blk.members.is_finite()) {
      fail("InvalidBlocks", "omega blocks need an infinite index set");
    }
    if (!set_op(SetOp::Intersection, covered, blk.members).is_empty())
      fail("InvalidBlocks", "blocks overlap");
    covered = set_op(SetOp::Union, covered, blk.members);
    b.sets_.push_back(blk.members);
  }
  if (!covered.is_all()) fail("InvalidBlocks", "blocks do not cover every index");
  b.blocks_ = std::move(blocks);
  return b;
}

std::size_t BasisOrderFlag::block_of(std::size_t i) const {
  for (std::size_t k = 0; k < sets_.size(); ++k)
    if (sets_[k].contains(i)) return k;
  fail("InvalidBlocks", "index outside every block");
}

std::pair<std::size_t, long> BasisOrderFlag::position(std::size_t i) const {
  const std::size_t k = block_of(i);
  const auto& blk = blocks_[k];
  switch (blk.kind) {
    case BlockKind::FinitePoints:
      for (std::size_t p = 0; p < blk.points.size(); ++p)
        if (std::find(blk.points[p].begin(), blk.points[p].end(), i) != blk.points[p].end())
          return {k, static_cast<long>(p)};
      break;
    case BlockKind::OmegaUp: return {k, static_cast<long>(sets_[k].count_below(i))};
    case BlockKind::OmegaDown: return {k, -static_cast<long>(sets_[k].count_below(i))};
  }
  fail("InvalidBlocks", "index not placed");
}

int BasisOrderFlag::compare(std::size_t i, std::size_t j) const {
  const auto a = position(i), b = position(j);
  return a < b ? -1 : (b < a ? 1 : 0);
}

bool BasisOrderFlag::is_maximal_closed() const {
  for (const auto& blk : blocks_)
    if (blk.kind == BlockKind::FinitePoints)
      for (const auto& pt : blk.points)
        if (pt.size() != 1) return false;
  return true;
}

}  // namespace flagforge
