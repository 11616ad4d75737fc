#include "flagforge/coherence.hpp"

#include <algorithm>
#include <array>

namespace flagforge {

namespace {

Window model_window(const Model& m) {
  Window w = m.window();
  if (m.iota) w = join(w, Window{m.iota->threshold, m.iota->period});
  return w;
}

Window with_subspaces(Window w, const std::vector<const Subspace*>& ss) {
  for (const auto* s : ss) w = join(w, subspace_window(*s));
  return w;
}

bool same_rows(const Matrix& a, const Matrix& b) {
  if (a.rows() == 0 || b.rows() == 0) return a.rows() == 0 && b.rows() == 0 ? true : (a.is_zero() && b.is_zero());
  return same_row_space(a, b);
}

LevelAgreement compare(const Model& m, Side side, std::size_t n, const Matrix& expected, const Matrix& finite,
                       const Matrix& naive) {
  LevelAgreement la;
  la.level = n;
  la.exact = same_rows(expected, finite);
  la.mod_radical = la.exact || equal_mod_radical(truncate(m, n), side, expected, finite);
  la.naive = same_rows(expected, naive);
  return la;
}

/// Θ on truncated rows: e_i ↦ ε(i) f_ι(i). n must sit on an involution block boundary.
Matrix theta_rows(const Model& m, const Matrix& rows, std::size_t n) {
  Matrix out(0, n);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i)
      if (rows(r, i) != 0) {
        const std::size_t j = (*m.iota)(i);
        if (j >= n) fail("InternalError", "level is not an involution block boundary");
        y[j] += Rational(m.iota->sign(i)) * rows(r, i);
      }
    out.append_row(y);
  }
  return out;
}

/// x·u in level-L coordinates for rows u on side s.
Vec act_rows(const Matrix& x, const Matrix& p, Side s, const Vec& u) {
  if (s == Side::V) return (x * p.transpose()).apply(u);
  Vec y = (x.transpose() * p).apply(u);
  for (auto& c : y) c = -c;
  return y;
}

bool brute_stable(const Matrix& x, const Matrix& p, Side s, const Matrix& from, const Matrix& into) {
  for (std::size_t r = 0; r < from.rows(); ++r)
    if (!in_row_space(into, act_rows(x, p, s, from.row(r)))) return false;
  return true;
}

}  // namespace

bool CoherenceCheck::agrees() const {
  return std::all_of(levels.begin(), levels.end(), [](const LevelAgreement& l) { return l.mod_radical; });
}

Window subspace_window(const Subspace& s) { return Window{s.threshold(), s.period()}; }

std::vector<std::size_t> certified_levels(const Window& w) {
  const std::size_t base = std::max<std::size_t>(w.threshold, 1);
  return {base, base + w.period, base + 2 * w.period};
}

std::size_t guard_level(std::size_t n, const Window& w) { return std::max(n, w.threshold) + 2 * w.period; }

Matrix cut_rows(const Matrix& rows, std::size_t from, std::size_t to, std::size_t aug_count) {
  if (to > from) fail("InvalidLevel", "cut_rows needs to ≤ from");
  // rows ∩ {coords in [to, from) vanish}
  Matrix sub(0, from + aug_count);
  for (std::size_t i = 0; i < to; ++i) {
    Vec r(from + aug_count);
    r[i] = 1;
    sub.append_row(r);
  }
  for (std::size_t k = 0; k < aug_count; ++k) {
    Vec r(from + aug_count);
    r[from + k] = 1;
    sub.append_row(r);
  }
  Matrix cap = rows.rows() ? row_space_intersection(rows, sub) : Matrix(0, from + aug_count);
  Matrix out(0, to + aug_count);
  for (std::size_t r = 0; r < cap.rows(); ++r) {
    Vec v(to + aug_count);
    for (std::size_t i = 0; i < to; ++i) v[i] = cap(r, i);
    for (std::size_t k = 0; k < aug_count; ++k) v[to + k] = cap(r, from + k);
    out.append_row(v);
  }
  return out.rows() ? row_basis(out) : out;
}

Matrix lift_rows(const Matrix& rows, std::size_t from, std::size_t to, std::size_t aug_count) {
  if (to < from) fail("InvalidLevel", "lift_rows needs to ≥ from");
  Matrix out(0, to + aug_count);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    Vec v(to + aug_count);
    for (std::size_t i = 0; i < from; ++i) v[i] = rows(r, i);
    for (std::size_t k = 0; k < aug_count; ++k) v[to + k] = rows(r, from + k);
    out.append_row(v);
  }
  return out;
}

Matrix finite_perp(const Model& m, Side s, const Matrix& rows, std::size_t from, std::size_t to) {
  if (to > from) fail("InvalidLevel", "finite_perp needs to ≤ from");
  const TruncatedModel t = truncate(m, from);
  const std::size_t ko = m.aug_count(opposite(s));
  // embedding of the level-`to` opposite space into level `from`
  Matrix emb(from + ko, to + ko);
  for (std::size_t i = 0; i < to; ++i) emb(i, i) = 1;
  for (std::size_t k = 0; k < ko; ++k) emb(from + k, to + k) = 1;
  if (rows.rows() == 0) return Matrix::identity(to + ko);
  const Matrix pr = s == Side::V ? rows * t.pairing : rows * t.pairing.transpose();
  Matrix k = kernel(pr * emb);
  return k.rows() ? row_basis(k) : Matrix(0, to + ko);
}

std::vector<CoherenceCheck> subspace_coherence(const Model& m, const Subspace& a, const std::string& name) {
  const Side s = a.side();
  const Side o = opposite(s);
  const Subspace pa = perp(m, a);
  const Subspace ca = closure(m, a);
  const Window w = with_subspaces(model_window(m), {&a, &pa, &ca});
  const bool closed = is_closed(m, a);

  CoherenceCheck cp{"perp", name, {}}, cc{"closure", name, {}}, ic{"is_closed", name, {}};
  std::vector<LevelAgreement> closed_levels;
  bool all_closed = true;
  for (std::size_t n : certified_levels(w)) {
    const std::size_t g1 = guard_level(n, w), g2 = guard_level(g1, w);
    const Matrix tn = truncate(a, n);
    cp.levels.push_back(
        compare(m, o, n, truncate(pa, n), finite_perp(m, s, truncate(a, g1), g1, n), finite_perp(m, s, tn, n, n)));
    const Matrix p1 = finite_perp(m, s, truncate(a, g2), g2, g1);
    const Matrix fin_cl = finite_perp(m, o, p1, g1, n);
    const Matrix naive_cl = finite_perp(m, o, finite_perp(m, s, tn, n, n), n, n);
    cc.levels.push_back(compare(m, s, n, truncate(ca, n), fin_cl, naive_cl));
    const bool closed_here = same_rows(fin_cl, tn);
    all_closed = all_closed && closed_here;
    LevelAgreement la;
    la.level = n;
    la.naive = closed == same_rows(naive_cl, tn);
    closed_levels.push_back(la);
  }
  for (auto& la : closed_levels) la.exact = la.mod_radical = closed == all_closed;
  ic.levels = closed_levels;
  std::vector<CoherenceCheck> out{cp, cc, ic};

  if (m.form_kind != FormKind::None && s == Side::V) {
    const Subspace th = theta(m, a);
    const Subspace fp = form_perp(m, a);
    const Window wf = with_subspaces(w, {&th, &fp});
    CoherenceCheck ct{"theta", name, {}}, cf{"form_perp", name, {}};
    for (std::size_t n : certified_levels(wf)) {
      // Θ preserves a truncation only on involution block boundaries
      while (n < m.iota->threshold || (n - m.iota->threshold) % m.iota->period != 0) ++n;
      const std::size_t g = guard_level(n, wf);
      const Matrix fin_th = theta_rows(m, truncate(a, n), n);
      ct.levels.push_back(compare(m, Side::W, n, truncate(th, n), fin_th, fin_th));
      const Matrix fin_fp = finite_perp(m, Side::W, theta_rows(m, truncate(a, g), g), g, n);
      const Matrix naive_fp = finite_perp(m, Side::W, fin_th, n, n);
      cf.levels.push_back(compare(m, Side::V, n, truncate(fp, n), fin_fp, naive_fp));
    }
    out.push_back(ct);
    out.push_back(cf);
  }
  return out;
}

std::vector<CoherenceCheck> pair_coherence(const Model& m, const Subspace& a, const Subspace& b,
                                           const std::string& name) {
  if (a.side() != b.side()) fail("SideMismatch", "pair_coherence needs subspaces on one side");
  const Side s = a.side();
  const std::size_t K = m.aug_count(s);
  const Subspace sum = subspace_op(SubspaceOp::Sum, a, b);
  const Subspace cap = subspace_op(SubspaceOp::Intersection, a, b);
  const Window w = with_subspaces(model_window(m), {&a, &b, &sum, &cap});
  CoherenceCheck cs{"sum", name, {}}, ci{"intersection", name, {}};
  for (std::size_t n : certified_levels(w)) {
    const std::size_t g = guard_level(n, w);
    const Matrix ta = truncate(a, n), tb = truncate(b, n);
    const Matrix fin_sum = cut_rows(row_space_sum(truncate(a, g), truncate(b, g)), g, n, K);
    cs.levels.push_back(compare(m, s, n, truncate(sum, n), fin_sum, row_space_sum(ta, tb)));
    const Matrix fin_cap = row_space_intersection(ta, tb);
    ci.levels.push_back(compare(m, s, n, truncate(cap, n), fin_cap, fin_cap));
  }
  return {cs, ci};
}

std::vector<CoherenceCheck> element_coherence(const Model& m, const FinitaryElement& x, const FinitaryElement& y,
                                              const std::string& name) {
  Window w = model_window(m);
  w.threshold = std::max({w.threshold, x.level(), y.level()});
  const FinitaryElement xy = compose(m, x, y);
  const FinitaryElement br = bracket(m, x, y);
  const Rational tx = trace(m, x);
  CoherenceCheck cc{"compose", name, {}}, cb{"bracket", name, {}}, ct{"trace", name, {}}, ca{"act", name, {}};
  auto flat_row = [](const Matrix& a) { return Matrix::from_rows({a.flat()}, a.flat().size()); };
  for (std::size_t n : certified_levels(w)) {
    const TruncatedModel t = truncate(m, n);
    const Matrix xn = x.matrix_at(n), yn = y.matrix_at(n);
    const Matrix fin_c = xn * t.pairing.transpose() * yn;
    const Matrix fin_b = fin_c - yn * t.pairing.transpose() * xn;
    auto mk = [&](bool ok) {
      LevelAgreement la;
      la.level = n;
      la.exact = la.mod_radical = la.naive = ok;
      return la;
    };
    cc.levels.push_back(mk(flat_row(xy.matrix_at(n)) == flat_row(fin_c)));
    cb.levels.push_back(mk(flat_row(br.matrix_at(n)) == flat_row(fin_b)));
    Rational fin_t = 0;
    for (std::size_t i = 0; i < xn.rows(); ++i)
      for (std::size_t j = 0; j < xn.cols(); ++j) fin_t += xn(i, j) * t.pairing(i, j);
    ct.levels.push_back(mk(fin_t == tx));
    bool acts = true;
    for (Side s : {Side::V, Side::W}) {
      const std::size_t K = m.aug_count(s);
      for (std::size_t i = 0; i < n + K && acts; ++i) {
        Vector u = i < n ? Vector::unit(s, K, i) : Vector::aug_unit(s, K, i - n);
        acts = truncate(act(m, x, u), n) == act_rows(xn, t.pairing, s, truncate(u, n));
      }
    }
    ca.levels.push_back(mk(acts));
  }
  return {cc, cb, ct, ca};
}

std::vector<CoherenceCheck> membership_coherence(const Model& m, const FinitaryElement& x, const TautCouple& t,
                                                 const std::string& name) {
  std::vector<const Subspace*> members;
  for (const auto& s : t.f.chain) members.push_back(&s);
  for (const auto& s : t.g.chain) members.push_back(&s);
  Window w = with_subspaces(model_window(m), members);
  w.threshold = std::max(w.threshold, x.level());

  const bool st_f = in_stabilizer(m, x, t.f), st_g = in_stabilizer(m, x, t.g);
  const bool nil = in_nilradical(m, x, t);
  CoherenceCheck cf{"stabilizer_f", name, {}}, cg{"stabilizer_g", name, {}}, cj{"joint", name, {}},
      cn{"nilradical", name, {}};
  for (std::size_t n : certified_levels(w)) {
    auto verdicts = [&](std::size_t level) {
      const TruncatedModel tm = truncate(m, level);
      const Matrix xl = x.matrix_at(level);
      auto flag_ok = [&](const FinitePairFlag& f) {
        for (const auto& s : f.chain) {
          const Matrix r = truncate(s, level);
          if (!brute_stable(xl, tm.pairing, f.side, r, r)) return false;
        }
        return true;
      };
      const bool vf = flag_ok(t.f), vg = flag_ok(t.g);
      bool vn = vf && vg;
      for (const auto& c : t.c_pairs) {
        if (!vn) break;
        vn = brute_stable(xl, tm.pairing, Side::V, truncate(t.f.upper(c.f_pair), level),
                          truncate(t.f.lower(c.f_pair), level));
      }
      return std::array<bool, 3>{vf, vg, vn};
    };
    const auto fin = verdicts(guard_level(n, w));
    const auto nai = verdicts(n);
    auto mk = [&](bool expected, bool finite, bool naive) {
      LevelAgreement la;
      la.level = n;
      la.exact = la.mod_radical = expected == finite;
      la.naive = expected == naive;
      return la;
    };
    cf.levels.push_back(mk(st_f, fin[0], nai[0]));
    cg.levels.push_back(mk(st_g, fin[1], nai[1]));
    cj.levels.push_back(mk(st_f && st_g, fin[0] && fin[1], nai[0] && nai[1]));
    cn.levels.push_back(mk(nil, fin[2], nai[2]));
  }
  return {cf, cg, cj, cn};
}

std::vector<CoherenceCheck> couple_coherence(const Model& m, const TautCouple& t, const std::string& name) {
  std::vector<CoherenceCheck> out;
  auto add_flag = [&](const FinitePairFlag& f, const char* tag) {
    for (std::size_t i = 0; i < f.chain.size(); ++i) {
      auto cs = subspace_coherence(m, f.chain[i], name + "." + tag + "[" + std::to_string(i) + "]");
      out.insert(out.end(), cs.begin(), cs.end());
    }
  };
  add_flag(t.f, "f");
  add_flag(t.g, "g");
  return out;
}

}  // namespace flagforge
