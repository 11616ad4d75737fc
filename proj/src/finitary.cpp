#include "flagforge/finitary.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

namespace flagforge {

namespace {

void require_model(const Model& m, const FinitaryElement& x) {
  if (x.v_augs() != m.aug_count(Side::V) || x.w_augs() != m.aug_count(Side::W))
    fail("ModelMismatch", "element augmentations do not match the model");
}

void require_same(const FinitaryElement& a, const FinitaryElement& b) {
  if (a.v_augs() != b.v_augs() || a.w_augs() != b.w_augs())
    fail("ModelMismatch", "elements from different models");
}

/// Rows of a vector family in truncated coordinates at level L.
Matrix rows_at(const std::vector<Vector>& vs, std::size_t L, std::size_t K) {
  Matrix out(0, L + K);
  for (const auto& v : vs) out.append_row(truncate(v, L));
  return out;
}

std::size_t support_of(const std::vector<Vector>& vs) {
  std::size_t L = 0;
  for (const auto& v : vs) L = std::max(L, v.support_end());
  return L;
}

}  // namespace

// ---------------------------------------------------------------- element

FinitaryElement::FinitaryElement(std::size_t v_augs, std::size_t w_augs)
    : k_(v_augs), ks_(w_augs), n_(0), m_(v_augs, w_augs) {}

FinitaryElement FinitaryElement::from_matrix(std::size_t v_augs, std::size_t w_augs, std::size_t level,
                                             const Matrix& m) {
  if (m.rows() != level + v_augs || m.cols() != level + w_augs) fail("ShapeMismatch", "element matrix shape");
  FinitaryElement x(v_augs, w_augs);
  x.n_ = level;
  x.m_ = m;
  x.trim();
  return x;
}

FinitaryElement FinitaryElement::rank_one(const Vector& v, const Vector& w) {
  if (v.side != Side::V || w.side != Side::W) fail("SideMismatch", "rank-one element needs v in V and w in V*");
  const std::size_t L = std::max(v.support_end(), w.support_end());
  const Vec a = truncate(v, L), b = truncate(w, L);
  Matrix m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0)
      for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
  return from_matrix(v.aug.size(), w.aug.size(), L, m);
}

FinitaryElement FinitaryElement::from_terms(std::size_t v_augs, std::size_t w_augs,
                                            const std::vector<std::pair<Vector, Vector>>& terms) {
  FinitaryElement x(v_augs, w_augs);
  for (const auto& [v, w] : terms) {
    if (v.aug.size() != v_augs || w.aug.size() != w_augs) fail("ModelMismatch", "term augmentation length");
    x = add(x, rank_one(v, w));
  }
  return x;
}

Matrix FinitaryElement::matrix_at(std::size_t L) const {
  if (L < n_) fail("InvalidLevel", "cannot lower an element below its level");
  Matrix out(L + k_, L + ks_);
  auto ri = [&](std::size_t i) { return i < n_ ? i : L + (i - n_); };
  auto cj = [&](std::size_t j) { return j < n_ ? j : L + (j - n_); };
  for (std::size_t i = 0; i < m_.rows(); ++i)
    for (std::size_t j = 0; j < m_.cols(); ++j)
      if (m_(i, j) != 0) out(ri(i), cj(j)) = m_(i, j);
  return out;
}

void FinitaryElement::trim() {
  std::size_t top = 0;
  for (std::size_t i = 0; i < m_.rows(); ++i)
    for (std::size_t j = 0; j < m_.cols(); ++j)
      if (m_(i, j) != 0) {
        if (i < n_) top = std::max(top, i + 1);
        if (j < n_) top = std::max(top, j + 1);
      }
  if (top == n_) return;
  Matrix out(top + k_, top + ks_);
  auto ri = [&](std::size_t i) { return i < n_ ? i : top + (i - n_); };
  auto cj = [&](std::size_t j) { return j < n_ ? j : top + (j - n_); };
  for (std::size_t i = 0; i < m_.rows(); ++i)
    for (std::size_t j = 0; j < m_.cols(); ++j)
      if (m_(i, j) != 0) out(ri(i), cj(j)) = m_(i, j);
  m_ = std::move(out);
  n_ = top;
}

std::vector<std::pair<Vector, Vector>> FinitaryElement::terms() const {
  const RrefResult r = rref(m_);
  std::vector<std::pair<Vector, Vector>> out;
  for (std::size_t t = 0; t < r.rank(); ++t) {
    // M = C·R with C's column t equal to M's pivot column.
    const Vec v = m_.col(r.pivots[t]);
    const Vec w = r.reduced.row(t);
    out.emplace_back(untruncate(Side::V, v, n_, k_), untruncate(Side::W, w, n_, ks_));
  }
  return out;
}

std::size_t FinitaryElement::rank() const { return flagforge::rank(m_); }
bool FinitaryElement::is_zero() const { return m_.is_zero(); }

Rational FinitaryElement::entry(std::size_t i, std::size_t j) const {
  return i < n_ && j < n_ ? m_(i, j) : Rational(0);
}

std::string FinitaryElement::to_string() const {
  auto ts = terms();
  if (ts.empty()) return "0";
  std::ostringstream os;
  for (std::size_t t = 0; t < ts.size(); ++t)
    os << (t ? " + " : "") << "(" << ts[t].first.to_string() << ")⊗(" << ts[t].second.to_string() << ")";
  return os.str();
}

FinitaryElement add(const FinitaryElement& a, const FinitaryElement& b) {
  require_same(a, b);
  const std::size_t L = std::max(a.level(), b.level());
  return FinitaryElement::from_matrix(a.v_augs(), a.w_augs(), L, a.matrix_at(L) + b.matrix_at(L));
}

FinitaryElement scale(const Rational& c, const FinitaryElement& a) {
  return FinitaryElement::from_matrix(a.v_augs(), a.w_augs(), a.level(), c * a.matrix());
}

FinitaryElement subtract(const FinitaryElement& a, const FinitaryElement& b) { return add(a, scale(-1, b)); }

FinitaryElement compose(const Model& m, const FinitaryElement& a, const FinitaryElement& b) {
  require_model(m, a);
  require_model(m, b);
  const std::size_t L = std::max({a.level(), b.level(), std::size_t{1}});
  const TruncatedModel t = truncate(m, L);
  // (v⊗w)(v′⊗w′) = v (wᵀ Pᵀ v′) w′ᵀ
  return FinitaryElement::from_matrix(a.v_augs(), a.w_augs(), L, a.matrix_at(L) * t.pairing.transpose() * b.matrix_at(L));
}

FinitaryElement bracket(const Model& m, const FinitaryElement& a, const FinitaryElement& b) {
  return subtract(compose(m, a, b), compose(m, b, a));
}

Rational trace(const Model& m, const FinitaryElement& x) {
  require_model(m, x);
  const std::size_t L = std::max(x.level(), std::size_t{1});
  const TruncatedModel t = truncate(m, L);
  const Matrix mx = x.matrix_at(L);
  Rational s = 0;
  for (std::size_t i = 0; i < mx.rows(); ++i)
    for (std::size_t j = 0; j < mx.cols(); ++j)
      if (mx(i, j) != 0) s += mx(i, j) * t.pairing(i, j);
  return s;
}

Vector act(const Model& m, const FinitaryElement& x, const Vector& u) {
  require_model(m, x);
  if (u.side == Side::V) {
    Vector out = Vector::zero(Side::V, x.v_augs());
    for (const auto& [v, w] : x.terms()) out = add(out, scale(pair(m, u, w), v));
    return out;
  }
  Vector out = Vector::zero(Side::W, x.w_augs());
  for (const auto& [v, w] : x.terms()) out = add(out, scale(-pair(m, v, u), w));
  return out;
}

// ---------------------------------------------------------------- stabilizers

std::vector<Vector> image(const Model& m, const FinitaryElement& x, const Subspace& s) {
  require_model(m, x);
  const auto ts = x.terms();
  if (ts.empty()) return {};
  const Window mw = m.window();
  const std::size_t per = std::lcm(s.period(), mw.period);
  // Beyond the window the functionals ⟨·, w_k⟩ are periodic, so this sample spans the image.
  const std::size_t bound = std::max({x.level(), s.threshold(), mw.threshold}) + 2 * per + 1;
  Matrix coeffs(0, ts.size());
  for (const auto& g : s.spanning_sample(bound)) {
    Vec row(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k)
      row[k] = s.side() == Side::V ? pair(m, g, ts[k].second) : pair(m, ts[k].first, g);
    coeffs.append_row(row);
  }
  const Matrix basis = row_basis(coeffs);
  std::vector<Vector> out;
  const Side target = s.side();
  const std::size_t K = target == Side::V ? x.v_augs() : x.w_augs();
  for (std::size_t r = 0; r < basis.rows(); ++r) {
    Vector y = Vector::zero(target, K);
    for (std::size_t k = 0; k < ts.size(); ++k)
      if (basis(r, k) != 0) y = add(y, scale(basis(r, k), target == Side::V ? ts[k].first : ts[k].second));
    out.push_back(std::move(y));
  }
  return out;
}

bool in_stabilizer(const Model& m, const FinitaryElement& x, const FinitePairFlag& f) {
  require_model(m, x);
  for (std::size_t i = 1; i + 1 < f.chain.size(); ++i)
    for (const auto& y : image(m, x, f.chain[i]))
      if (!f.chain[i].member(y)) return false;
  return true;
}

bool in_stabilizer(const FinitaryElement& x, const BasisOrderFlag& b) {
  if (x.v_augs() || x.w_augs()) fail("ModelMismatch", "basis order flags need the plain model");
  const Matrix& mx = x.matrix();
  for (std::size_t i = 0; i < mx.rows(); ++i)
    for (std::size_t j = 0; j < mx.cols(); ++j)
      if (mx(i, j) != 0 && b.compare(i, j) > 0) return false;
  return true;
}

bool in_joint_stabilizer(const Model& m, const FinitaryElement& x, const TautCouple& t) {
  return in_stabilizer(m, x, t.f) && in_stabilizer(m, x, t.g);
}

bool in_nilradical(const Model& m, const FinitaryElement& x, const TautCouple& t) {
  if (!in_joint_stabilizer(m, x, t)) return false;
  for (const auto& c : t.c_pairs)
    for (const auto& y : image(m, x, t.f.upper(c.f_pair)))
      if (!t.f.lower(c.f_pair).member(y)) return false;
  return true;
}

// ---------------------------------------------------------------- block components

BlockComponent block_component(const Model& m, const FinitaryElement& x, const TautCouple& t, std::size_t c_index,
                               std::optional<std::uint64_t> shuffle_seed) {
  require_model(m, x);
  if (c_index >= t.c_pairs.size()) fail("InvalidIndex", "no such c-pair");
  if (!in_joint_stabilizer(m, x, t)) fail("NotInJointStabilizer", x.to_string());
  const std::size_t K = x.v_augs();
  const Subspace& hi = t.f.upper(t.c_pairs[c_index].f_pair);
  const Subspace& lo = t.f.lower(t.c_pairs[c_index].f_pair);

  BlockComponent out;
  out.infinite_quotient = !quotient_dimension(hi, lo).has_value();
  std::vector<Vector> ys = image(m, x, hi);
  if (shuffle_seed) {
    std::mt19937_64 rng(*shuffle_seed);
    std::uniform_int_distribution<long> d(-3, 3);
    std::vector<Vector> mixed;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      Vector y = Vector::zero(Side::V, K);
      for (const auto& z : ys) y = add(y, scale(d(rng), z));
      mixed.push_back(y);
    }
    mixed.insert(mixed.end(), ys.begin(), ys.end());
    std::shuffle(mixed.begin() + static_cast<long>(ys.size()), mixed.end(), rng);
    ys = std::move(mixed);
  }
  const std::vector<Vector> low =
      subspace_op(SubspaceOp::Intersection, Subspace::span(Side::V, K, ys), lo).lattice_vectors();

  // Complement of image ∩ F′ inside the image, first independent vectors in order.
  std::size_t L = std::max(support_of(ys), support_of(low));
  Matrix acc = rows_at(low, L, K);
  std::size_t r = rank(acc);
  for (const auto& y : ys) {
    Matrix next = vstack(acc, rows_at({y}, L, K));
    const std::size_t nr = rank(next);
    if (nr > r) {
      out.basis.push_back(y);
      acc = std::move(next);
      r = nr;
    }
  }
  const std::size_t d = out.basis.size();
  out.matrix = Matrix(d, d);
  std::vector<Vector> images;
  for (const auto& z : out.basis) images.push_back(act(m, x, z));
  L = std::max(L, support_of(images));
  std::vector<Vector> cols = out.basis;
  cols.insert(cols.end(), low.begin(), low.end());
  const Matrix a = rows_at(cols, L, K).transpose();
  for (std::size_t j = 0; j < d; ++j) {
    auto sol = solve(a, truncate(images[j], L));
    if (!sol) fail("InternalError", "image left the block");
    for (std::size_t i = 0; i < d; ++i) out.matrix(i, j) = (*sol)[i];
  }
  out.trace = out.matrix.trace();
  return out;
}

std::vector<Rational> block_traces(const Model& m, const FinitaryElement& x, const TautCouple& t) {
  std::vector<Rational> out;
  for (std::size_t c = 0; c < t.c_pairs.size(); ++c) out.push_back(block_component(m, x, t, c).trace);
  return out;
}

std::vector<std::size_t> infinite_blocks(const TautCouple& t) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < t.c_pairs.size(); ++c)
    if (!quotient_dimension(t.f.upper(t.c_pairs[c].f_pair), t.f.lower(t.c_pairs[c].f_pair))) out.push_back(c);
  return out;
}

std::string ambient_name(Ambient a) { return a == Ambient::Gl ? "gl" : "sl"; }

bool in_pminus(const Model& m, const FinitaryElement& x, const TautCouple& t, Ambient ambient) {
  if (!in_joint_stabilizer(m, x, t)) return false;
  if (ambient == Ambient::Sl && trace(m, x) != 0) return false;
  for (auto c : infinite_blocks(t))
    if (block_component(m, x, t, c).trace != 0) return false;
  return true;
}

// ---------------------------------------------------------------- trace conditions

TraceConditionSubalgebra make_trace_condition_subalgebra(const TautCouple& t, Ambient ambient,
                                                         const Matrix& constraints) {
  const std::size_t nc = t.c_pairs.size();
  const Matrix c = constraints.rows() ? constraints : Matrix(0, nc);
  if (c.cols() != nc) fail("InvalidTraceConditions", "one column per c-pair expected");
  const auto inf = infinite_blocks(t);
  for (std::size_t r = 0; r < c.rows(); ++r) {
    std::optional<Rational> common;
    for (std::size_t j = 0; j < nc; ++j) {
      if (std::find(inf.begin(), inf.end(), j) != inf.end()) continue;
      // p₋ leaves finite-block traces free (gl) or free up to their total (sl).
      if (ambient == Ambient::Gl && c(r, j) != 0)
        fail("InvalidTraceConditions", "condition touches a finite-dimensional block");
      if (ambient == Ambient::Sl) {
        if (common && *common != c(r, j)) fail("InvalidTraceConditions", "condition separates finite blocks");
        common = c(r, j);
      }
    }
  }
  return TraceConditionSubalgebra{t, ambient, c};
}

bool tc_member(const Model& m, const FinitaryElement& x, const TraceConditionSubalgebra& s) {
  if (!in_joint_stabilizer(m, x, s.couple)) return false;
  if (s.ambient == Ambient::Sl && trace(m, x) != 0) return false;
  if (s.constraints.rows() == 0) return true;
  const auto tr = block_traces(m, x, s.couple);
  return s.constraints.apply(tr) == Vec(s.constraints.rows());
}

// ---------------------------------------------------------------- normalizer and p′

bool normalizer_test(const Model& m, const FinitaryElement& x, const TautCouple& t) {
  return in_joint_stabilizer(m, x, t);
}

std::vector<TaggedGenerator> pplus_generators(const Model& m, const TautCouple& t, std::size_t level) {
  const std::size_t K = m.aug_count(Side::V), Ks = m.aug_count(Side::W);
  std::vector<TaggedGenerator> out;
  for (std::size_t a = 0; a < t.f.pair_count(); ++a) {
    const Matrix fa = truncate(t.f.upper(a), level);
    const auto partner = t.partner_of_f(a);
    for (std::size_t b = 0; b < t.g.pair_count(); ++b) {
      const bool c_pair = partner == b;
      if (!c_pair && !pair_order(m, t, a, b)) continue;
      std::optional<std::size_t> tag;
      if (c_pair)
        for (std::size_t c = 0; c < t.c_pairs.size(); ++c)
          if (t.c_pairs[c].f_pair == a) tag = c;
      const Matrix gb = truncate(t.g.upper(b), level);
      for (std::size_t i = 0; i < fa.rows(); ++i)
        for (std::size_t j = 0; j < gb.rows(); ++j)
          out.push_back({FinitaryElement::rank_one(untruncate(Side::V, fa.row(i), level, K),
                                                   untruncate(Side::W, gb.row(j), level, Ks)),
                         tag});
    }
  }
  return out;
}

std::vector<FinitaryElement> pminus_generators(const Model& m, const TautCouple& t, Ambient ambient,
                                               std::size_t level) {
  const auto inf = infinite_blocks(t);
  const std::size_t dim = inf.size() + (ambient == Ambient::Sl ? 1 : 0);
  // Greedy elimination on the trace vector; reduced leftovers with zero traces lie in p₋.
  std::vector<std::pair<Vec, FinitaryElement>> pivots;
  std::vector<std::size_t> pivot_col;
  std::vector<FinitaryElement> out;
  for (auto& g : pplus_generators(m, t, level)) {
    Vec tau(dim);
    const Rational tr = trace(m, g.element);
    if (g.c_index)
      for (std::size_t i = 0; i < inf.size(); ++i)
        if (inf[i] == *g.c_index) tau[i] = tr;
    if (ambient == Ambient::Sl) tau[dim - 1] = tr;
    FinitaryElement e = g.element;
    for (std::size_t p = 0; p < pivots.size(); ++p) {
      const Rational c = tau[pivot_col[p]];
      if (c == 0) continue;
      tau = vec_sub(tau, vec_scale(c, pivots[p].first));
      e = subtract(e, scale(c, pivots[p].second));
    }
    auto nz = std::find_if(tau.begin(), tau.end(), [](const Rational& q) { return q != 0; });
    if (nz == tau.end()) {
      if (!e.is_zero()) out.push_back(std::move(e));
      continue;
    }
    const std::size_t col = static_cast<std::size_t>(nz - tau.begin());
    const Rational inv = 1 / tau[col];
    pivots.emplace_back(vec_scale(inv, tau), scale(inv, e));
    pivot_col.push_back(col);
  }
  return out;
}

bool normalizer_sample(const Model& m, const FinitaryElement& x, const TautCouple& t, Ambient ambient,
                       std::size_t level) {
  for (const auto& y : pminus_generators(m, t, ambient, level))
    if (!in_pminus(m, bracket(m, x, y), t, ambient)) return false;
  return true;
}

bool perp_parabolic_member(const Model& m, const FinitaryElement& x, const TautCouple& t) {
  return in_stabilizer(m, x, fc_flag(m, t.f)) && in_stabilizer(m, x, fc_flag(m, t.g));
}

// ---------------------------------------------------------------- so / sp

std::string classical_name(ClassicalKind k) { return k == ClassicalKind::So ? "so" : "sp"; }

namespace {

void require_form(const Model& m) {
  if (m.form_kind == FormKind::None || !m.iota) fail("NoFormOnModel", "operation needs a form");
}

}  // namespace

FinitaryElement wedge(const Model& m, const Vector& u, const Vector& v) {
  require_form(m);
  return subtract(FinitaryElement::rank_one(u, theta(m, v)), FinitaryElement::rank_one(v, theta(m, u)));
}

FinitaryElement sym(const Model& m, const Vector& u, const Vector& v) {
  require_form(m);
  return add(FinitaryElement::rank_one(u, theta(m, v)), FinitaryElement::rank_one(v, theta(m, u)));
}

FinitaryElement lambda_op(const Model& m, const FinitaryElement& x) {
  require_form(m);
  FinitaryElement out(0, 0);
  for (const auto& [v, w] : x.terms()) out = add(out, wedge(m, v, theta_inverse(m, w)));
  return out;
}

FinitaryElement s_op(const Model& m, const FinitaryElement& x) {
  require_form(m);
  FinitaryElement out(0, 0);
  for (const auto& [v, w] : x.terms()) out = add(out, sym(m, v, theta_inverse(m, w)));
  return out;
}

bool in_classical(const Model& m, const FinitaryElement& x, ClassicalKind k) {
  require_form(m);
  const bool symmetric = m.form_kind == FormKind::Symmetric;
  if ((k == ClassicalKind::So) != symmetric) fail("WrongFormKind", classical_name(k) + " needs the other form kind");
  require_model(m, x);
  // B(xu, y) + B(u, xy) is the pairing of u⊗y with Σ w⊗Θv + s·Θv⊗w, s the form's symmetry sign.
  const auto ts = x.terms();
  std::vector<Vector> thetas;
  for (const auto& [v, w] : ts) thetas.push_back(theta(m, v));
  const std::size_t L = std::max(x.level(), support_of(thetas));
  Matrix t(L, L);
  const Rational s = symmetric ? 1 : -1;
  for (std::size_t k2 = 0; k2 < ts.size(); ++k2) {
    const Vec w = truncate(ts[k2].second, L), tv = truncate(thetas[k2], L);
    for (std::size_t i = 0; i < L; ++i)
      for (std::size_t j = 0; j < L; ++j) t(i, j) += w[i] * tv[j] + s * tv[i] * w[j];
  }
  return t.is_zero();
}

TautCouple self_taut_couple(const Model& m, const FinitePairFlag& f) {
  require_form(m);
  if (!self_taut_and_iso(m, f).self_taut) fail("NotSelfTaut", f.to_string());
  std::vector<Subspace> g;
  for (const auto& s : f.chain) g.push_back(theta(m, s));
  return make_taut_couple(m, f, flag_from_chain(Side::W, 0, g));
}

bool in_so_sp_stabilizer_minus(const Model& m, const FinitaryElement& x, const FinitePairFlag& f, ClassicalKind k) {
  if (!in_classical(m, x, k)) return false;
  return in_pminus(m, x, self_taut_couple(m, f), Ambient::Gl);
}

}  // namespace flagforge
