#include "flagforge/finoracle.hpp"

#include <algorithm>
#include <utility>

namespace flagforge {

namespace {

FdLieAlgebra as_algebra(const MatSpace& s) {
  FdLieAlgebra g;
  static_cast<MatSpace&>(g) = s;
  return g;
}

void check_square(std::size_t n, const Matrix& m, const char* what) {
  if (m.rows() != n || m.cols() != n)
    fail("DimensionMismatch", std::string(what) + ": expected " + std::to_string(n) + "x" + std::to_string(n) +
                                  ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

/// Coordinates relative to a fixed independent list, via rref of [T | I].
class Coordinator {
public:
  explicit Coordinator(const std::vector<Matrix>& list, std::size_t width) : k_(list.size()), width_(width) {
    Matrix t(0, width);
    for (const auto& m : list) t.append_row(m.flat());
    if (k_ == 0) return;
    auto rr = rref(hstack(t, Matrix::identity(k_)));
    if (rr.rank() < k_ || rr.pivots[k_ - 1] >= width) fail("InternalError", "coordinator list is dependent");
    pivots_.assign(rr.pivots.begin(), rr.pivots.begin() + static_cast<long>(k_));
    reduced_ = Matrix(k_, width);
    e_ = Matrix(k_, k_);
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t j = 0; j < width; ++j) reduced_(i, j) = rr.reduced(i, j);
      for (std::size_t j = 0; j < k_; ++j) e_(i, j) = rr.reduced(i, width + j);
    }
  }
  /// Coordinates of y; y must lie in the span.
  Vec operator()(const Matrix& y) const {
    const Vec& f = y.flat();
    Vec out(k_);
    for (std::size_t i = 0; i < k_; ++i) {
      const Rational& c = f[pivots_[i]];
      if (c == 0) continue;
      for (std::size_t j = 0; j < k_; ++j)
        if (e_(i, j) != 0) out[j] += c * e_(i, j);
    }
    return out;
  }

private:
  std::size_t k_, width_;
  std::vector<std::size_t> pivots_;
  Matrix reduced_{0, 0}, e_{0, 0};
};

/// Greedy complement of `inside` among the candidates.
std::vector<Matrix> complement(const MatSpace& inside, const std::vector<Matrix>& candidates) {
  std::vector<Matrix> out;
  MatSpace acc = inside;
  for (const auto& c : candidates) {
    if (acc.contains(c)) continue;
    out.push_back(c);
    acc = MatSpace::from_flat(acc.n(), vstack(acc.flat(), Matrix::from_rows({c.flat()}, c.flat().size())));
  }
  return out;
}

Matrix random_combination(const std::vector<Matrix>& basis, std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coef(-3, 3);
  Matrix out(n, n);
  for (const auto& b : basis) out += Rational(coef(rng)) * b;
  return out;
}

bool trace_form_zero(const MatSpace& a) {
  auto b = a.basis();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i; j < b.size(); ++j)
      if ((b[i] * b[j]).trace() != 0) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------- MatSpace

MatSpace MatSpace::from_flat(std::size_t n, const Matrix& rows) {
  if (rows.rows() > 0 && rows.cols() != n * n) fail("DimensionMismatch", "flattened rows have the wrong width");
  MatSpace s(n);
  if (rows.rows() == 0) return s;
  auto rr = rref(rows);
  for (std::size_t i = 0; i < rr.rank(); ++i) s.flat_.append_row(rr.reduced.row(i));
  s.pivots_ = rr.pivots;
  return s;
}

MatSpace MatSpace::span(std::size_t n, const std::vector<Matrix>& ms) {
  Matrix rows(0, n * n);
  for (const auto& m : ms) {
    check_square(n, m, "MatSpace::span");
    rows.append_row(m.flat());
  }
  return from_flat(n, rows);
}

Matrix MatSpace::basis(std::size_t i) const { return Matrix::unflatten(flat_.row(i), n_, n_); }

std::vector<Matrix> MatSpace::basis() const {
  std::vector<Matrix> out;
  out.reserve(dim());
  for (std::size_t i = 0; i < dim(); ++i) out.push_back(basis(i));
  return out;
}

bool MatSpace::contains(const Matrix& x) const {
  check_square(n_, x, "MatSpace::contains");
  const Vec& f = x.flat();
  Vec rebuilt(n_ * n_);
  for (std::size_t i = 0; i < dim(); ++i) {
    const Rational& c = f[pivots_[i]];
    if (c == 0) continue;
    for (std::size_t j = 0; j < rebuilt.size(); ++j)
      if (flat_(i, j) != 0) rebuilt[j] += c * flat_(i, j);
  }
  return rebuilt == f;
}

bool MatSpace::contains(const MatSpace& s) const {
  if (s.n_ != n_) return false;
  for (std::size_t i = 0; i < s.dim(); ++i)
    if (!contains(s.basis(i))) return false;
  return true;
}

Vec MatSpace::coords(const Matrix& x) const {
  if (!contains(x)) fail("NotAMember", "matrix outside the subspace:\n" + x.to_string());
  Vec c(dim());
  for (std::size_t i = 0; i < dim(); ++i) c[i] = x.flat()[pivots_[i]];
  return c;
}

Matrix MatSpace::element(const Vec& c) const {
  if (c.size() != dim()) fail("DimensionMismatch", "coordinate vector length");
  Vec f(n_ * n_);
  for (std::size_t i = 0; i < dim(); ++i) {
    if (c[i] == 0) continue;
    for (std::size_t j = 0; j < f.size(); ++j)
      if (flat_(i, j) != 0) f[j] += c[i] * flat_(i, j);
  }
  return Matrix::unflatten(f, n_, n_);
}

MatSpace space_sum(const MatSpace& a, const MatSpace& b) {
  if (a.n() != b.n()) fail("DimensionMismatch", "space_sum");
  return MatSpace::from_flat(a.n(), vstack(a.flat(), b.flat()));
}

MatSpace space_intersection(const MatSpace& a, const MatSpace& b) {
  if (a.n() != b.n()) fail("DimensionMismatch", "space_intersection");
  return MatSpace::from_flat(a.n(), row_space_intersection(a.flat(), b.flat()));
}

MatSpace bracket_space(const MatSpace& a, const MatSpace& b) {
  if (a.n() != b.n()) fail("DimensionMismatch", "bracket_space");
  std::vector<Matrix> out;
  auto ab = a.basis(), bb = b.basis();
  for (const auto& x : ab)
    for (const auto& y : bb) out.push_back(commutator(x, y));
  return MatSpace::span(a.n(), out);
}

FdLieAlgebra FdLieAlgebra::from_space(const MatSpace& s) {
  auto b = s.basis();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      Matrix c = commutator(b[i], b[j]);
      if (!s.contains(c)) fail("NotClosed", "bracket of basis elements " + std::to_string(i) + " and " +
                                                std::to_string(j) + " leaves the span:\n" + c.to_string());
    }
  return as_algebra(s);
}

// ---------------------------------------------------------------- constructions

FdLieAlgebra lie_close(std::size_t n, const std::vector<Matrix>& gens) {
  MatSpace s = MatSpace::span(n, gens);
  std::vector<Matrix> list = s.basis();
  for (std::size_t i = 0; i < list.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      Matrix c = commutator(list[i], list[j]);
      if (s.contains(c)) continue;
      list.push_back(c);
      s = MatSpace::from_flat(n, vstack(s.flat(), Matrix::from_rows({c.flat()}, n * n)));
    }
  return as_algebra(s);
}

FdLieAlgebra gl(std::size_t n) {
  std::vector<Matrix> b;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b.push_back(Matrix::unit(n, i, j));
  return as_algebra(MatSpace::span(n, b));
}

FdLieAlgebra sl(std::size_t n) {
  std::vector<Matrix> b;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) b.push_back(Matrix::unit(n, i, j));
  for (std::size_t i = 0; i + 1 < n; ++i) b.push_back(Matrix::unit(n, i, i) - Matrix::unit(n, i + 1, i + 1));
  return as_algebra(MatSpace::span(n, b));
}

FdLieAlgebra borel(std::size_t n) {
  std::vector<Matrix> b;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) b.push_back(Matrix::unit(n, i, j));
  return as_algebra(MatSpace::span(n, b));
}

FdLieAlgebra block_parabolic(const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> block;
  for (std::size_t k = 0; k < sizes.size(); ++k)
    for (std::size_t i = 0; i < sizes[k]; ++i) block.push_back(k);
  const std::size_t n = block.size();
  std::vector<Matrix> b;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (block[i] <= block[j]) b.push_back(Matrix::unit(n, i, j));
  return as_algebra(MatSpace::span(n, b));
}

FdLieAlgebra derived(const FdLieAlgebra& g) { return as_algebra(bracket_space(g, g)); }

bool is_solvable(const FdLieAlgebra& g) {
  FdLieAlgebra cur = g;
  while (cur.dim() > 0) {
    FdLieAlgebra next = derived(cur);
    if (next.dim() == cur.dim()) return false;
    cur = next;
  }
  return true;
}

bool is_nilpotent_algebra(const FdLieAlgebra& g) {
  MatSpace cur = g;
  while (cur.dim() > 0) {
    MatSpace next = bracket_space(g, cur);
    if (next.dim() == cur.dim()) return false;
    cur = next;
  }
  return true;
}

Matrix ad_matrix(const FdLieAlgebra& g, const Matrix& x) {
  auto b = g.basis();
  Matrix out(g.dim(), g.dim());
  for (std::size_t j = 0; j < b.size(); ++j) {
    Vec c = g.coords(commutator(x, b[j]));
    for (std::size_t i = 0; i < c.size(); ++i) out(i, j) = c[i];
  }
  return out;
}

Matrix killing_matrix(const FdLieAlgebra& g) {
  std::vector<Matrix> ads;
  for (const auto& b : g.basis()) ads.push_back(ad_matrix(g, b));
  Matrix k(g.dim(), g.dim());
  for (std::size_t i = 0; i < ads.size(); ++i)
    for (std::size_t j = i; j < ads.size(); ++j) k(i, j) = k(j, i) = (ads[i] * ads[j]).trace();
  return k;
}

bool is_semisimple_algebra(const FdLieAlgebra& g) { return rank(killing_matrix(g)) == g.dim(); }

bool is_ideal(const FdLieAlgebra& g, const MatSpace& i) {
  return g.contains(i) && i.contains(bracket_space(g, i));
}

FdLieAlgebra centralizer(const FdLieAlgebra& k, const std::vector<Matrix>& ss) {
  const std::size_t n = k.n(), d = k.dim();
  if (ss.empty() || d == 0) return k;
  auto b = k.basis();
  Matrix eq(n * n * ss.size(), d);
  for (std::size_t s = 0; s < ss.size(); ++s) {
    check_square(n, ss[s], "centralizer");
    for (std::size_t i = 0; i < d; ++i) {
      const Vec f = commutator(b[i], ss[s]).flat();
      for (std::size_t r = 0; r < f.size(); ++r) eq(s * n * n + r, i) = f[r];
    }
  }
  Matrix ker = kernel(eq);
  std::vector<Matrix> out;
  for (std::size_t r = 0; r < ker.rows(); ++r) out.push_back(k.element(ker.row(r)));
  return as_algebra(MatSpace::span(n, out));
}

FdLieAlgebra normalizer(const FdLieAlgebra& k, const MatSpace& h) {
  const std::size_t n = k.n(), d = k.dim();
  if (h.dim() == 0 || d == 0) return k;
  Matrix ann = annihilator(h.flat());
  if (ann.rows() == 0) return k;
  auto b = k.basis();
  auto hb = h.basis();
  Matrix eq(ann.rows() * hb.size(), d);
  for (std::size_t j = 0; j < hb.size(); ++j)
    for (std::size_t i = 0; i < d; ++i) {
      Vec v = ann.apply(commutator(b[i], hb[j]).flat());
      for (std::size_t r = 0; r < v.size(); ++r) eq(j * ann.rows() + r, i) = v[r];
    }
  Matrix ker = kernel(eq);
  std::vector<Matrix> out;
  for (std::size_t r = 0; r < ker.rows(); ++r) out.push_back(k.element(ker.row(r)));
  return as_algebra(MatSpace::span(n, out));
}

// ---------------------------------------------------------------- radicals

FdLieAlgebra solvable_radical(const FdLieAlgebra& g) {
  if (g.dim() == 0) return g;
  FdLieAlgebra d = derived(g);
  if (d.dim() == 0) return g;
  Matrix dc(0, g.dim());
  for (const auto& x : d.basis()) dc.append_row(g.coords(x));
  Matrix ker = kernel(dc * killing_matrix(g));
  std::vector<Matrix> out;
  for (std::size_t r = 0; r < ker.rows(); ++r) out.push_back(g.element(ker.row(r)));
  FdLieAlgebra r = as_algebra(MatSpace::span(g.n(), out));
  if (!is_solvable(r) || !is_ideal(g, r)) fail("InternalError", "Killing-orthogonal of [g,g] is not a solvable ideal");
  return r;
}

MatSpace assoc_closure(std::size_t n, const std::vector<Matrix>& gens, bool unital) {
  std::vector<Matrix> seed = gens;
  if (unital) seed.push_back(Matrix::identity(n));
  MatSpace s = MatSpace::span(n, seed);
  std::vector<Matrix> list = s.basis();
  auto adjoin = [&](const Matrix& p) {
    if (s.contains(p)) return;
    list.push_back(p);
    s = MatSpace::from_flat(n, vstack(s.flat(), Matrix::from_rows({p.flat()}, n * n)));
  };
  for (std::size_t i = 0; i < list.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      Matrix a = list[i], b = list[j];
      adjoin(a * b);
      if (i != j) adjoin(b * a);
    }
  return s;
}

MatSpace jacobson_radical(const MatSpace& a) {
  // {x : tr(xy) = 0 ∀y ∈ a}; a nil ideal, and every nil ideal lies in it
  auto b = a.basis();
  Matrix gram(b.size(), b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i; j < b.size(); ++j) gram(i, j) = gram(j, i) = (b[i] * b[j]).trace();
  Matrix ker = kernel(gram);
  std::vector<Matrix> out;
  for (std::size_t r = 0; r < ker.rows(); ++r) out.push_back(a.element(ker.row(r)));
  return MatSpace::span(a.n(), out);
}

FdLieAlgebra linear_nilradical(const FdLieAlgebra& g) {
  FdLieAlgebra r = solvable_radical(g);
  if (r.dim() == 0) return r;
  MatSpace j = jacobson_radical(assoc_closure(g.n(), r.basis(), true));
  FdLieAlgebra n = as_algebra(space_intersection(r, j));
  for (const auto& x : n.basis())
    if (!is_nilpotent(x)) fail("InternalError", "linear nilradical holds a non-nilpotent element");
  if (!is_ideal(g, n)) fail("InternalError", "linear nilradical is not an ideal");
  return n;
}

FdLieAlgebra levi_component(const FdLieAlgebra& g) {
  const std::size_t n = g.n();
  FdLieAlgebra r = solvable_radical(g);
  if (r.dim() == 0) return g;
  if (r.dim() == g.dim()) return FdLieAlgebra(n);

  std::vector<Matrix> xs = complement(r, g.basis());
  std::vector<FdLieAlgebra> series{r};
  while (series.back().dim() > 0) series.push_back(derived(series.back()));

  const std::size_t s = xs.size();
  for (std::size_t lvl = 0; lvl + 1 < series.size(); ++lvl) {
    // x_a ← x_a + φ_a with φ_a ∈ Q, so that [x_a, x_b] ≡ Σ c_abd x_d mod R_{lvl+1}
    const FdLieAlgebra& ri = series[lvl];
    const FdLieAlgebra& rn = series[lvl + 1];
    std::vector<Matrix> q = complement(rn, ri.basis());
    const std::size_t m = q.size();
    std::vector<Matrix> qr = q;
    for (const auto& b : rn.basis()) qr.push_back(b);
    Coordinator proj_all(qr, n * n);
    auto proj = [&](const Matrix& y) {
      Vec c = proj_all(y);
      c.resize(m);
      return c;
    };
    std::vector<Matrix> xr = xs;
    for (const auto& b : ri.basis()) xr.push_back(b);
    Coordinator split(xr, n * n);

    std::vector<std::vector<Vec>> xq(s, std::vector<Vec>(m));  // proj([x_a, q_t])
    for (std::size_t a = 0; a < s; ++a)
      for (std::size_t t = 0; t < m; ++t) xq[a][t] = proj(commutator(xs[a], q[t]));

    const std::size_t unknowns = s * m;
    Matrix sys(0, unknowns);
    Vec rhs;
    for (std::size_t a = 0; a < s; ++a)
      for (std::size_t b = a + 1; b < s; ++b) {
        Matrix br = commutator(xs[a], xs[b]);
        Vec c = split(br);
        Matrix rho = br;
        for (std::size_t d = 0; d < s; ++d)
          if (c[d] != 0) rho -= c[d] * xs[d];
        Vec prho = proj(rho);
        for (std::size_t tp = 0; tp < m; ++tp) {
          Vec row(unknowns);
          for (std::size_t t = 0; t < m; ++t) {
            row[b * m + t] += xq[a][t][tp];  // [x_a, φ_b]
            row[a * m + t] -= xq[b][t][tp];  // [φ_a, x_b] = −[x_b, φ_a]
          }
          for (std::size_t d = 0; d < s; ++d) row[d * m + tp] -= c[d];
          sys.append_row(row);
          rhs.push_back(-prho[tp]);
        }
      }
    if (sys.rows() == 0 || unknowns == 0) continue;
    auto u = solve(sys, rhs);
    if (!u) fail("InternalError", "Levi lifting system is inconsistent");
    for (std::size_t d = 0; d < s; ++d)
      for (std::size_t t = 0; t < m; ++t)
        if ((*u)[d * m + t] != 0) xs[d] += (*u)[d * m + t] * q[t];
  }
  FdLieAlgebra l = FdLieAlgebra::from_basis(n, xs);
  if (l.dim() + r.dim() != g.dim() || !is_semisimple_algebra(l))
    fail("InternalError", "Levi lifting produced a non-semisimple complement");
  return l;
}

// ---------------------------------------------------------------- splittability and tori

std::optional<Matrix> splittable_witness(const FdLieAlgebra& g) {
  for (const auto& b : g.basis())
    if (!g.contains(jordan_chevalley(b).ss)) return b;
  return std::nullopt;
}

FdLieAlgebra splittable_closure(const FdLieAlgebra& g) {
  FdLieAlgebra cur = g;
  for (;;) {
    std::vector<Matrix> gens = cur.basis();
    for (const auto& b : cur.basis()) {
      auto jc = jordan_chevalley(b);
      gens.push_back(jc.ss);
      gens.push_back(jc.nil);
    }
    FdLieAlgebra next = lie_close(cur.n(), gens);
    if (next.dim() == cur.dim()) return cur;
    cur = next;
  }
}

bool is_toral(const MatSpace& t) {
  auto b = t.basis();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!is_semisimple(b[i])) return false;
    for (std::size_t j = i + 1; j < b.size(); ++j)
      if (!commutator(b[i], b[j]).is_zero()) return false;
  }
  return true;
}

bool is_maximal_torus(const FdLieAlgebra& k, const MatSpace& t) {
  if (!k.contains(t) || !is_toral(t)) return false;
  // z_k(t) = t + span(nil parts), maximal iff the nil parts generate a nilpotent algebra
  FdLieAlgebra c = centralizer(k, t.basis());
  std::vector<Matrix> nils;
  for (const auto& y : c.basis()) {
    auto jc = jordan_chevalley(y);
    if (!t.contains(jc.ss)) return false;
    nils.push_back(jc.nil);
  }
  return trace_form_zero(assoc_closure(k.n(), nils, false));
}

MatSpace maximal_torus(const FdLieAlgebra& k, std::mt19937_64& rng) {
  const std::size_t n = k.n();
  MatSpace t(n);
  const std::size_t random_tries = 4 * k.dim() + 8;
  for (std::size_t round = 0; round <= n * n + 1; ++round) {
    FdLieAlgebra c = centralizer(k, t.basis());
    auto cb = c.basis();
    bool grown = false;
    auto try_element = [&](const Matrix& y) {
      Matrix s = jordan_chevalley(y).ss;
      if (!k.contains(s)) fail("NotSplittable", "semisimple part leaves the algebra:\n" + y.to_string());
      if (t.contains(s)) return false;
      t = MatSpace::from_flat(n, vstack(t.flat(), Matrix::from_rows({s.flat()}, n * n)));
      return true;
    };
    for (const auto& y : cb)
      if ((grown = try_element(y))) break;
    if (grown) continue;
    if (is_maximal_torus(k, t)) return t;
    for (std::size_t i = 0; i < random_tries && !grown; ++i) grown = try_element(random_combination(cb, n, rng));
    if (!grown) fail("InternalError", "maximal torus search stalled");
  }
  fail("InternalError", "maximal torus search did not terminate");
}

FdDecomposition locally_reductive_part(const FdLieAlgebra& g, std::uint64_t seed) {
  if (auto w = splittable_witness(g)) fail("NotSplittable", "Jordan parts leave the algebra for\n" + w->to_string());
  const std::size_t n = g.n();
  FdDecomposition out;
  out.nilradical = linear_nilradical(g);
  out.levi = levi_component(g);
  FdLieAlgebra r = solvable_radical(g);
  FdLieAlgebra z = centralizer(r, out.levi.basis());
  std::mt19937_64 rng(seed);
  out.torus = as_algebra(maximal_torus(z, rng));
  out.reductive_part = FdLieAlgebra::from_space(space_sum(out.levi, out.torus));
  if (out.nilradical.dim() + out.reductive_part.dim() != g.dim() ||
      space_intersection(out.nilradical, out.reductive_part).dim() != 0)
    fail("InternalError", "nilradical and reductive part do not split g");
  (void)n;
  return out;
}

// ---------------------------------------------------------------- Cartan subalgebras

FdLieAlgebra fitting_null(const FdLieAlgebra& k, const FdLieAlgebra& h) {
  if (!k.contains(h)) fail("NotContained", "h is not inside k");
  const std::size_t d = k.dim();
  Matrix acc = Matrix::identity(d);
  for (const auto& y : h.basis()) {
    Matrix gk = kernel(power(ad_matrix(k, y), d));
    acc = row_space_intersection(acc, gk);
    if (acc.rows() == 0) break;
  }
  std::vector<Matrix> out;
  for (std::size_t r = 0; r < acc.rows(); ++r) out.push_back(k.element(acc.row(r)));
  return as_algebra(MatSpace::span(k.n(), out));
}

FdLieAlgebra cartan_from_torus(const FdLieAlgebra& k, const MatSpace& t) {
  if (!k.contains(t)) fail("NotContained", "torus is not inside k");
  if (!is_toral(t)) fail("NotToral", "basis elements must be commuting semisimple matrices");
  return centralizer(k, t.basis());
}

CartanReport cartan_queries(const FdLieAlgebra& k, const FdLieAlgebra& h) {
  if (!k.contains(h)) fail("NotContained", "h is not inside k");
  if (auto w = splittable_witness(k)) fail("NotSplittable", "Jordan parts leave k for\n" + w->to_string());
  CartanReport rep;
  rep.nilpotent = is_nilpotent_algebra(h);
  std::vector<Matrix> ss;
  for (const auto& b : h.basis()) ss.push_back(jordan_chevalley(b).ss);
  MatSpace hss = MatSpace::span(k.n(), ss);
  const bool toral = is_toral(hss);
  const FdLieAlgebra z = centralizer(k, hss.basis());
  rep.via_d = rep.nilpotent && toral && z == h;
  rep.via_e = toral && is_maximal_torus(k, hss) && z == h;
  rep.via_f = splittable_closure(fitting_null(k, h)) == h;
  rep.self_normalizing = normalizer(k, h) == h;
  rep.is_cartan = rep.via_d;
  if (rep.is_cartan && !(rep.self_normalizing && rep.nilpotent))
    fail("InternalError", "Cartan verdict without self-normalizing nilpotent subalgebra");
  return rep;
}

// ---------------------------------------------------------------- modules

Matrix annihilator_rows(std::size_t n, const Matrix& rows) {
  if (rows.rows() == 0) return Matrix::identity(n);
  return kernel(rows);
}

Matrix spin(const Matrix& start, const std::vector<Matrix>& gens) {
  const std::size_t n = start.cols();
  Matrix basis = start.rows() ? row_basis(start) : Matrix(0, n);
  std::vector<Vec> queue = basis.row_list();
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (const auto& g : gens) {
      Vec w = g.apply(queue[i]);
      if (in_row_space(basis, w)) continue;
      basis.append_row(w);
      basis = row_basis(basis);
      queue.push_back(w);
    }
  return basis;
}

namespace {

Poly lowest_degree_factor(const std::vector<std::pair<Poly, int>>& fs) {
  return std::min_element(fs.begin(), fs.end(), [](const auto& a, const auto& b) {
           return a.first.degree() < b.first.degree();
         })->first;
}

/// Proper nonzero submodule of ℚ^d (row basis), or nullopt with M certified irreducible.
std::optional<Matrix> find_submodule(const std::vector<Matrix>& as, std::size_t d, std::mt19937_64& rng) {
  if (d <= 1) return std::nullopt;
  MatSpace alg = assoc_closure(d, as, true);
  MatSpace j = jacobson_radical(alg);
  if (j.dim() > 0) {
    // J·M: nonzero since J ≠ 0, proper since J is nilpotent
    Matrix cols(0, d);
    for (const auto& x : j.basis()) cols = vstack(cols, x.transpose());
    return row_basis(cols);
  }
  // semisimple module: inspect the commutant
  Matrix eq(0, d * d);
  for (const auto& a : as)
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        // (Y a − a Y)_{rc}
        Vec row(d * d);
        for (std::size_t k = 0; k < d; ++k) {
          row[r * d + k] += a(k, c);
          row[k * d + c] -= a(r, k);
        }
        eq.append_row(row);
      }
  Matrix ker = kernel(eq);
  std::vector<Matrix> ends;
  for (std::size_t r = 0; r < ker.rows(); ++r) ends.push_back(Matrix::unflatten(ker.row(r), d, d));
  if (ends.size() == 1) return std::nullopt;  // End = ℚ on a semisimple module
  bool commutative = true;
  for (std::size_t a = 0; a < ends.size() && commutative; ++a)
    for (std::size_t b = a + 1; b < ends.size() && commutative; ++b)
      commutative = commutator(ends[a], ends[b]).is_zero();

  auto alg_basis = alg.basis();
  std::vector<Matrix> transposed;
  for (const auto& a : as) transposed.push_back(a.transpose());
  for (int attempt = 0; attempt < 64; ++attempt) {
    Matrix y = random_combination(ends, d, rng);
    auto fy = factor(minimal_polynomial(y));
    if (fy.size() > 1 || fy[0].second > 1) return kernel(lowest_degree_factor(fy).eval(y));
    if (commutative && static_cast<std::size_t>(fy[0].first.degree()) == ends.size())
      return std::nullopt;  // End is a field
    // Norton's test with a dual spin
    Matrix a = random_combination(alg_basis, d, rng);
    for (const auto& [p, mult] : factor(charpoly(a))) {
      (void)mult;
      Matrix pa = p.eval(a);
      Matrix nk = kernel(pa);
      Matrix s = spin(Matrix::from_rows({nk.row(0)}, d), as);
      if (s.rows() < d) return s;
      if (nk.rows() != static_cast<std::size_t>(p.degree())) continue;
      Matrix nt = kernel(pa.transpose());
      Matrix st = spin(Matrix::from_rows({nt.row(0)}, d), transposed);
      if (st.rows() < d) return kernel(st);
      return std::nullopt;
    }
  }
  fail("MeataxeUndecided", "no certificate after 64 random elements");
}

std::vector<Matrix> refine(const Matrix& lo, const Matrix& hi, const std::vector<Matrix>& gens, std::mt19937_64& rng) {
  const std::size_t n = hi.cols();
  if (hi.rows() == lo.rows()) return {};
  Matrix c(0, n);
  Matrix acc = lo;
  for (std::size_t i = 0; i < hi.rows(); ++i) {
    if (in_row_space(acc, hi.row(i))) continue;
    c.append_row(hi.row(i));
    acc.append_row(hi.row(i));
  }
  const std::size_t d = c.rows();
  Matrix all_t = vstack(c, lo).transpose();
  std::vector<Matrix> as;
  for (const auto& g : gens) {
    Matrix a(d, d);
    for (std::size_t j = 0; j < d; ++j) {
      auto x = solve(all_t, g.apply(c.row(j)));
      if (!x) fail("InternalError", "section is not stable");
      for (std::size_t i = 0; i < d; ++i) a(i, j) = (*x)[i];
    }
    as.push_back(a);
  }
  auto sub = find_submodule(as, d, rng);
  if (!sub) return {hi};
  Matrix mid = row_basis(vstack(lo, *sub * c));
  auto lower = refine(lo, mid, gens, rng);
  auto upper = refine(mid, hi, gens, rng);
  lower.insert(lower.end(), upper.begin(), upper.end());
  return lower;
}

}  // namespace

CompositionSeries composition_series(std::size_t n, const std::vector<Matrix>& gens, std::mt19937_64& rng) {
  for (const auto& g : gens) check_square(n, g, "composition_series");
  CompositionSeries out;
  out.chain.push_back(Matrix(0, n));
  for (auto& f : refine(Matrix(0, n), Matrix::identity(n), gens, rng)) out.chain.push_back(row_basis(f));
  out.certified = true;
  return out;
}

MatSpace fd_stabilizer(std::size_t n, const std::vector<Matrix>& chain) {
  Matrix eq(0, n * n);
  for (const auto& f : chain) {
    if (f.rows() == 0) continue;
    Matrix ann = annihilator_rows(n, f);
    for (std::size_t wi = 0; wi < ann.rows(); ++wi)
      for (std::size_t ui = 0; ui < f.rows(); ++ui) {
        Vec row(n * n);
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) row[a * n + b] = ann(wi, a) * f(ui, b);
        eq.append_row(row);
      }
  }
  Matrix ker = kernel(eq);
  return MatSpace::from_flat(n, ker);
}

namespace {
MatSpace tensor_sum(std::size_t n, const std::vector<std::pair<Matrix, Matrix>>& pairs) {
  Matrix rows(0, n * n);
  for (const auto& [vs, ws] : pairs)
    for (std::size_t i = 0; i < vs.rows(); ++i)
      for (std::size_t j = 0; j < ws.rows(); ++j) {
        Vec row(n * n);
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) row[a * n + b] = vs(i, a) * ws(j, b);
        rows.append_row(row);
      }
  return MatSpace::from_flat(n, rows);
}
}  // namespace

MatSpace fd_stabilizer_formula(std::size_t n, const std::vector<Matrix>& chain) {
  std::vector<std::pair<Matrix, Matrix>> pairs;
  for (std::size_t i = 1; i < chain.size(); ++i) pairs.emplace_back(chain[i], annihilator_rows(n, chain[i - 1]));
  return tensor_sum(n, pairs);
}

MatSpace fd_nilradical_formula(std::size_t n, const std::vector<Matrix>& chain) {
  std::vector<std::pair<Matrix, Matrix>> pairs;
  for (const auto& f : chain) pairs.emplace_back(f, annihilator_rows(n, f));
  return tensor_sum(n, pairs);
}

FdCouple invariant_taut_couple(const FdLieAlgebra& k, std::uint64_t seed) {
  const std::size_t n = k.n();
  std::mt19937_64 rng(seed);
  CompositionSeries cs = composition_series(n, k.basis(), rng);
  FdCouple out;
  out.chain = cs.chain;
  for (auto it = cs.chain.rbegin(); it != cs.chain.rend(); ++it) {
    Matrix a = annihilator_rows(n, *it);
    out.dual_chain.push_back(a.rows() ? row_basis(a) : Matrix(0, n));
  }
  out.certified = cs.certified;
  out.quotients_irreducible = cs.certified;
  FdLieAlgebra nk = linear_nilradical(k);
  out.nilradical_matches = MatSpace(nk) == space_intersection(fd_nilradical_formula(n, cs.chain), k);
  return out;
}

// ---------------------------------------------------------------- parabolics

bool is_maximal_solvable_in(const FdLieAlgebra& g, const FdLieAlgebra& b) {
  if (!g.contains(b) || !is_solvable(b)) return false;
  std::vector<Matrix> comp = complement(b, g.basis());
  std::mt19937_64 rng(0x5eed);
  std::vector<Matrix> probes = comp;
  for (std::size_t i = 0; i < comp.size() && !comp.empty(); ++i) probes.push_back(random_combination(comp, g.n(), rng));
  for (const auto& x : probes) {
    std::vector<Matrix> gens = b.basis();
    gens.push_back(x);
    if (is_solvable(lie_close(g.n(), gens))) return false;
  }
  return true;
}

FdLieAlgebra borel_of(const FdLieAlgebra& g, std::uint64_t seed) {
  const std::size_t n = g.n();
  std::mt19937_64 rng(seed);
  FdLieAlgebra b(n);
  if (!splittable_witness(g)) b = cartan_from_torus(g, maximal_torus(g, rng));
  std::vector<Matrix> probes = g.basis();
  for (std::size_t i = 0; i < 2 * g.dim(); ++i) probes.push_back(random_combination(g.basis(), n, rng));
  for (const auto& x : probes) {
    if (b.contains(x)) continue;
    std::vector<Matrix> gens = b.basis();
    gens.push_back(x);
    FdLieAlgebra c = lie_close(n, gens);
    if (is_solvable(c)) b = c;
  }
  return b;
}

ParabolicReport fd_parabolic_tests(const FdLieAlgebra& p, std::uint64_t seed) {
  const std::size_t n = p.n();
  std::mt19937_64 rng(seed);
  CompositionSeries cs = composition_series(n, p.basis(), rng);
  ParabolicReport rep;
  rep.is_parabolic = fd_stabilizer(n, cs.chain) == static_cast<const MatSpace&>(p);
  FdLieAlgebra b(n);
  if (rep.is_parabolic) {
    // complete refinement of the invariant chain
    std::vector<Matrix> full{Matrix(0, n)};
    Matrix cur(0, n);
    for (std::size_t i = 1; i < cs.chain.size(); ++i)
      for (std::size_t r = 0; r < cs.chain[i].rows(); ++r) {
        if (in_row_space(cur, cs.chain[i].row(r))) continue;
        cur.append_row(cs.chain[i].row(r));
        full.push_back(row_basis(cur));
      }
    b = as_algebra(fd_stabilizer(n, full));
  } else {
    b = borel_of(p, seed);
  }
  FdLieAlgebra d = derived(p);
  FdLieAlgebra bd = FdLieAlgebra::from_space(space_intersection(b, d));
  rep.borel_restriction_check = is_maximal_solvable_in(d, bd);
  return rep;
}

FdLieAlgebra parabolic_bijection_check(const FdLieAlgebra& g, const FdLieAlgebra& p_red, std::uint64_t seed) {
  FdDecomposition dec = locally_reductive_part(g, seed);
  if (!dec.reductive_part.contains(p_red)) fail("NotParabolicInput", "p_red is not inside the reductive part");
  if (!is_maximal_solvable_in(dec.reductive_part, borel_of(p_red, seed)))
    fail("NotParabolicInput", "p_red contains no Borel subalgebra of the reductive part");
  FdLieAlgebra q = FdLieAlgebra::from_space(space_sum(dec.nilradical, p_red));
  if (!is_maximal_solvable_in(g, borel_of(q, seed)))
    fail("InternalError", "n_g + p_red contains no Borel subalgebra of g");
  if (space_intersection(q, dec.reductive_part) != static_cast<const MatSpace&>(p_red))
    fail("InternalError", "round trip through the reductive part failed");
  return q;
}

}  // namespace flagforge
