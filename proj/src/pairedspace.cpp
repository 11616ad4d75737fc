#include "flagforge/pairedspace.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace flagforge {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

Vec unit_vec(std::size_t n, std::size_t i) {
  Vec v(n);
  v[i] = 1;
  return v;
}

void require_same(const Subspace& a, const Subspace& b, const char* what) {
  if (a.side() != b.side()) fail("SideMismatch", std::string(what) + ": subspaces live on different sides");
  if (a.aug_count() != b.aug_count()) fail("ModelMismatch", std::string(what) + ": augmentation counts differ");
}

// e_c is in the row space of an rref matrix iff some row is exactly e_c.
bool unit_in_rref(const Matrix& l, std::size_t c) {
  for (std::size_t i = 0; i < l.rows(); ++i) {
    if (l(i, c) == 0) continue;
    for (std::size_t j = 0; j < l.cols(); ++j)
      if (j != c && l(i, j) != 0) return false;
    return true;
  }
  return false;
}

Matrix empty_rows(std::size_t cols) { return Matrix(0, cols); }

}  // namespace

std::string side_name(Side s) { return s == Side::V ? "V" : "V*"; }

std::string form_kind_name(FormKind k) {
  switch (k) {
    case FormKind::None: return "none";
    case FormKind::Symmetric: return "symmetric";
    case FormKind::Antisymmetric: return "antisymmetric";
  }
  return "none";
}

// ---------------------------------------------------------------- involution

std::size_t Involution::operator()(std::size_t i) const {
  if (i < threshold) return head[i];
  const std::size_t q = (i - threshold) % period;
  return i - q + block[q];
}

int Involution::sign(std::size_t i) const {
  if (i < threshold) return head_signs[i];
  return block_signs[(i - threshold) % period];
}

Involution default_involution(FormKind kind) {
  Involution iota;
  iota.threshold = 0;
  iota.period = 2;
  iota.block = {1, 0};
  iota.block_signs = kind == FormKind::Antisymmetric ? std::vector<int>{1, -1} : std::vector<int>{1, 1};
  return iota;
}

// ---------------------------------------------------------------- model

void Model::check_shape() const {
  if (cross.rows() != v_augs.size() || cross.cols() != w_augs.size())
    fail("InvalidModel", "cross table must be " + std::to_string(v_augs.size()) + "x" + std::to_string(w_augs.size()));
  if (form_kind == FormKind::None) {
    if (iota) fail("InvalidModel", "iota given without a form");
    return;
  }
  if (!v_augs.empty() || !w_augs.empty()) fail("InvalidModel", "form models carry no augmentations");
  if (!iota) fail("InvalidModel", "form model needs an involution");
  const Involution& t = *iota;
  if (t.period == 0) fail("InvalidModel", "involution period must be positive");
  if (t.head.size() != t.threshold || t.head_signs.size() != t.threshold || t.block.size() != t.period ||
      t.block_signs.size() != t.period)
    fail("InvalidModel", "involution tables have wrong lengths");
  auto check_perm = [&](const std::vector<std::size_t>& perm, const std::vector<int>& signs, const char* where) {
    for (std::size_t i = 0; i < perm.size(); ++i) {
      if (perm[i] >= perm.size() || perm[perm[i]] != i)
        fail("InvalidModel", std::string("involution ") + where + " is not an involutive permutation");
      if (signs[i] != 1 && signs[i] != -1) fail("InvalidModel", "signs must be +1 or -1");
      if (form_kind == FormKind::Symmetric && signs[perm[i]] != signs[i])
        fail("InvalidModel", "symmetric form needs sign(ι(i)) = sign(i)");
      if (form_kind == FormKind::Antisymmetric) {
        if (perm[i] == i) fail("InvalidModel", "antisymmetric form needs a fixed-point-free involution");
        if (signs[perm[i]] != -signs[i]) fail("InvalidModel", "antisymmetric form needs sign(ι(i)) = -sign(i)");
      }
    }
  };
  check_perm(t.head, t.head_signs, "head");
  check_perm(t.block, t.block_signs, "block");
}

Window Model::window() const {
  std::vector<EpSeq> rows(v_augs);
  rows.insert(rows.end(), w_augs.begin(), w_augs.end());
  return stabilization_window({}, rows);
}

Model plain_model() { return Model{{}, {}, Matrix(0, 0), FormKind::None, std::nullopt}; }

Model row_of_ones_model() { return Model{{EpSeq::constant(1)}, {}, Matrix(1, 0), FormKind::None, std::nullopt}; }

Model form_model(FormKind kind, std::optional<Involution> iota) {
  Model m = plain_model();
  m.form_kind = kind;
  if (kind != FormKind::None) m.iota = iota ? *iota : default_involution(kind);
  m.check_shape();
  return m;
}

// ---------------------------------------------------------------- vectors

Vector Vector::zero(Side side, std::size_t aug_count) { return Vector{side, {}, Vec(aug_count)}; }

Vector Vector::unit(Side side, std::size_t aug_count, std::size_t i) {
  Vector v = zero(side, aug_count);
  v.basis[i] = 1;
  return v;
}

Vector Vector::aug_unit(Side side, std::size_t aug_count, std::size_t k) {
  Vector v = zero(side, aug_count);
  v.aug.at(k) = 1;
  return v;
}

bool Vector::is_zero() const { return basis.empty() && flagforge::is_zero(aug); }

std::size_t Vector::support_end() const { return basis.empty() ? 0 : basis.rbegin()->first + 1; }

Rational Vector::at(std::size_t i) const {
  auto it = basis.find(i);
  return it == basis.end() ? Rational(0) : it->second;
}

void Vector::set(std::size_t i, const Rational& c) {
  if (c == 0) basis.erase(i);
  else basis[i] = c;
}

std::string Vector::to_string() const {
  std::ostringstream os;
  const char* b = side == Side::V ? "e" : "f";
  const char* a = side == Side::V ? "a" : "b";
  bool first = true;
  auto term = [&](const Rational& c, const std::string& name) {
    Rational x = c;
    if (!first) os << (x < 0 ? " - " : " + ");
    else if (x < 0) os << "-";
    if (x < 0) x = -x;
    if (x != 1) os << flagforge::to_string(x) << "*";
    os << name;
    first = false;
  };
  for (std::size_t k = 0; k < aug.size(); ++k)
    if (aug[k] != 0) term(aug[k], std::string(a) + std::to_string(k));
  for (const auto& [i, c] : basis) term(c, std::string(b) + std::to_string(i));
  if (first) os << "0";
  return os.str();
}

Vector add(const Vector& a, const Vector& b) {
  if (a.side != b.side) fail("SideMismatch", "vector addition across sides");
  if (a.aug.size() != b.aug.size()) fail("ModelMismatch", "vector addition with different augmentation counts");
  Vector r = a;
  for (const auto& [i, c] : b.basis) r.set(i, r.at(i) + c);
  r.aug = vec_add(a.aug, b.aug);
  return r;
}

Vector scale(const Rational& c, const Vector& a) {
  if (c == 0) return Vector::zero(a.side, a.aug.size());
  Vector r = a;
  for (auto& [i, x] : r.basis) x *= c;
  r.aug = vec_scale(c, a.aug);
  return r;
}

Rational pair(const Model& m, const Vector& v_in, const Vector& g_in) {
  if (v_in.side == g_in.side) fail("SideMismatch", "pairing needs one vector from each side");
  const Vector& v = v_in.side == Side::V ? v_in : g_in;
  const Vector& g = v_in.side == Side::V ? g_in : v_in;
  if (v.aug.size() != m.v_augs.size() || g.aug.size() != m.w_augs.size())
    fail("ModelMismatch", "vector augmentation length does not match the model");
  Rational s = 0;
  for (const auto& [i, c] : v.basis) {
    s += c * g.at(i);
    for (std::size_t l = 0; l < g.aug.size(); ++l)
      if (g.aug[l] != 0) s += c * g.aug[l] * m.w_augs[l].value(i);
  }
  for (std::size_t k = 0; k < v.aug.size(); ++k) {
    if (v.aug[k] == 0) continue;
    for (const auto& [j, c] : g.basis) s += v.aug[k] * c * m.v_augs[k].value(j);
    for (std::size_t l = 0; l < g.aug.size(); ++l) s += v.aug[k] * g.aug[l] * m.cross(k, l);
  }
  return s;
}

// ---------------------------------------------------------------- subspace layout

std::size_t Subspace::coord_count() const {
  return k_ + n_ + static_cast<std::size_t>(std::count(tail_.begin(), tail_.end(), true));
}

std::size_t Subspace::moment_col(std::size_t r) const {
  if (!tail_[r]) return kNone;
  return k_ + n_ + static_cast<std::size_t>(std::count(tail_.begin(), tail_.begin() + static_cast<long>(r), true));
}

std::size_t Subspace::rep(std::size_t r) const { return n_ + (r + p_ - n_ % p_) % p_; }

// Class r of period p splits into r + j·p' classes; the old moment is their sum,
// so the new lattice is the preimage: lifts plus the differences of subclass moments.
void Subspace::raise_period(std::size_t np) {
  if (np == p_) return;
  if (np % p_ != 0) fail("InternalError", "period refinement must be a multiple");
  Subspace out = *this;
  out.p_ = np;
  out.tail_.assign(np, false);
  for (std::size_t c = 0; c < np; ++c) out.tail_[c] = tail_[c % p_];
  const std::size_t cc = out.coord_count();
  Matrix nl(0, cc);
  for (std::size_t i = 0; i < lat_.rows(); ++i) {
    Vec row(cc);
    for (std::size_t j = 0; j < k_ + n_; ++j) row[j] = lat_(i, j);
    for (std::size_t r = 0; r < p_; ++r)
      if (tail_[r]) row[out.moment_col(rep(r) % np)] = lat_(i, moment_col(r));
    nl.append_row(row);
  }
  for (std::size_t r = 0; r < p_; ++r) {
    if (!tail_[r]) continue;
    const std::size_t c0 = rep(r) % np;
    for (std::size_t c = r; c < np; c += p_) {
      if (c == c0) continue;
      Vec row(cc);
      row[out.moment_col(c)] = 1;
      row[out.moment_col(c0)] = -1;
      nl.append_row(row);
    }
  }
  out.lat_ = std::move(nl);
  *this = std::move(out);
}

// Index N becomes a head coordinate; in a tail class the old moment splits as h_N + m'.
void Subspace::raise_threshold_once() {
  const std::size_t i = n_;
  const std::size_t c = i % p_;
  const std::size_t old_cc = coord_count();
  const std::size_t head_col = k_ + n_;
  Matrix nl(0, old_cc + 1);
  for (std::size_t r = 0; r < lat_.rows(); ++r) {
    Vec row(old_cc + 1);
    for (std::size_t j = 0; j < old_cc; ++j) row[j < head_col ? j : j + 1] = lat_(r, j);
    nl.append_row(row);
  }
  if (tail_[c]) {
    Vec row(old_cc + 1);
    row[head_col] = 1;
    row[moment_col(c) + 1] = -1;
    nl.append_row(row);
  }
  ++n_;
  lat_ = std::move(nl);
}

Subspace Subspace::refined(std::size_t threshold, std::size_t period) const {
  if (threshold < n_ || period % p_ != 0) fail("InternalError", "refinement must enlarge the window");
  Subspace s = *this;
  s.raise_period(period);
  while (s.n_ < threshold) s.raise_threshold_once();
  s.lat_ = row_basis(s.lat_);
  return s;
}

void Subspace::canonicalize() {
  if (tail_.size() != p_) fail("InternalError", "tail table length mismatch");
  if (lat_.rows() == 0) lat_ = empty_rows(coord_count());
  if (lat_.cols() != coord_count()) fail("InternalError", "lattice width mismatch");
  lat_ = row_basis(lat_);
  for (;;) {
    bool changed = false;
    // period descent: merge the q subclasses of each class mod p/q
    for (auto q : prime_divisors(p_)) {
      const std::size_t np = p_ / q;
      bool ok = true;
      for (std::size_t r0 = 0; r0 < np && ok; ++r0)
        for (std::size_t c = r0 + np; c < p_ && ok; c += np) {
          if (tail_[c] != tail_[r0]) ok = false;
          else if (tail_[c]) {
            Vec d(coord_count());
            d[moment_col(c)] = 1;
            d[moment_col(r0)] = -1;
            ok = in_row_space(lat_, d);
          }
        }
      if (!ok) continue;
      Subspace out = *this;
      out.p_ = np;
      out.tail_.assign(tail_.begin(), tail_.begin() + static_cast<long>(np));
      Matrix nl(0, out.coord_count());
      for (std::size_t i = 0; i < lat_.rows(); ++i) {
        Vec row(out.coord_count());
        for (std::size_t j = 0; j < k_ + n_; ++j) row[j] = lat_(i, j);
        for (std::size_t c = 0; c < p_; ++c)
          if (tail_[c]) row[out.moment_col(c % np)] += lat_(i, moment_col(c));
        nl.append_row(row);
      }
      out.lat_ = row_basis(nl);
      *this = std::move(out);
      changed = true;
      break;
    }
    if (changed) continue;
    // threshold rollback: index N-1 rejoins its class
    if (n_ > 0) {
      const std::size_t i = n_ - 1, c = i % p_, hc = k_ + i;
      if (tail_[c]) {
        const std::size_t mc = moment_col(c);
        Vec d(coord_count());
        d[hc] = 1;
        d[mc] = -1;
        if (in_row_space(lat_, d)) {
          Matrix nl(0, coord_count() - 1);
          for (std::size_t r = 0; r < lat_.rows(); ++r) {
            Vec row;
            for (std::size_t j = 0; j < lat_.cols(); ++j) {
              if (j == hc) continue;
              row.push_back(j == mc ? lat_(r, j) + lat_(r, hc) : lat_(r, j));
            }
            nl.append_row(row);
          }
          --n_;
          lat_ = row_basis(nl);
          changed = true;
        }
      } else {
        bool zero_col = true;
        for (std::size_t r = 0; r < lat_.rows() && zero_col; ++r) zero_col = lat_(r, hc) == 0;
        if (zero_col) {
          std::vector<std::size_t> keep;
          for (std::size_t j = 0; j < lat_.cols(); ++j)
            if (j != hc) keep.push_back(j);
          lat_ = lat_.rows() ? lat_.select_cols(keep) : empty_rows(lat_.cols() - 1);
          --n_;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
}

// ---------------------------------------------------------------- constructors

Subspace Subspace::from_window(Side side, std::size_t aug_count, std::size_t threshold, std::size_t period,
                               std::vector<bool> tail, Matrix lattice) {
  if (period == 0) fail("InvalidSubspace", "period must be positive");
  Subspace s;
  s.side_ = side;
  s.k_ = aug_count;
  s.n_ = threshold;
  s.p_ = period;
  s.tail_ = std::move(tail);
  s.lat_ = std::move(lattice);
  s.canonicalize();
  return s;
}

Subspace Subspace::zero(Side side, std::size_t aug_count) {
  return from_window(side, aug_count, 0, 1, {false}, empty_rows(aug_count));
}

Subspace Subspace::full(Side side, std::size_t aug_count) {
  return from_window(side, aug_count, 0, 1, {true}, Matrix::identity(aug_count + 1));
}

Subspace Subspace::aligned(Side side, std::size_t aug_count, const EpSet& a) {
  std::vector<bool> tail(a.period());
  for (auto r : a.residues()) tail[r] = true;
  Subspace shape;
  shape.k_ = aug_count;
  shape.n_ = a.threshold();
  shape.p_ = a.period();
  shape.tail_ = tail;
  Matrix l(0, shape.coord_count());
  for (auto i : a.pre_members()) l.append_row(unit_vec(shape.coord_count(), aug_count + i));
  for (auto r : a.residues()) l.append_row(unit_vec(shape.coord_count(), shape.moment_col(r)));
  return from_window(side, aug_count, a.threshold(), a.period(), tail, l);
}

Subspace Subspace::balanced(Side side, std::size_t aug_count, std::size_t threshold, std::size_t period,
                            const std::vector<std::size_t>& residues) {
  if (period == 0) fail("InvalidSubspace", "period must be positive");
  std::vector<bool> tail(period);
  for (auto r : residues) {
    if (r >= period) fail("InvalidSubspace", "balanced residue out of range");
    tail[r] = true;
  }
  Subspace shape;
  shape.k_ = aug_count;
  shape.n_ = threshold;
  shape.p_ = period;
  shape.tail_ = tail;
  return from_window(side, aug_count, threshold, period, tail, empty_rows(shape.coord_count()));
}

Subspace Subspace::span(Side side, std::size_t aug_count, const std::vector<Vector>& vs) {
  std::size_t n = 0;
  for (const auto& v : vs) {
    if (v.side != side) fail("SideMismatch", "span of vectors from the other side");
    if (v.aug.size() != aug_count) fail("ModelMismatch", "vector augmentation length does not match");
    n = std::max(n, v.support_end());
  }
  Matrix l(0, aug_count + n);
  for (const auto& v : vs) {
    Vec row(aug_count + n);
    for (std::size_t k = 0; k < aug_count; ++k) row[k] = v.aug[k];
    for (const auto& [i, c] : v.basis) row[aug_count + i] = c;
    l.append_row(row);
  }
  return from_window(side, aug_count, n, 1, {false}, l);
}

Subspace Subspace::from_parts(Side side, std::size_t aug_count, const EpSet& aligned_part, std::size_t bal_threshold,
                              std::size_t bal_period, const std::vector<std::size_t>& bal_residues,
                              const std::vector<Vector>& corrections) {
  Subspace s = aligned(side, aug_count, aligned_part);
  s = subspace_op(SubspaceOp::Sum, s, balanced(side, aug_count, bal_threshold, bal_period, bal_residues));
  return subspace_op(SubspaceOp::Sum, s, span(side, aug_count, corrections));
}

// ---------------------------------------------------------------- queries

EpSet Subspace::aligned_set() const {
  std::vector<std::size_t> pre, res;
  for (std::size_t i = 0; i < n_; ++i)
    if (unit_in_rref(lat_, k_ + i)) pre.push_back(i);
  for (std::size_t r = 0; r < p_; ++r)
    if (tail_[r] && unit_in_rref(lat_, moment_col(r))) res.push_back(r);
  return EpSet(n_, p_, pre, res);
}

std::vector<std::size_t> Subspace::balanced_residues() const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < p_; ++r)
    if (tail_[r] && !unit_in_rref(lat_, moment_col(r))) out.push_back(r);
  return out;
}

std::vector<Vector> Subspace::corrections() const {
  // pivot order: aug, then ascending basis index (moments sit at their representatives)
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < k_ + n_; ++j) order.push_back(j);
  std::vector<std::size_t> classes;
  for (std::size_t r = 0; r < p_; ++r)
    if (tail_[r]) classes.push_back(r);
  std::sort(classes.begin(), classes.end(), [&](std::size_t a, std::size_t b) { return rep(a) < rep(b); });
  for (auto r : classes) order.push_back(moment_col(r));
  std::vector<bool> aligned_col(coord_count(), false);
  for (std::size_t i = 0; i < n_; ++i) aligned_col[k_ + i] = unit_in_rref(lat_, k_ + i);
  for (auto r : classes) aligned_col[moment_col(r)] = unit_in_rref(lat_, moment_col(r));
  Matrix reordered(0, coord_count());
  for (std::size_t i = 0; i < lat_.rows(); ++i) {
    Vec row(coord_count());
    for (std::size_t j = 0; j < order.size(); ++j)
      if (!aligned_col[order[j]]) row[j] = lat_(i, order[j]);
    reordered.append_row(row);
  }
  Matrix basis = row_basis(reordered);
  std::vector<Vector> out;
  for (std::size_t i = 0; i < basis.rows(); ++i) {
    Vec coords(coord_count());
    for (std::size_t j = 0; j < order.size(); ++j) coords[order[j]] = basis(i, j);
    out.push_back(realize(coords));
  }
  return out;
}

std::vector<Vector> Subspace::lattice_vectors() const {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < lat_.rows(); ++i) out.push_back(realize(lat_.row(i)));
  return out;
}

std::vector<Vector> Subspace::spanning_sample(std::size_t bound) const {
  std::vector<Vector> out = lattice_vectors();
  for (std::size_t r = 0; r < p_; ++r) {
    if (!tail_[r]) continue;
    for (std::size_t i = rep(r) + p_; i < bound; i += p_) {
      Vector d = Vector::unit(side_, k_, i);
      d.set(rep(r), -1);
      out.push_back(std::move(d));
    }
  }
  return out;
}

bool Subspace::is_finite_dimensional() const { return std::none_of(tail_.begin(), tail_.end(), [](bool b) { return b; }); }

std::size_t Subspace::dimension() const {
  if (!is_finite_dimensional()) fail("InfiniteDimension", "dimension of an infinite-dimensional subspace");
  return lat_.rows();
}

std::optional<Vec> Subspace::coordinates(const Vector& x) const {
  if (x.side != side_) fail("SideMismatch", "membership test across sides");
  if (x.aug.size() != k_) fail("ModelMismatch", "vector augmentation length does not match");
  Vec c(coord_count());
  for (std::size_t k = 0; k < k_; ++k) c[k] = x.aug[k];
  for (const auto& [i, v] : x.basis) {
    if (i < n_) c[k_ + i] += v;
    else if (tail_[i % p_]) c[moment_col(i % p_)] += v;
    else return std::nullopt;
  }
  return c;
}

Vector Subspace::realize(const Vec& coords) const {
  Vector v = Vector::zero(side_, k_);
  for (std::size_t k = 0; k < k_; ++k) v.aug[k] = coords[k];
  for (std::size_t i = 0; i < n_; ++i) v.set(i, coords[k_ + i]);
  for (std::size_t r = 0; r < p_; ++r)
    if (tail_[r]) v.set(rep(r), v.at(rep(r)) + coords[moment_col(r)]);
  return v;
}

bool Subspace::member(const Vector& x) const {
  auto c = coordinates(x);
  return c && in_row_space(lat_, *c);
}

std::string Subspace::to_string() const {
  std::ostringstream os;
  os << "{side: " << side_name(side_) << ", aligned: " << aligned_set().to_string();
  auto bal = balanced_residues();
  if (!bal.empty()) {
    os << ", balanced: {threshold: " << n_ << ", period: " << p_ << ", residues: [";
    for (std::size_t i = 0; i < bal.size(); ++i) os << (i ? "," : "") << bal[i];
    os << "]}";
  }
  os << ", corrections: [";
  auto cs = corrections();
  for (std::size_t i = 0; i < cs.size(); ++i) os << (i ? ", " : "") << cs[i].to_string();
  os << "]}";
  return os.str();
}

// ---------------------------------------------------------------- lattice algebra

namespace {

/// Columns of `from` mapped into a layout with the given tail table (a superset).
Matrix embed(const Subspace& from, const std::vector<bool>& tail) {
  const std::size_t k = from.aug_count(), n = from.threshold();
  std::size_t cc = k + n;
  std::vector<std::size_t> mcol(tail.size(), kNone);
  for (std::size_t r = 0; r < tail.size(); ++r)
    if (tail[r]) mcol[r] = cc++;
  Matrix out(0, cc);
  const Matrix& l = from.lattice();
  for (std::size_t i = 0; i < l.rows(); ++i) {
    Vec row(cc);
    for (std::size_t j = 0; j < k + n; ++j) row[j] = l(i, j);
    for (std::size_t r = 0; r < tail.size(); ++r)
      if (from.tail()[r]) row[mcol[r]] = l(i, from.moment_col(r));
    out.append_row(row);
  }
  return out;
}

std::pair<Subspace, Subspace> align(const Subspace& a, const Subspace& b) {
  const std::size_t n = std::max(a.threshold(), b.threshold());
  const std::size_t p = lcm_size(a.period(), b.period());
  return {a.refined(n, p), b.refined(n, p)};
}

}  // namespace

Subspace subspace_op(SubspaceOp kind, const Subspace& a, const Subspace& b) {
  require_same(a, b, kind == SubspaceOp::Sum ? "sum" : "intersection");
  auto [ra, rb] = align(a, b);
  const std::size_t p = ra.period(), n = ra.threshold(), k = ra.aug_count();
  std::vector<bool> tail(p);
  for (std::size_t r = 0; r < p; ++r)
    tail[r] = kind == SubspaceOp::Sum ? (ra.tail()[r] || rb.tail()[r]) : (ra.tail()[r] && rb.tail()[r]);
  if (kind == SubspaceOp::Sum) {
    Matrix l = embed(ra, tail);
    Matrix r2 = embed(rb, tail);
    for (std::size_t i = 0; i < r2.rows(); ++i) l.append_row(r2.row(i));
    return Subspace::from_window(a.side(), k, n, p, tail, l);
  }
  // Intersection: common coordinates [aug | head | moments of shared tail classes];
  // membership in each operand is annihilator · embedding = 0.
  std::size_t cc = k + n;
  std::vector<std::size_t> common_col(p, kNone);
  for (std::size_t r = 0; r < p; ++r)
    if (tail[r]) common_col[r] = cc++;
  Matrix constraints(0, cc);
  for (const Subspace* s : {&ra, &rb}) {
    Matrix ann = kernel(s->lattice());
    for (std::size_t i = 0; i < ann.rows(); ++i) {
      Vec row(cc);
      for (std::size_t j = 0; j < k + n; ++j) row[j] = ann(i, j);
      for (std::size_t r = 0; r < p; ++r)
        if (tail[r]) row[common_col[r]] = ann(i, s->moment_col(r));
      constraints.append_row(row);
    }
  }
  return Subspace::from_window(a.side(), k, n, p, tail, kernel(constraints));
}

bool contains(const Subspace& a, const Subspace& b) {
  require_same(a, b, "containment");
  auto [ra, rb] = align(a, b);
  for (std::size_t r = 0; r < ra.period(); ++r)
    if (rb.tail()[r] && !ra.tail()[r]) return false;
  return row_space_contains(ra.lattice(), embed(rb, ra.tail()));
}

std::optional<std::size_t> quotient_dimension(const Subspace& big, const Subspace& small) {
  if (!contains(big, small)) fail("NotNested", "quotient of non-nested subspaces");
  auto [rb, rs] = align(big, small);
  if (rb.tail() != rs.tail()) return std::nullopt;
  return rb.lattice().rows() - rs.lattice().rows();
}

// ---------------------------------------------------------------- perp

// Unknown on the opposite side: u = [μ (opposite augs) | g_j, j < N | M_s per class without tail].
// Finitely supported g must vanish on tail classes of a (they hold all zero-sum vectors), and
// pairing against the lattice rows is linear in u.
Subspace perp(const Model& m, const Subspace& a) {
  const Side s = a.side(), o = opposite(s);
  const std::size_t K = m.aug_count(s), Ko = m.aug_count(o);
  if (a.aug_count() != K) fail("ModelMismatch", "subspace does not belong to this model");
  const auto& own = m.aug_rows(s);  // own augs against opposite basis
  const auto& opp = m.aug_rows(o);  // opposite augs against own basis
  const Window w = join(m.window(), {a.threshold(), a.period()});
  const Subspace r = a.refined(w.threshold, w.period);
  const std::size_t N = r.threshold(), p = r.period();
  std::vector<bool> tail_star(p);
  std::vector<std::size_t> mcol_star(p, kNone);
  std::size_t cols = Ko + N;
  for (std::size_t c = 0; c < p; ++c)
    if (!r.tail()[c]) {
      tail_star[c] = true;
      mcol_star[c] = cols++;
    }
  Matrix phi(r.coord_count(), cols);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t l = 0; l < Ko; ++l) phi(k, l) = m.cross_at(s, k, l);
    for (std::size_t j = 0; j < N; ++j) phi(k, Ko + j) = own[k].value(j);
    for (std::size_t c = 0; c < p; ++c)
      if (tail_star[c]) phi(k, mcol_star[c]) = own[k].value(r.rep(c));
  }
  for (std::size_t i = 0; i < N; ++i) {
    phi(K + i, Ko + i) = 1;
    for (std::size_t l = 0; l < Ko; ++l) phi(K + i, l) = opp[l].value(i);
  }
  for (std::size_t c = 0; c < p; ++c)
    if (r.tail()[c])
      for (std::size_t l = 0; l < Ko; ++l) phi(r.moment_col(c), l) = opp[l].value(r.rep(c));
  Matrix system = r.lattice().rows() ? r.lattice() * phi : Matrix(0, cols);
  return Subspace::from_window(o, Ko, N, p, tail_star, kernel(system));
}

Subspace closure(const Model& m, const Subspace& a) { return perp(m, perp(m, a)); }

bool is_closed(const Model& m, const Subspace& a) { return closure(m, a) == a; }

bool orthogonal(const Model& m, const Subspace& a, const Subspace& b) {
  if (a.side() == b.side()) fail("SideMismatch", "orthogonality needs subspaces on opposite sides");
  return contains(perp(m, a), b);
}

ModelReport model_report(const Model& m) {
  m.check_shape();
  ModelReport rep;
  rep.v_radical = perp(m, Subspace::full(Side::W, m.aug_count(Side::W)));
  rep.w_radical = perp(m, Subspace::full(Side::V, m.aug_count(Side::V)));
  for (const Subspace* rad : {&rep.v_radical, &rep.w_radical}) {
    if (*rad == Subspace::zero(rad->side(), rad->aug_count())) continue;
    rep.valid = false;
    if (rep.witness) continue;
    auto vs = rad->lattice_vectors();
    if (!vs.empty()) {
      rep.witness = vs.front();
    } else {
      // only zero-sum tails: e_rep − e_{rep+p}
      for (std::size_t c = 0; c < rad->period(); ++c)
        if (rad->tail()[c]) {
          Vector v = Vector::unit(rad->side(), rad->aug_count(), rad->rep(c));
          v.set(rad->rep(c) + rad->period(), -1);
          rep.witness = v;
          break;
        }
    }
  }
  return rep;
}

void validate_model(const Model& m) {
  auto rep = model_report(m);
  if (!rep.valid) fail("DegeneratePairing", rep.witness->to_string());
}

// ---------------------------------------------------------------- forms

namespace {

const Involution& require_form(const Model& m) {
  if (m.form_kind == FormKind::None || !m.iota) fail("NoForm", "model carries no symmetric or antisymmetric form");
  return *m.iota;
}

// Re-index a subspace along ι with signs sign(i) on the source index.
template <class SignOf>
Subspace map_along(const Involution& t, const Subspace& a, Side target, SignOf sign_of) {
  std::size_t n = std::max(a.threshold(), t.threshold);
  if ((n - t.threshold) % t.period) n += t.period - (n - t.threshold) % t.period;
  const std::size_t p = lcm_size(a.period(), t.period);
  const Subspace r = a.refined(n, p);
  std::vector<bool> tail(p);
  std::vector<std::size_t> image_class(p, kNone);
  for (std::size_t c = 0; c < p; ++c) {
    image_class[c] = t(r.rep(c)) % p;
    if (r.tail()[c]) tail[image_class[c]] = true;
  }
  std::size_t cc = n;
  std::vector<std::size_t> mcol(p, kNone);
  for (std::size_t c = 0; c < p; ++c)
    if (tail[c]) mcol[c] = cc++;
  Matrix l(r.lattice().rows(), cc);
  for (std::size_t i = 0; i < r.lattice().rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) l(i, t(j)) = sign_of(j) * r.lattice()(i, j);
    for (std::size_t c = 0; c < p; ++c)
      if (r.tail()[c]) l(i, mcol[image_class[c]]) = sign_of(r.rep(c)) * r.lattice()(i, r.moment_col(c));
  }
  return Subspace::from_window(target, 0, n, p, tail, l);
}

}  // namespace

Vector theta(const Model& m, const Vector& v) {
  const Involution& t = require_form(m);
  if (v.side != Side::V) fail("SideMismatch", "Θ maps V to V*");
  Vector g = Vector::zero(Side::W, 0);
  for (const auto& [i, c] : v.basis) g.set(t(i), c * t.sign(i));
  return g;
}

Vector theta_inverse(const Model& m, const Vector& g) {
  const Involution& t = require_form(m);
  if (g.side != Side::W) fail("SideMismatch", "Θ⁻¹ maps V* to V");
  Vector v = Vector::zero(Side::V, 0);
  for (const auto& [k, c] : g.basis) v.set(t(k), c * t.sign(t(k)));
  return v;
}

Subspace theta(const Model& m, const Subspace& a) {
  const Involution& t = require_form(m);
  if (a.side() != Side::V) fail("SideMismatch", "Θ maps V to V*");
  return map_along(t, a, Side::W, [&](std::size_t i) { return Rational(t.sign(i)); });
}

Subspace theta_inverse(const Model& m, const Subspace& a) {
  const Involution& t = require_form(m);
  if (a.side() != Side::W) fail("SideMismatch", "Θ⁻¹ maps V* to V");
  return map_along(t, a, Side::V, [&](std::size_t k) { return Rational(t.sign(t(k))); });
}

Subspace form_perp(const Model& m, const Subspace& a) {
  if (a.side() != Side::V) fail("SideMismatch", "form orthogonal complement is taken in V");
  return perp(m, theta(m, a));
}

Rational form_value(const Model& m, const Vector& u, const Vector& v) { return pair(m, v, theta(m, u)); }

// ---------------------------------------------------------------- truncation

TruncatedModel truncate(const Model& m, std::size_t n) {
  if (n == 0) fail("InvalidLevel", "truncation level must be at least 1");
  const std::size_t K = m.v_augs.size(), Ks = m.w_augs.size();
  TruncatedModel t;
  t.level = n;
  t.pairing = Matrix(n + K, n + Ks);
  for (std::size_t i = 0; i < n; ++i) {
    t.pairing(i, i) = 1;
    for (std::size_t l = 0; l < Ks; ++l) t.pairing(i, n + l) = m.w_augs[l].value(i);
  }
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 0; j < n; ++j) t.pairing(n + k, j) = m.v_augs[k].value(j);
    for (std::size_t l = 0; l < Ks; ++l) t.pairing(n + k, n + l) = m.cross(k, l);
  }
  t.v_radical = kernel(t.pairing.transpose());
  t.w_radical = kernel(t.pairing);
  return t;
}

Vec truncate(const Vector& x, std::size_t n) {
  Vec out(n + x.aug.size());
  for (const auto& [i, c] : x.basis)
    if (i < n) out[i] = c;
  for (std::size_t k = 0; k < x.aug.size(); ++k) out[n + k] = x.aug[k];
  return out;
}

Matrix truncate(const Subspace& a, std::size_t n) {
  const std::size_t K = a.aug_count();
  const Subspace vn = Subspace::from_window(a.side(), K, n, 1, {false}, Matrix::identity(K + n));
  const Subspace s = subspace_op(SubspaceOp::Intersection, a, vn);
  const Subspace r = s.refined(std::max(n, s.threshold()), s.period());
  Matrix out(0, n + K);
  for (std::size_t i = 0; i < r.lattice().rows(); ++i) {
    Vec row(n + K);
    for (std::size_t j = 0; j < n; ++j) row[j] = r.lattice()(i, K + j);
    for (std::size_t k = 0; k < K; ++k) row[n + k] = r.lattice()(i, k);
    out.append_row(row);
  }
  return row_basis(out);
}

Vector untruncate(Side side, const Vec& coords, std::size_t n, std::size_t aug_count) {
  Vector v = Vector::zero(side, aug_count);
  for (std::size_t i = 0; i < n; ++i) v.set(i, coords[i]);
  for (std::size_t k = 0; k < aug_count; ++k) v.aug[k] = coords[n + k];
  return v;
}

Matrix truncated_perp(const TruncatedModel& t, Side s, const Matrix& rows) {
  const Matrix& P = t.pairing;
  if (s == Side::V) return rows.rows() ? kernel(rows * P) : Matrix::identity(P.cols());
  return rows.rows() ? kernel(rows * P.transpose()) : Matrix::identity(P.rows());
}

bool equal_mod_radical(const TruncatedModel& t, Side s, const Matrix& x, const Matrix& y) {
  const Matrix& rad = s == Side::V ? t.v_radical : t.w_radical;
  const std::size_t cols = s == Side::V ? t.pairing.rows() : t.pairing.cols();
  auto widen = [&](const Matrix& m) { return m.rows() ? m : Matrix(0, cols); };
  Matrix a = widen(x), b = widen(y);
  for (std::size_t i = 0; i < rad.rows(); ++i) {
    a.append_row(rad.row(i));
    b.append_row(rad.row(i));
  }
  return same_row_space(a, b);
}

}  // namespace flagforge
