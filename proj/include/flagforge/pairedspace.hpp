#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flagforge/epcore.hpp"
#include "flagforge/exactnum.hpp"

namespace flagforge {

/// V carries basis e_i and augmentations a_k; V* (written W here) carries f_j and b_l.
enum class Side { V, W };
inline Side opposite(Side s) { return s == Side::V ? Side::W : Side::V; }
std::string side_name(Side s);

enum class FormKind { None, Symmetric, Antisymmetric };
std::string form_kind_name(FormKind k);

/// Involution of ℕ that fixes [0, threshold) setwise and maps every block
/// [threshold + k·period, threshold + (k+1)·period) onto itself by the same
/// pattern. sign(i) is constant on tail residues mod period.
struct Involution {
  std::size_t threshold = 0;
  std::size_t period = 1;
  std::vector<std::size_t> head;  // permutation of [0, threshold)
  std::vector<std::size_t> block; // permutation of [0, period)
  std::vector<int> head_signs;    // ±1, size threshold
  std::vector<int> block_signs;   // ±1, size period

  std::size_t operator()(std::size_t i) const;
  int sign(std::size_t i) const;
};

/// Default involution for a form kind: pairs (2k, 2k+1); symmetric signs +1,
/// antisymmetric sign +1 on the smaller index of each pair.
Involution default_involution(FormKind kind);

struct Model {
  std::vector<EpSeq> v_augs;  // ρ_k(j) = ⟨a_k, f_j⟩
  std::vector<EpSeq> w_augs;  // σ_l(i) = ⟨e_i, b_l⟩
  Matrix cross;               // ⟨a_k, b_l⟩, size |v_augs| × |w_augs|
  FormKind form_kind = FormKind::None;
  std::optional<Involution> iota;

  std::size_t aug_count(Side s) const { return s == Side::V ? v_augs.size() : w_augs.size(); }
  /// Pairing rows of the augmentations living on side s, against the opposite basis.
  const std::vector<EpSeq>& aug_rows(Side s) const { return s == Side::V ? v_augs : w_augs; }
  /// ⟨aug_k(s), aug_l(opposite s)⟩ oriented with s first.
  Rational cross_at(Side s, std::size_t k, std::size_t l) const {
    return s == Side::V ? cross(k, l) : cross(l, k);
  }
  /// Throws InvalidModel on shape or involution inconsistencies (not on degeneracy).
  void check_shape() const;
  /// Window beyond which every augmentation row and the involution are periodic.
  Window window() const;
};

Model plain_model();
/// One V-side augmentation ṽ with ⟨ṽ, f_j⟩ = 1 for all j.
Model row_of_ones_model();
Model form_model(FormKind kind, std::optional<Involution> iota = std::nullopt);

struct Vector {
  Side side = Side::V;
  std::map<std::size_t, Rational> basis;  // nonzero entries only
  Vec aug;

  static Vector unit(Side side, std::size_t aug_count, std::size_t i);
  static Vector aug_unit(Side side, std::size_t aug_count, std::size_t k);
  static Vector zero(Side side, std::size_t aug_count);

  bool is_zero() const;
  /// One past the largest basis index (0 if none).
  std::size_t support_end() const;
  Rational at(std::size_t i) const;
  void set(std::size_t i, const Rational& c);
  friend bool operator==(const Vector& a, const Vector& b) {
    return a.side == b.side && a.basis == b.basis && a.aug == b.aug;
  }
  std::string to_string() const;
};

Vector add(const Vector& a, const Vector& b);
Vector scale(const Rational& c, const Vector& a);

Rational pair(const Model& m, const Vector& v, const Vector& g);

/// Coordinates of a window representation: [aug k | head 0..N-1 | one moment per tail class].
///
/// x lies in the subspace iff x_i = 0 for every i ≥ N whose class i mod p carries
/// no tail, and the coordinate tuple (aug, head, m_r = Σ_{i≥N, i≡r} x_i) lies in the
/// row space of `lattice()`. Canonical: minimal period, then minimal threshold,
/// lattice in rref.
class Subspace {
public:
  Subspace() = default;

  static Subspace zero(Side side, std::size_t aug_count);
  static Subspace full(Side side, std::size_t aug_count);
  static Subspace aligned(Side side, std::size_t aug_count, const EpSet& s);
  /// All vectors supported on the tail classes `residues` (≥ threshold) with zero sum per class.
  static Subspace balanced(Side side, std::size_t aug_count, std::size_t threshold, std::size_t period,
                           const std::vector<std::size_t>& residues);
  static Subspace span(Side side, std::size_t aug_count, const std::vector<Vector>& vs);
  static Subspace from_parts(Side side, std::size_t aug_count, const EpSet& aligned, std::size_t bal_threshold,
                             std::size_t bal_period, const std::vector<std::size_t>& bal_residues,
                             const std::vector<Vector>& corrections);
  /// Raw constructor; canonicalizes.
  static Subspace from_window(Side side, std::size_t aug_count, std::size_t threshold, std::size_t period,
                              std::vector<bool> tail, Matrix lattice);

  Side side() const noexcept { return side_; }
  std::size_t aug_count() const noexcept { return k_; }
  std::size_t threshold() const noexcept { return n_; }
  std::size_t period() const noexcept { return p_; }
  const std::vector<bool>& tail() const noexcept { return tail_; }
  const Matrix& lattice() const noexcept { return lat_; }
  std::size_t coord_count() const;
  std::size_t moment_col(std::size_t r) const;  // npos-like when class has no tail
  /// Smallest index ≥ threshold in class r.
  std::size_t rep(std::size_t r) const;

  /// {i : e_i ∈ this}
  EpSet aligned_set() const;
  /// Tail classes that contain only zero-sum combinations of basis vectors.
  std::vector<std::size_t> balanced_residues() const;
  /// Lattice rows modulo aligned coordinates, realized as vectors.
  std::vector<Vector> corrections() const;
  /// Realize every lattice row (moments at the class representative).
  std::vector<Vector> lattice_vectors() const;
  /// Lattice vectors plus e_i - e_rep for tail indices i < bound. Spans the vectors of
  /// this subspace with basis support below bound (for bound past the window).
  std::vector<Vector> spanning_sample(std::size_t bound) const;

  bool is_finite_dimensional() const;
  /// Dimension when finite.
  std::size_t dimension() const;

  std::optional<Vec> coordinates(const Vector& x) const;
  Vector realize(const Vec& coords) const;
  bool member(const Vector& x) const;

  /// Same subspace on a larger window (threshold ≥ current, period a multiple). Not canonical.
  Subspace refined(std::size_t threshold, std::size_t period) const;

  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.side_ == b.side_ && a.k_ == b.k_ && a.n_ == b.n_ && a.p_ == b.p_ && a.tail_ == b.tail_ &&
           a.lat_ == b.lat_;
  }
  friend bool operator!=(const Subspace& a, const Subspace& b) { return !(a == b); }

  std::string to_string() const;

private:
  void canonicalize();
  void raise_period(std::size_t p);
  void raise_threshold_once();
  Side side_ = Side::V;
  std::size_t k_ = 0;
  std::size_t n_ = 0;
  std::size_t p_ = 1;
  std::vector<bool> tail_{false};
  Matrix lat_{0, 0};
};

enum class SubspaceOp { Sum, Intersection };
Subspace subspace_op(SubspaceOp kind, const Subspace& a, const Subspace& b);
/// a ⊇ b
bool contains(const Subspace& a, const Subspace& b);
/// dim big/small for small ⊆ big; nullopt when infinite.
std::optional<std::size_t> quotient_dimension(const Subspace& big, const Subspace& small);

Subspace perp(const Model& m, const Subspace& a);
Subspace closure(const Model& m, const Subspace& a);
bool is_closed(const Model& m, const Subspace& a);
/// ⟨a, b⟩ = 0 for subspaces on opposite sides.
bool orthogonal(const Model& m, const Subspace& a, const Subspace& b);

struct ModelReport {
  bool valid = true;
  Subspace v_radical;  // vectors of V pairing to zero with all of V*
  Subspace w_radical;
  std::optional<Vector> witness;
};
ModelReport model_report(const Model& m);
/// Throws DegeneratePairing with a witness when the pairing is degenerate.
void validate_model(const Model& m);

/// Form identification Θ: V → V*, ⟨u, Θv⟩ = B(v, u) with B(e_i, e_j) = ε(i)·δ_{j,ι(i)}.
Vector theta(const Model& m, const Vector& v);
Vector theta_inverse(const Model& m, const Vector& g);
Subspace theta(const Model& m, const Subspace& a);
Subspace theta_inverse(const Model& m, const Subspace& a);
/// {u ∈ V : B(v, u) = 0 for all v ∈ a}
Subspace form_perp(const Model& m, const Subspace& a);
Rational form_value(const Model& m, const Vector& u, const Vector& v);

/// Finite sections. Truncated coordinates are ordered [basis 0..n-1 | aug].
struct TruncatedModel {
  std::size_t level = 0;
  Matrix pairing;      // (n + K) × (n + K*)
  Matrix v_radical;    // rows: left kernel
  Matrix w_radical;    // rows: right kernel
  bool degenerate() const { return v_radical.rows() > 0 || w_radical.rows() > 0; }
};
TruncatedModel truncate(const Model& m, std::size_t n);
Vec truncate(const Vector& x, std::size_t n);
/// Rows: basis of a ∩ (span{basis < n} ⊕ augs).
Matrix truncate(const Subspace& a, std::size_t n);
/// Inverse of the truncated coordinates.
Vector untruncate(Side side, const Vec& coords, std::size_t n, std::size_t aug_count);
/// Finite perp of the row space `rows` (side s) inside the opposite truncated space.
Matrix truncated_perp(const TruncatedModel& t, Side s, const Matrix& rows);
/// X + rad == Y + rad where rad is the radical on side s.
bool equal_mod_radical(const TruncatedModel& t, Side s, const Matrix& x, const Matrix& y);

}  // namespace flagforge
