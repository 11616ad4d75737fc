#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "flagforge/exactnum.hpp"

namespace flagforge {

/// Eventually periodic subset of ℕ: n < threshold uses the explicit prefix,
/// n ≥ threshold is a member iff residues[n mod period].
/// Always stored canonically (minimal period, then minimal threshold).
class EpSet {
public:
  EpSet();  // empty set
  EpSet(std::size_t threshold, std::size_t period, std::vector<std::size_t> pre_members,
        std::vector<std::size_t> residues);

  static EpSet empty() { return EpSet(); }
  static EpSet all();
  static EpSet finite(const std::vector<std::size_t>& members);
  /// {n ≥ from : n ≡ r (mod m)}
  static EpSet residue_class(std::size_t r, std::size_t m, std::size_t from = 0);
  /// From explicit membership bits of length threshold and period.
  static EpSet from_bits(std::size_t threshold, std::size_t period, std::vector<bool> pre, std::vector<bool> res);

  std::size_t threshold() const noexcept { return n_; }
  std::size_t period() const noexcept { return p_; }
  std::vector<std::size_t> pre_members() const;
  std::vector<std::size_t> residues() const;

  bool contains(std::size_t n) const noexcept { return n < n_ ? pre_[n] : res_[n % p_]; }
  bool is_empty() const;
  bool is_finite() const;
  bool is_all() const;
  /// Number of members strictly below n.
  std::size_t count_below(std::size_t n) const;
  /// Members below n in ascending order.
  std::vector<std::size_t> members_below(std::size_t n) const;
  /// Largest member (finite sets only).
  std::size_t max_member() const;

  friend bool operator==(const EpSet& a, const EpSet& b) {
    return a.n_ == b.n_ && a.p_ == b.p_ && a.pre_ == b.pre_ && a.res_ == b.res_;
  }
  friend bool operator!=(const EpSet& a, const EpSet& b) { return !(a == b); }

  std::string to_string() const;

private:
  void canonicalize();
  std::size_t n_ = 0;
  std::size_t p_ = 1;
  std::vector<bool> pre_;
  std::vector<bool> res_;
};

enum class SetOp { Union, Intersection, Complement, Difference };

EpSet set_op(SetOp kind, const EpSet& a, const EpSet& b = EpSet());
bool subset_of(const EpSet& a, const EpSet& b);

/// Eventually periodic rational sequence: preperiod then repeat forever.
class EpSeq {
public:
  EpSeq();  // constant zero
  EpSeq(Vec preperiod, Vec repeat);
  static EpSeq constant(const Rational& c) { return EpSeq({}, {c}); }
  static EpSeq indicator(const EpSet& s);

  const Vec& preperiod() const noexcept { return pre_; }
  const Vec& repeat() const noexcept { return rep_; }
  std::size_t threshold() const noexcept { return pre_.size(); }
  std::size_t period() const noexcept { return rep_.size(); }
  Rational value(std::size_t n) const;
  bool is_zero() const;

  friend bool operator==(const EpSeq& a, const EpSeq& b) { return a.pre_ == b.pre_ && a.rep_ == b.rep_; }
  friend bool operator!=(const EpSeq& a, const EpSeq& b) { return !(a == b); }

  std::string to_string() const;

private:
  void canonicalize();
  Vec pre_;
  Vec rep_;
};

EpSeq seq_add(const EpSeq& a, const EpSeq& b);
EpSeq seq_scale(const Rational& c, const EpSeq& a);
EpSeq seq_mask(const EpSeq& a, const EpSet& domain);

/// (N*, p*): max threshold and lcm of periods; (0, 1) for no inputs.
struct Window {
  std::size_t threshold = 0;
  std::size_t period = 1;
  friend bool operator==(const Window& a, const Window& b) {
    return a.threshold == b.threshold && a.period == b.period;
  }
};

Window stabilization_window(const std::vector<EpSet>& sets, const std::vector<EpSeq>& seqs = {});
Window join(const Window& a, const Window& b);
std::size_t lcm_size(std::size_t a, std::size_t b);
/// Distinct primes dividing p, ascending.
std::vector<std::size_t> prime_divisors(std::size_t p);

/// Unknown vector d (one entry per condition). The combination
/// s(i) = Σ_k d_k ρ_k(i)·[i ∈ D_k] must vanish for all large i.
struct EpLinearSolution {
  Window window;
  /// Rows: linear constraints on d, in rref.
  Matrix constraints;
  /// correction(i, k): coefficient of d_k in c_i for i < window.threshold, so that
  /// c + s vanishes identically on ℕ. Every finitely supported c arises this way.
  Matrix correction;
  Vec correction_for(const Vec& d) const { return correction.apply(d); }
};

EpLinearSolution ep_linear_solve(const std::vector<std::pair<EpSeq, EpSet>>& conditions);

}  // namespace flagforge
