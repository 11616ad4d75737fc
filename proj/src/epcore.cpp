#include "flagforge/epcore.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace flagforge {

std::vector<std::size_t> prime_divisors(std::size_t p) {
  std::vector<std::size_t> out;
  for (std::size_t q = 2; q * q <= p; ++q)
    if (p % q == 0) {
      out.push_back(q);
      while (p % q == 0) p /= q;
    }
  if (p > 1) out.push_back(p);
  return out;
}

std::size_t lcm_size(std::size_t a, std::size_t b) { return std::lcm(a, b); }

// ---------------------------------------------------------------- EpSet

EpSet::EpSet() : n_(0), p_(1), pre_(), res_(1, false) {}

EpSet::EpSet(std::size_t threshold, std::size_t period, std::vector<std::size_t> pre_members,
             std::vector<std::size_t> residues)
    : n_(threshold), p_(period), pre_(threshold, false), res_(period, false) {
  if (period == 0) fail("InvalidEpSet", "period must be positive");
  for (auto m : pre_members) {
    if (m >= threshold) fail("InvalidEpSet", "preperiodic member " + std::to_string(m) + " not below threshold");
    pre_[m] = true;
  }
  for (auto r : residues) {
    if (r >= period) fail("InvalidEpSet", "residue " + std::to_string(r) + " not below period");
    res_[r] = true;
  }
  canonicalize();
}

EpSet EpSet::from_bits(std::size_t threshold, std::size_t period, std::vector<bool> pre, std::vector<bool> res) {
  EpSet s;
  s.n_ = threshold;
  s.p_ = period;
  s.pre_ = std::move(pre);
  s.res_ = std::move(res);
  s.canonicalize();
  return s;
}

EpSet EpSet::all() { return EpSet(0, 1, {}, {0}); }

EpSet EpSet::finite(const std::vector<std::size_t>& members) {
  std::size_t n = 0;
  for (auto m : members) n = std::max(n, m + 1);
  return EpSet(n, 1, members, {});
}

EpSet EpSet::residue_class(std::size_t r, std::size_t m, std::size_t from) {
  return EpSet(from, m, {}, {r % m});
}

void EpSet::canonicalize() {
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto q : prime_divisors(p_)) {
      const std::size_t np = p_ / q;
      bool ok = true;
      for (std::size_t r = 0; r < p_ && ok; ++r) ok = res_[r] == res_[r % np];
      if (ok) {
        res_.resize(np);
        p_ = np;
        changed = true;
        break;
      }
    }
  }
  while (n_ > 0 && pre_[n_ - 1] == res_[(n_ - 1) % p_]) {
    pre_.pop_back();
    --n_;
  }
}

std::vector<std::size_t> EpSet::pre_members() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n_; ++i)
    if (pre_[i]) out.push_back(i);
  return out;
}

std::vector<std::size_t> EpSet::residues() const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < p_; ++r)
    if (res_[r]) out.push_back(r);
  return out;
}

bool EpSet::is_empty() const { return pre_members().empty() && residues().empty(); }
bool EpSet::is_finite() const { return residues().empty(); }
bool EpSet::is_all() const { return n_ == 0 && p_ == 1 && res_[0]; }

std::size_t EpSet::count_below(std::size_t n) const {
  std::size_t c = 0;
  const std::size_t head = std::min(n, n_);
  for (std::size_t i = 0; i < head; ++i) c += pre_[i];
  if (n <= n_) return c;
  const std::size_t span = n - n_;
  const std::size_t per_period = residues().size();
  c += (span / p_) * per_period;
  for (std::size_t i = n_ + (span / p_) * p_; i < n; ++i) c += res_[i % p_];
  return c;
}

std::vector<std::size_t> EpSet::members_below(std::size_t n) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

std::size_t EpSet::max_member() const {
  if (!is_finite() || is_empty()) fail("InvalidEpSet", "max_member of infinite or empty set");
  auto m = pre_members();
  return m.back();
}

std::string EpSet::to_string() const {
  std::ostringstream os;
  os << "{pre: [";
  auto pm = pre_members();
  for (std::size_t i = 0; i < pm.size(); ++i) os << (i ? "," : "") << pm[i];
  os << "], period: " << p_ << ", residues: [";
  auto rs = residues();
  for (std::size_t i = 0; i < rs.size(); ++i) os << (i ? "," : "") << rs[i];
  os << "], threshold: " << n_ << "}";
  return os.str();
}

EpSet set_op(SetOp kind, const EpSet& a, const EpSet& b) {
  const std::size_t n = kind == SetOp::Complement ? a.threshold() : std::max(a.threshold(), b.threshold());
  const std::size_t p = kind == SetOp::Complement ? a.period() : lcm_size(a.period(), b.period());
  auto f = [&](std::size_t i) {
    switch (kind) {
      case SetOp::Union: return a.contains(i) || b.contains(i);
      case SetOp::Intersection: return a.contains(i) && b.contains(i);
      case SetOp::Complement: return !a.contains(i);
      case SetOp::Difference: return a.contains(i) && !b.contains(i);
    }
    return false;
  };
  std::vector<bool> pre(n), res(p);
  for (std::size_t i = 0; i < n; ++i) pre[i] = f(i);
  // residue r is read off at the first index ≥ n congruent to r
  for (std::size_t i = n; i < n + p; ++i) res[i % p] = f(i);
  return EpSet::from_bits(n, p, std::move(pre), std::move(res));
}

bool subset_of(const EpSet& a, const EpSet& b) { return set_op(SetOp::Difference, a, b).is_empty(); }

// ---------------------------------------------------------------- EpSeq

EpSeq::EpSeq() : pre_(), rep_{Rational(0)} {}

EpSeq::EpSeq(Vec preperiod, Vec repeat) : pre_(std::move(preperiod)), rep_(std::move(repeat)) {
  if (rep_.empty()) fail("InvalidEpSeq", "repeat must be nonempty");
  canonicalize();
}

EpSeq EpSeq::indicator(const EpSet& s) {
  Vec pre(s.threshold()), rep(s.period());
  for (std::size_t i = 0; i < s.threshold(); ++i) pre[i] = s.contains(i) ? 1 : 0;
  // repeat is indexed from the threshold, residues are absolute
  for (std::size_t k = 0; k < s.period(); ++k) rep[k] = s.contains(s.threshold() + k) ? 1 : 0;
  return EpSeq(pre, rep);
}

void EpSeq::canonicalize() {
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto q : prime_divisors(rep_.size())) {
      const std::size_t np = rep_.size() / q;
      bool ok = true;
      for (std::size_t r = 0; r < rep_.size() && ok; ++r) ok = rep_[r] == rep_[r % np];
      if (ok) {
        rep_.resize(np);
        changed = true;
        break;
      }
    }
  }
  while (!pre_.empty() && pre_.back() == rep_.back()) {
    std::rotate(rep_.rbegin(), rep_.rbegin() + 1, rep_.rend());
    pre_.pop_back();
  }
}

Rational EpSeq::value(std::size_t n) const {
  if (n < pre_.size()) return pre_[n];
  return rep_[(n - pre_.size()) % rep_.size()];
}

bool EpSeq::is_zero() const { return pre_.empty() && rep_.size() == 1 && rep_[0] == 0; }

std::string EpSeq::to_string() const {
  std::ostringstream os;
  os << "{pre: [";
  for (std::size_t i = 0; i < pre_.size(); ++i) os << (i ? "," : "") << flagforge::to_string(pre_[i]);
  os << "], repeat: [";
  for (std::size_t i = 0; i < rep_.size(); ++i) os << (i ? "," : "") << flagforge::to_string(rep_[i]);
  os << "]}";
  return os.str();
}

namespace {

template <class F>
EpSeq tabulate(std::size_t n, std::size_t p, F f) {
  Vec pre(n), rep(p);
  for (std::size_t i = 0; i < n; ++i) pre[i] = f(i);
  for (std::size_t k = 0; k < p; ++k) rep[k] = f(n + k);
  return EpSeq(pre, rep);
}

}  // namespace

EpSeq seq_add(const EpSeq& a, const EpSeq& b) {
  return tabulate(std::max(a.threshold(), b.threshold()), lcm_size(a.period(), b.period()),
                  [&](std::size_t i) { return Rational(a.value(i) + b.value(i)); });
}

EpSeq seq_scale(const Rational& c, const EpSeq& a) {
  return tabulate(a.threshold(), a.period(), [&](std::size_t i) { return Rational(c * a.value(i)); });
}

EpSeq seq_mask(const EpSeq& a, const EpSet& d) {
  return tabulate(std::max(a.threshold(), d.threshold()), lcm_size(a.period(), d.period()),
                  [&](std::size_t i) { return d.contains(i) ? a.value(i) : Rational(0); });
}

// ---------------------------------------------------------------- windows

Window join(const Window& a, const Window& b) {
  return {std::max(a.threshold, b.threshold), lcm_size(a.period, b.period)};
}

Window stabilization_window(const std::vector<EpSet>& sets, const std::vector<EpSeq>& seqs) {
  Window w;
  for (const auto& s : sets) w = join(w, {s.threshold(), s.period()});
  // EpSeq periodicity is relative to its threshold; absolute residues mod the
  // lcm still determine values beyond the max threshold.
  for (const auto& s : seqs) w = join(w, {s.threshold(), s.period()});
  return w;
}

EpLinearSolution ep_linear_solve(const std::vector<std::pair<EpSeq, EpSet>>& conditions) {
  std::vector<EpSeq> rows;
  for (const auto& [seq, dom] : conditions) rows.push_back(seq_mask(seq, dom));
  const Window w = stabilization_window({}, rows);
  const std::size_t K = rows.size();
  Matrix sys(0, K);
  for (std::size_t i = w.threshold; i < w.threshold + w.period; ++i) {
    Vec r(K);
    for (std::size_t k = 0; k < K; ++k) r[k] = rows[k].value(i);
    sys.append_row(r);
  }
  EpLinearSolution sol;
  sol.window = w;
  sol.constraints = K == 0 ? Matrix(0, 0) : row_basis(sys);
  sol.correction = Matrix(w.threshold, K);
  for (std::size_t i = 0; i < w.threshold; ++i)
    for (std::size_t k = 0; k < K; ++k) sol.correction(i, k) = -rows[k].value(i);
  return sol;
}

}  // namespace flagforge
