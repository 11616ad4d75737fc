// Univariate factorization over the rationals.
//
// A squarefree integer polynomial is split modulo a prime p chosen larger than
// twice the coefficient bound of any integer factor, so no Hensel lifting is
// needed; true factors are recovered by subset recombination.

#include <algorithm>
#include <functional>

#include "flagforge/exactnum.hpp"

namespace flagforge {
namespace {

using ZPoly = std::vector<Integer>;  // low degree first

struct ModRing {
  Integer p;

  Integer red(const Integer& a) const {
    Integer r = a % p;
    if (r < 0) r += p;
    return r;
  }
  Integer inv(const Integer& a) const {
    Integer r;
    mpz_invert(r.get_mpz_t(), red(a).get_mpz_t(), p.get_mpz_t());
    return r;
  }
  void trim(ZPoly& a) const {
    while (!a.empty() && a.back() == 0) a.pop_back();
  }
  ZPoly norm(ZPoly a) const {
    for (auto& c : a) c = red(c);
    trim(a);
    return a;
  }
  ZPoly sub(const ZPoly& a, const ZPoly& b) const {
    ZPoly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return norm(std::move(r));
  }
  ZPoly mul(const ZPoly& a, const ZPoly& b) const {
    if (a.empty() || b.empty()) return {};
    ZPoly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != 0)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return norm(std::move(r));
  }
  std::pair<ZPoly, ZPoly> divmod(ZPoly a, const ZPoly& b) const {
    a = norm(std::move(a));
    if (a.size() < b.size()) return {{}, a};
    const Integer li = inv(b.back());
    ZPoly q(a.size() - b.size() + 1);
    for (std::size_t k = a.size(); k-- >= b.size();) {
      const Integer f = red(a[k] * li);
      q[k - (b.size() - 1)] = f;
      if (f != 0)
        for (std::size_t j = 0; j < b.size(); ++j) a[k - (b.size() - 1) + j] = red(a[k - (b.size() - 1) + j] - f * b[j]);
      if (k == 0) break;
    }
    trim(a);
    trim(q);
    return {q, a};
  }
  ZPoly monic(const ZPoly& a) const {
    if (a.empty()) return a;
    const Integer li = inv(a.back());
    ZPoly r(a);
    for (auto& c : r) c = red(c * li);
    return r;
  }
  ZPoly gcd(ZPoly a, ZPoly b) const {
    a = norm(std::move(a));
    b = norm(std::move(b));
    while (!b.empty()) {
      ZPoly r = divmod(a, b).second;
      a = std::move(b);
      b = std::move(r);
    }
    return monic(a);
  }
  ZPoly powmod(ZPoly base, Integer e, const ZPoly& mod) const {
    ZPoly result{Integer(1)};
    base = divmod(base, mod).second;
    while (e > 0) {
      if (e % 2 == 1) result = divmod(mul(result, base), mod).second;
      e /= 2;
      if (e > 0) base = divmod(mul(base, base), mod).second;
    }
    return result;
  }
};

ZPoly derivative(const ZPoly& a) {
  ZPoly d;
  for (std::size_t i = 1; i < a.size(); ++i) d.push_back(a[i] * static_cast<long>(i));
  return d;
}

void equal_degree(const ModRing& R, const ZPoly& g, std::size_t d, gmp_randclass& rng, std::vector<ZPoly>& out) {
  const std::size_t deg = g.size() - 1;
  if (deg == d) {
    out.push_back(g);
    return;
  }
  Integer e;
  mpz_pow_ui(e.get_mpz_t(), R.p.get_mpz_t(), d);
  e = (e - 1) / 2;
  for (;;) {
    ZPoly a(deg);
    for (auto& c : a) c = rng.get_z_range(R.p);
    R.trim(a);
    if (a.size() < 2) continue;
    ZPoly b = R.sub(R.powmod(a, e, g), ZPoly{Integer(1)});
    ZPoly u = R.gcd(b, g);
    if (u.size() > 1 && u.size() < g.size()) {
      equal_degree(R, u, d, rng, out);
      equal_degree(R, R.monic(R.divmod(g, u).first), d, rng, out);
      return;
    }
  }
}

std::vector<ZPoly> factor_mod(const ModRing& R, const ZPoly& f_in) {
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(20240917UL);
  std::vector<ZPoly> out;
  ZPoly f = R.monic(R.norm(f_in));
  const ZPoly x{Integer(0), Integer(1)};
  ZPoly h = x;
  for (std::size_t d = 1; 2 * d <= f.size() - 1; ++d) {
    h = R.powmod(h, R.p, f);
    ZPoly g = R.gcd(R.sub(h, x), f);
    if (g.size() > 1) {
      equal_degree(R, g, d, rng, out);
      f = R.monic(R.divmod(f, g).first);
      h = R.divmod(h, f).second;
    }
  }
  if (f.size() > 1) out.push_back(f);
  return out;
}

ZPoly to_primitive(const Poly& p) {
  Integer den = 1;
  for (const auto& c : p.coeffs()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den().get_mpz_t());
  ZPoly z;
  Integer content = 0;
  for (const auto& c : p.coeffs()) {
    Rational t = c * den;
    z.push_back(t.get_num());
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), t.get_num().get_mpz_t());
  }
  for (auto& c : z) c /= content;
  if (z.back() < 0)
    for (auto& c : z) c = -c;
  return z;
}

Poly from_z(const ZPoly& z) {
  Vec v;
  for (const auto& c : z) v.emplace_back(c);
  return Poly(v);
}

std::vector<Poly> factor_squarefree(const Poly& g) {
  if (g.degree() <= 1) return {g.monic()};
  ZPoly f = to_primitive(g);
  const std::size_t n = f.size() - 1;
  Integer norm1 = 0;
  for (const auto& c : f) norm1 += abs(c);
  Integer bound = 2 * abs(f.back()) * norm1;
  mpz_mul_2exp(bound.get_mpz_t(), bound.get_mpz_t(), n);
  ModRing R{0};
  mpz_nextprime(R.p.get_mpz_t(), bound.get_mpz_t());
  for (;;) {
    if (R.red(f.back()) != 0 && R.gcd(f, derivative(f)).size() == 1) break;
    mpz_nextprime(R.p.get_mpz_t(), R.p.get_mpz_t());
  }
  std::vector<ZPoly> mods = factor_mod(R, f);
  std::vector<Poly> found;
  Poly rest = from_z(f);
  const Integer half = R.p / 2;
  std::size_t s = 1;
  while (2 * s <= mods.size()) {
    std::vector<std::size_t> idx(s);
    std::function<bool(std::size_t, std::size_t)> pick = [&](std::size_t start, std::size_t depth) -> bool {
      if (depth == s) {
        ZPoly prod{R.red(to_primitive(rest).back())};
        for (auto i : idx) prod = R.mul(prod, mods[i]);
        ZPoly sym;
        for (const auto& c : prod) sym.push_back(c > half ? c - R.p : c);
        Poly cand = from_z(to_primitive(from_z(sym)));
        if (cand.degree() >= 1 && divmod(rest, cand).second.is_zero()) {
          found.push_back(cand.monic());
          rest = divmod(rest, cand).first;
          std::vector<ZPoly> keep;
          for (std::size_t i = 0; i < mods.size(); ++i)
            if (std::find(idx.begin(), idx.end(), i) == idx.end()) keep.push_back(mods[i]);
          mods = std::move(keep);
          return true;
        }
        return false;
      }
      for (std::size_t i = start; i < mods.size(); ++i) {
        idx[depth] = i;
        if (pick(i + 1, depth + 1)) return true;
      }
      return false;
    };
    while (2 * s <= mods.size() && pick(0, 0)) continue;
    ++s;
  }
  if (rest.degree() >= 1) found.push_back(rest.monic());
  return found;
}

}  // namespace

std::vector<std::pair<Poly, int>> factor(const Poly& p) {
  std::vector<std::pair<Poly, int>> out;
  if (p.degree() <= 0) return out;
  // Yun's squarefree decomposition
  Poly a = p.monic();
  Poly b = a.derivative();
  Poly c = poly_gcd(a, b);
  Poly w = divmod(a, c).first;
  Poly y = divmod(b, c).first;
  Poly z = y - w.derivative();
  int mult = 1;
  while (w.degree() > 0) {
    Poly g = poly_gcd(w, z);
    if (g.degree() > 0)
      for (auto& f : factor_squarefree(g)) out.emplace_back(f, mult);
    w = divmod(w, g).first;
    y = divmod(z, g).first;
    z = y - w.derivative();
    ++mult;
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    if (l.first.degree() != r.first.degree()) return l.first.degree() < r.first.degree();
    return l.first.coeffs() < r.first.coeffs();
  });
  return out;
}

}  // namespace flagforge
