#include <sstream>

#include "flagforge/exactnum.hpp"

namespace flagforge {

Poly::Poly(Vec coeffs) : c_(std::move(coeffs)) { trim(); }

void Poly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Poly Poly::constant(const Rational& c) { return Poly(Vec{c}); }

Poly Poly::monomial(const Rational& c, std::size_t deg) {
  Vec v(deg + 1);
  v[deg] = c;
  return Poly(std::move(v));
}

Poly Poly::monic() const {
  if (is_zero()) return *this;
  return (1 / lead()) * (*this);
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly();
  Vec d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
  return Poly(std::move(d));
}

Rational Poly::eval(const Rational& t) const {
  Rational acc = 0;
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * t + c_[i];
  return acc;
}

Matrix Poly::eval(const Matrix& m) const {
  if (!m.square()) fail("NonSquare", "poly eval");
  const std::size_t n = m.rows();
  Matrix acc(n, n);
  for (std::size_t i = c_.size(); i-- > 0;) {
    acc = acc * m;
    for (std::size_t k = 0; k < n; ++k) acc(k, k) += c_[i];
  }
  return acc;
}

Poly operator+(const Poly& a, const Poly& b) {
  Vec r(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
  return Poly(std::move(r));
}

Poly operator-(const Poly& a, const Poly& b) {
  Vec r(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] -= b.c_[i];
  return Poly(std::move(r));
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  Vec r(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    if (a.c_[i] != 0)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  return Poly(std::move(r));
}

Poly operator*(const Rational& c, const Poly& a) {
  Vec r(a.c_);
  for (auto& x : r) x *= c;
  return Poly(std::move(r));
}

std::string Poly::to_string(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = c_.size(); i-- > 0;) {
    if (c_[i] == 0) continue;
    Rational a = c_[i];
    if (!first) os << (a < 0 ? " - " : " + ");
    else if (a < 0) os << "-";
    if (a < 0) a = -a;
    first = false;
    if (i == 0 || a != 1) os << flagforge::to_string(a);
    if (i >= 1) os << var;
    if (i >= 2) os << "^" << i;
  }
  return os.str();
}

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
  if (b.is_zero()) fail("DivisionByZero", "polynomial division");
  Vec r = a.coeffs();
  const long db = b.degree();
  if (a.degree() < db) return {Poly(), a};
  Vec q(static_cast<std::size_t>(a.degree() - db + 1));
  const Rational inv = 1 / b.lead();
  for (long k = a.degree(); k >= db; --k) {
    const Rational f = r[static_cast<std::size_t>(k)] * inv;
    q[static_cast<std::size_t>(k - db)] = f;
    if (f == 0) continue;
    for (long j = 0; j <= db; ++j) r[static_cast<std::size_t>(k - db + j)] -= f * b.coeffs()[static_cast<std::size_t>(j)];
  }
  return {Poly(std::move(q)), Poly(std::move(r))};
}

Poly poly_gcd(const Poly& a, const Poly& b) {
  Poly x = a, y = b;
  while (!y.is_zero()) {
    Poly r = divmod(x, y).second;
    x = y.monic();
    y = r;
  }
  return x.monic();
}

Poly squarefree_part(const Poly& p) {
  if (p.degree() <= 0) return Poly::constant(1);
  Poly g = poly_gcd(p, p.derivative());
  return divmod(p, g).first.monic();
}

Poly charpoly(const Matrix& m) {
  if (!m.square()) fail("NonSquare", "charpoly of " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  const std::size_t n = m.rows();
  Matrix h(m);
  // similarity reduction to upper Hessenberg form
  for (std::size_t c = 1; c + 1 < n + 1 && c < n; ++c) {
    std::size_t piv = n;
    for (std::size_t i = c; i < n; ++i)
      if (h(i, c - 1) != 0) {
        piv = i;
        break;
      }
    if (piv == n) continue;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(h(piv, j), h(c, j));
      for (std::size_t i = 0; i < n; ++i) std::swap(h(i, piv), h(i, c));
    }
    for (std::size_t i = c + 1; i < n; ++i) {
      if (h(i, c - 1) == 0) continue;
      const Rational u = h(i, c - 1) / h(c, c - 1);
      for (std::size_t j = 0; j < n; ++j)
        if (h(c, j) != 0) h(i, j) -= u * h(c, j);
      for (std::size_t k = 0; k < n; ++k)
        if (h(k, i) != 0) h(k, c) += u * h(k, i);
    }
  }
  // p_k = charpoly of the leading k×k block
  std::vector<Poly> p(n + 1);
  p[0] = Poly::constant(1);
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t kk = k - 1;
    p[k] = (Poly::x() - Poly::constant(h(kk, kk))) * p[k - 1];
    Rational prod = 1;
    for (std::size_t i = kk; i-- > 0;) {
      prod *= h(i + 1, i);
      if (prod == 0) break;
      const Rational coef = prod * h(i, kk);
      if (coef != 0) p[k] = p[k] - coef * p[i];
    }
  }
  return p[n];
}

Poly minimal_polynomial(const Matrix& m) {
  if (!m.square()) fail("NonSquare", "minimal polynomial");
  const std::size_t n = m.rows();
  Matrix krylov(0, n * n);
  Matrix pw = Matrix::identity(n);
  for (std::size_t k = 0; k <= n; ++k) {
    krylov.append_row(pw.flat());
    Matrix ker = kernel(krylov.transpose());
    if (ker.rows() > 0) {
      Vec c = ker.row(0);
      return Poly(c).monic();
    }
    pw = pw * m;
  }
  fail("InternalError", "minimal polynomial search exceeded degree bound");
}

bool is_nilpotent(const Matrix& m) {
  Poly c = charpoly(m);
  for (long i = 0; i < c.degree(); ++i)
    if (c.coeffs()[static_cast<std::size_t>(i)] != 0) return false;
  return true;
}

bool is_semisimple(const Matrix& m) {
  if (!m.square()) fail("NonSquare", "semisimplicity test");
  if (m.rows() == 0) return true;
  return squarefree_part(charpoly(m)).eval(m).is_zero();
}

JordanChevalley jordan_chevalley(const Matrix& m) {
  if (!m.square()) fail("NonSquare", "jordan_chevalley of " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  const std::size_t n = m.rows();
  if (n == 0) return {m, m};
  const Poly f = squarefree_part(charpoly(m));
  const Poly df = f.derivative();
  Matrix s = m;
  // f(s) → 0 quadratically; f'(s) stays invertible because gcd(f, f') = 1
  for (std::size_t iter = 0; iter < 64; ++iter) {
    Matrix fs = f.eval(s);
    if (fs.is_zero()) return {s, m - s};
    auto inv = inverse(df.eval(s));
    if (!inv) fail("InternalError", "Newton step met a singular derivative");
    s = s - fs * *inv;
  }
  fail("InternalError", "Newton iteration did not converge");
}

std::optional<Vec> polynomial_in(const Matrix& m, const Matrix& target) {
  const std::size_t n = m.rows();
  Matrix cols(0, n * n);
  Matrix pw = Matrix::identity(n);
  for (std::size_t k = 0; k < std::max<std::size_t>(n, 1); ++k) {
    cols.append_row(pw.flat());
    pw = pw * m;
  }
  return solve(cols.transpose(), target.flat());
}

}  // namespace flagforge
