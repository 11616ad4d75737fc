#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flagforge/errors.hpp"

namespace flagforge {

/// Arbitrary-precision rational; GMP keeps it reduced with positive denominator.
using Rational = mpq_class;
using Integer = mpz_class;
using Vec = std::vector<Rational>;

std::string to_string(const Rational& q);
/// Accepts "p", "-p", "p/q"; throws Error("ParseError") otherwise.
Rational parse_rational(const std::string& s);

bool is_zero(const Vec& v);
Vec vec_add(const Vec& a, const Vec& b);
Vec vec_sub(const Vec& a, const Vec& b);
Vec vec_scale(const Rational& c, const Vec& a);
Rational dot(const Vec& a, const Vec& b);

class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vec>& rows, std::size_t cols);
  static Matrix from_rows(const std::vector<Vec>& rows);
  static Matrix column(const Vec& v);
  /// Elementary matrix E_ij of size n.
  static Matrix unit(std::size_t n, std::size_t i, std::size_t j);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vec row(std::size_t i) const;
  Vec col(std::size_t j) const;
  std::vector<Vec> row_list() const;
  void set_row(std::size_t i, const Vec& v);
  void append_row(const Vec& v);
  /// Row-major flattening (used to treat n×n matrices as vectors of length n²).
  const Vec& flat() const noexcept { return data_; }
  static Matrix unflatten(const Vec& v, std::size_t rows, std::size_t cols);

  bool is_zero() const;
  Matrix transpose() const;
  Rational trace() const;
  Vec apply(const Vec& v) const;
  Matrix select_rows(const std::vector<std::size_t>& idx) const;
  Matrix select_cols(const std::vector<std::size_t>& idx) const;

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator*(const Rational& c, const Matrix& a);
  Matrix& operator+=(const Matrix& b);
  Matrix& operator-=(const Matrix& b);

  std::string to_string() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

Matrix commutator(const Matrix& a, const Matrix& b);
Matrix vstack(const Matrix& top, const Matrix& bottom);
Matrix hstack(const Matrix& left, const Matrix& right);
Matrix power(const Matrix& m, std::size_t k);

struct RrefResult {
  Matrix reduced;
  std::vector<std::size_t> pivots;
  std::size_t rank() const noexcept { return pivots.size(); }
};

/// Reduced row echelon form; zero rows are kept at the bottom.
RrefResult rref(const Matrix& m);
std::size_t rank(const Matrix& m);
/// Nonzero rows of the rref: a canonical basis of the row space.
Matrix row_basis(const Matrix& m);
/// Rows form a basis of the right null space {x : m x = 0}.
Matrix kernel(const Matrix& m);
/// Rows form a basis of {y : y·r = 0 for every row r of m}.
inline Matrix annihilator(const Matrix& m) { return kernel(m); }
std::optional<Vec> solve(const Matrix& a, const Vec& b);
std::optional<Matrix> inverse(const Matrix& m);
bool in_row_space(const Matrix& basis, const Vec& v);
/// Row space of a contained in row space of b.
bool row_space_contains(const Matrix& b, const Matrix& a);
bool same_row_space(const Matrix& a, const Matrix& b);
Matrix row_space_intersection(const Matrix& a, const Matrix& b);
Matrix row_space_sum(const Matrix& a, const Matrix& b);

/// Dense univariate polynomial, coefficients low degree first, no trailing zeros.
class Poly {
public:
  Poly() = default;
  explicit Poly(Vec coeffs);
  static Poly constant(const Rational& c);
  static Poly monomial(const Rational& c, std::size_t deg);
  static Poly x() { return monomial(Rational(1), 1); }

  bool is_zero() const noexcept { return c_.empty(); }
  long degree() const noexcept { return static_cast<long>(c_.size()) - 1; }
  const Vec& coeffs() const noexcept { return c_; }
  Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
  Rational lead() const { return c_.empty() ? Rational(0) : c_.back(); }
  Poly monic() const;
  Poly derivative() const;
  Rational eval(const Rational& t) const;
  Matrix eval(const Matrix& m) const;

  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(const Rational& c, const Poly& a);

  std::string to_string(const std::string& var = "t") const;

private:
  void trim();
  Vec c_;
};

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b);
Poly poly_gcd(const Poly& a, const Poly& b);
/// Product of the distinct monic irreducible factors.
Poly squarefree_part(const Poly& p);
/// Monic irreducible factors over the rationals with multiplicities.
std::vector<std::pair<Poly, int>> factor(const Poly& p);

/// Monic characteristic polynomial det(t·I − m) via Hessenberg reduction.
Poly charpoly(const Matrix& m);
Poly minimal_polynomial(const Matrix& m);
bool is_nilpotent(const Matrix& m);
/// Squarefree minimal polynomial.
bool is_semisimple(const Matrix& m);

struct JordanChevalley {
  Matrix ss;
  Matrix nil;
};

/// Newton iteration on the squarefree part of the characteristic polynomial.
JordanChevalley jordan_chevalley(const Matrix& m);
/// Coefficients c with Σ c_k m^k = target (k < n), if any.
std::optional<Vec> polynomial_in(const Matrix& m, const Matrix& target);

}  // namespace flagforge
