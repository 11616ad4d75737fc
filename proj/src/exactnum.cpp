#include "flagforge/exactnum.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace flagforge {

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(const std::string& raw) {
  std::string s;
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  auto valid_int = [](const std::string& t, bool allow_sign) {
    std::size_t i = 0;
    if (allow_sign && i < t.size() && (t[i] == '-' || t[i] == '+')) ++i;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };
  auto slash = s.find('/');
  std::string num = slash == std::string::npos ? s : s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_int(num, true) || !valid_int(den, false)) fail("ParseError", "bad rational '" + raw + "'");
  if (num[0] == '+') num.erase(0, 1);
  Integer n(num), d(den);
  if (d == 0) fail("ParseError", "zero denominator in '" + raw + "'");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

bool is_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

Vec vec_add(const Vec& a, const Vec& b) {
  Vec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

Vec vec_sub(const Vec& a, const Vec& b) {
  Vec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

Vec vec_scale(const Rational& c, const Vec& a) {
  Vec r(a);
  for (auto& x : r) x *= c;
  return r;
}

Rational dot(const Vec& a, const Vec& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
  return s;
}

// ---------------------------------------------------------------- Matrix

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows, std::size_t cols) {
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) fail("ShapeMismatch", "ragged rows");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows) {
  return from_rows(rows, rows.empty() ? 0 : rows.front().size());
}

Matrix Matrix::column(const Vec& v) {
  Matrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

Matrix Matrix::unit(std::size_t n, std::size_t i, std::size_t j) {
  Matrix m(n, n);
  m(i, j) = 1;
  return m;
}

Vec Matrix::row(std::size_t i) const {
  return Vec(data_.begin() + static_cast<long>(i * cols_),
             data_.begin() + static_cast<long>((i + 1) * cols_));
}

Vec Matrix::col(std::size_t j) const {
  Vec v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

std::vector<Vec> Matrix::row_list() const {
  std::vector<Vec> out;
  out.reserve(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out.push_back(row(i));
  return out;
}

void Matrix::set_row(std::size_t i, const Vec& v) {
  for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = v[j];
}

void Matrix::append_row(const Vec& v) {
  if (rows_ == 0 && cols_ == 0) cols_ = v.size();
  if (v.size() != cols_) fail("ShapeMismatch", "append_row width");
  data_.insert(data_.end(), v.begin(), v.end());
  ++rows_;
}

Matrix Matrix::unflatten(const Vec& v, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  m.data_ = v;
  return m;
}

bool Matrix::is_zero() const { return flagforge::is_zero(data_); }

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Rational Matrix::trace() const {
  Rational s = 0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
  return s;
}

Vec Matrix::apply(const Vec& v) const {
  Vec out(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(i, j) != 0 && v[j] != 0) out[i] += (*this)(i, j) * v[j];
  return out;
}

Matrix Matrix::select_rows(const std::vector<std::size_t>& idx) const {
  Matrix m(idx.size(), cols_);
  for (std::size_t k = 0; k < idx.size(); ++k)
    for (std::size_t j = 0; j < cols_; ++j) m(k, j) = (*this)(idx[k], j);
  return m;
}

Matrix Matrix::select_cols(const std::vector<std::size_t>& idx) const {
  Matrix m(rows_, idx.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < idx.size(); ++k) m(i, k) = (*this)(i, idx[k]);
  return m;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  Matrix r(a);
  r += b;
  return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  Matrix r(a);
  r -= b;
  return r;
}

Matrix& Matrix::operator+=(const Matrix& b) {
  if (rows_ != b.rows_ || cols_ != b.cols_) fail("ShapeMismatch", "matrix add");
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (b.data_[i] != 0) data_[i] += b.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& b) {
  if (rows_ != b.rows_ || cols_ != b.cols_) fail("ShapeMismatch", "matrix sub");
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (b.data_[i] != 0) data_[i] -= b.data_[i];
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_) fail("ShapeMismatch", "matrix product");
  Matrix r(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Rational& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j)
        if (b(k, j) != 0) r(i, j) += aik * b(k, j);
    }
  return r;
}

Matrix operator*(const Rational& c, const Matrix& a) {
  Matrix r(a);
  for (auto& x : r.data_) x *= c;
  return r;
}

std::string Matrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? "," : "") << flagforge::to_string((*this)(i, j));
    os << "]";
  }
  os << "]";
  return os.str();
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix vstack(const Matrix& top, const Matrix& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  if (top.cols() != bottom.cols()) fail("ShapeMismatch", "vstack");
  Matrix r(top);
  for (std::size_t i = 0; i < bottom.rows(); ++i) r.append_row(bottom.row(i));
  return r;
}

Matrix hstack(const Matrix& left, const Matrix& right) {
  if (left.rows() != right.rows()) fail("ShapeMismatch", "hstack");
  Matrix r(left.rows(), left.cols() + right.cols());
  for (std::size_t i = 0; i < left.rows(); ++i) {
    for (std::size_t j = 0; j < left.cols(); ++j) r(i, j) = left(i, j);
    for (std::size_t j = 0; j < right.cols(); ++j) r(i, left.cols() + j) = right(i, j);
  }
  return r;
}

Matrix power(const Matrix& m, std::size_t k) {
  Matrix r = Matrix::identity(m.rows());
  for (std::size_t i = 0; i < k; ++i) r = r * m;
  return r;
}

// ---------------------------------------------------------------- elimination

RrefResult rref(const Matrix& m) {
  RrefResult out{m, {}};
  Matrix& a = out.reduced;
  const std::size_t R = a.rows(), C = a.cols();
  std::size_t r = 0;
  for (std::size_t c = 0; c < C && r < R; ++c) {
    std::size_t piv = R;
    for (std::size_t i = r; i < R; ++i)
      if (a(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv == R) continue;
    if (piv != r)
      for (std::size_t j = 0; j < C; ++j) std::swap(a(piv, j), a(r, j));
    const Rational inv = 1 / a(r, c);
    for (std::size_t j = c; j < C; ++j)
      if (a(r, j) != 0) a(r, j) *= inv;
    for (std::size_t i = 0; i < R; ++i) {
      if (i == r || a(i, c) == 0) continue;
      const Rational f = a(i, c);
      for (std::size_t j = c; j < C; ++j)
        if (a(r, j) != 0) a(i, j) -= f * a(r, j);
    }
    out.pivots.push_back(c);
    ++r;
  }
  return out;
}

std::size_t rank(const Matrix& m) { return rref(m).rank(); }

Matrix row_basis(const Matrix& m) {
  auto rr = rref(m);
  Matrix b(rr.rank(), m.cols());
  for (std::size_t i = 0; i < rr.rank(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) b(i, j) = rr.reduced(i, j);
  return b;
}

Matrix kernel(const Matrix& m) {
  auto rr = rref(m);
  const std::size_t C = m.cols();
  std::vector<bool> is_piv(C, false);
  for (auto p : rr.pivots) is_piv[p] = true;
  Matrix k(0, C);
  for (std::size_t f = 0; f < C; ++f) {
    if (is_piv[f]) continue;
    Vec v(C);
    v[f] = 1;
    for (std::size_t i = 0; i < rr.pivots.size(); ++i) v[rr.pivots[i]] = -rr.reduced(i, f);
    k.append_row(v);
  }
  if (k.rows() == 0) return Matrix(0, C);
  return k;
}

std::optional<Vec> solve(const Matrix& a, const Vec& b) {
  if (b.size() != a.rows()) fail("ShapeMismatch", "solve rhs");
  Matrix aug = hstack(a, Matrix::column(b));
  auto rr = rref(aug);
  const std::size_t C = a.cols();
  if (!rr.pivots.empty() && rr.pivots.back() == C) return std::nullopt;
  Vec x(C);
  for (std::size_t i = 0; i < rr.pivots.size(); ++i) x[rr.pivots[i]] = rr.reduced(i, C);
  return x;
}

std::optional<Matrix> inverse(const Matrix& m) {
  if (!m.square()) fail("NonSquare", "inverse");
  const std::size_t n = m.rows();
  auto rr = rref(hstack(m, Matrix::identity(n)));
  if (rr.rank() < n || rr.pivots[n - 1] != n - 1) return std::nullopt;
  Matrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = rr.reduced(i, n + j);
  return inv;
}

bool in_row_space(const Matrix& basis, const Vec& v) {
  if (flagforge::is_zero(v)) return true;
  if (basis.rows() == 0) return false;
  Matrix t(basis);
  t.append_row(v);
  return rank(t) == rank(basis);
}

bool row_space_contains(const Matrix& b, const Matrix& a) {
  if (a.rows() == 0) return true;
  if (b.rows() == 0) return a.is_zero();
  return rank(vstack(b, a)) == rank(b);
}

bool same_row_space(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) return false;
  return row_basis(a) == row_basis(b);
}

Matrix row_space_sum(const Matrix& a, const Matrix& b) {
  if (a.rows() == 0) return row_basis(b);
  if (b.rows() == 0) return row_basis(a);
  return row_basis(vstack(a, b));
}

Matrix row_space_intersection(const Matrix& a, const Matrix& b) {
  const std::size_t C = a.cols();
  if (a.rows() == 0 || b.rows() == 0) return Matrix(0, C);
  // x = Σ s_i a_i = Σ t_j b_j  ⇔  [a; −b]ᵀ (s,t) = 0
  Matrix big = vstack(a, (Rational(-1)) * b).transpose();
  Matrix k = kernel(big);
  Matrix out(0, C);
  for (std::size_t r = 0; r < k.rows(); ++r) {
    Vec x(C);
    for (std::size_t i = 0; i < a.rows(); ++i)
      if (k(r, i) != 0)
        for (std::size_t j = 0; j < C; ++j) x[j] += k(r, i) * a(i, j);
    out.append_row(x);
  }
  if (out.rows() == 0) return Matrix(0, C);
  return row_basis(out);
}

}  // namespace flagforge
