#pragma once

#include <random>

#include "flagforge/exactnum.hpp"

namespace fftest {

using namespace flagforge;

inline Matrix M(std::initializer_list<std::initializer_list<long>> rows) {
  std::vector<Vec> rs;
  for (auto& r : rows) {
    Vec v;
    for (long x : r) v.emplace_back(x);
    rs.push_back(v);
  }
  return Matrix::from_rows(rs);
}

inline Poly P(std::initializer_list<long> low_first) {
  Vec v;
  for (long x : low_first) v.emplace_back(x);
  return Poly(v);
}

inline Rational Q(const char* s) { return parse_rational(s); }

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t n, long lo, long hi, double density = 1.0) {
  std::uniform_int_distribution<long> d(lo, hi);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (u(rng) < density) m(i, j) = d(rng);
  return m;
}

}  // namespace fftest
