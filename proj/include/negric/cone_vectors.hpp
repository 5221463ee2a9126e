#pragma once

// Exponent vectors F = -E_i - E_j + E_k, one per nonzero bracket [X_i, X_j] ~ X_k of the
// catalog algebras, together with the torus directions V_1, V_2.

#include <cstddef>
#include <vector>

#include "negric/error.hpp"
#include "negric/rational.hpp"

namespace negric {

struct ConeData {
  std::size_t n = 0;
  std::vector<RationalVector> F;
  RationalVector V1;
  RationalVector V2;
};

namespace detail {

inline RationalVector triple(std::size_t n, std::size_t i, std::size_t j, std::size_t k) {
  RationalVector v(n, Rational(0));
  v[i - 1] -= 1;
  v[j - 1] -= 1;
  v[k - 1] += 1;
  return v;
}

}  // namespace detail

inline Rational dot(const RationalVector& u, const RationalVector& v) {
  require(u.size() == v.size(), ErrorCode::DimensionMismatch, "dot: length mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

/// Chain vectors F_1..F_{n-3}, then centre vectors F_{n-2}..F_{n+m-4} (1-based labels).
inline ConeData cone_vectors_Qn(std::size_t n) {
  require(n >= 6 && n % 2 == 0, ErrorCode::InvalidArgument, "cone_vectors_Qn: n must be even and at least 6");
  const std::size_t m = n / 2;
  ConeData c;
  c.n = n;
  for (std::size_t i = 2; i <= n - 2; ++i) c.F.push_back(detail::triple(n, 1, i, i + 1));
  for (std::size_t j = 2; j <= m; ++j) c.F.push_back(detail::triple(n, j, n + 1 - j, n));
  c.V1.assign(n, Rational(0));
  c.V2.assign(n, Rational(0));
  c.V1[0] = 1;
  for (std::size_t i = 3; i <= n - 1; ++i) c.V1[i - 1] = static_cast<long>(i - 2);
  c.V1[n - 1] = static_cast<long>(n - 3);
  for (std::size_t i = 2; i <= n - 1; ++i) c.V2[i - 1] = 1;
  c.V2[n - 1] = 2;
  return c;
}

/// F_i = -E_1 - E_i + E_{i+1}, i = 2..n-1; V_1, V_2 are the diagonals of phi_1, phi_2.
inline ConeData cone_vectors_Ln(std::size_t n) {
  require(n >= 3, ErrorCode::InvalidArgument, "cone_vectors_Ln: n must be at least 3");
  ConeData c;
  c.n = n;
  for (std::size_t i = 2; i <= n - 1; ++i) c.F.push_back(detail::triple(n, 1, i, i + 1));
  c.V1.assign(n, Rational(0));
  c.V2.assign(n, Rational(1));
  for (std::size_t i = 1; i <= n; ++i) c.V1[i - 1] = static_cast<long>(i);
  c.V2[0] = 0;
  return c;
}

}  // namespace negric
