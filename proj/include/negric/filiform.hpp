#pragma once

// The rank-two filiform algebras L_n and Q_n, their tori of derivations,
// and the basis normalisations used by the decision and construction layers.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "negric/derivations.hpp"
#include "negric/error.hpp"
#include "negric/lie_algebra.hpp"
#include "negric/rational.hpp"

namespace negric {

enum class Family { L, Q };

inline std::string family_name(Family f) { return f == Family::L ? "Ln" : "Qn"; }

inline Family parse_family(const std::string& s) {
  if (s == "Ln" || s == "L") return Family::L;
  if (s == "Qn" || s == "Q") return Family::Q;
  throw Error(ErrorCode::InvalidArgument, "unknown family '" + s + "' (expected Ln or Qn)");
}

struct FiliformSpec {
  Family family;
  std::size_t n;

  FiliformSpec(Family f, std::size_t dim) : family(f), n(dim) {
    if (family == Family::L)
      require(n >= 3, ErrorCode::InvalidArgument, "L_n requires n >= 3");
    else
      require(n >= 4 && n % 2 == 0, ErrorCode::InvalidArgument, "Q_n requires even n >= 4");
  }

  /// Q_4 is isomorphic to L_4; callers reroute it.
  bool isomorphic_to_L4() const { return family == Family::Q && n == 4; }
};

/// [X_1, X_i] = X_{i+1}, 2 <= i <= n-1.
inline LieAlgebra make_Ln(std::size_t n) {
  require(n >= 3, ErrorCode::InvalidArgument, "make_Ln: n must be at least 3");
  StructureTable t(n);
  for (std::size_t i = 1; i + 1 < n; ++i) t.add(0, i, i + 1, 1);
  return LieAlgebra(std::move(t));
}

/// [X_1, X_i] = X_{i+1} for 2 <= i <= n-2, [X_j, X_{n-j+1}] = (-1)^{j+1} X_n for 2 <= j <= n-1.
inline LieAlgebra make_Qn(std::size_t n) {
  require(n >= 4 && n % 2 == 0, ErrorCode::InvalidArgument, "make_Qn: n must be even and at least 4");
  StructureTable t(n);
  for (std::size_t i = 1; i + 2 < n; ++i) t.add(0, i, i + 1, 1);
  for (std::size_t j = 2; j <= n / 2; ++j) t.add(j - 1, n - j, n - 1, j % 2 == 0 ? -1 : 1);
  return LieAlgebra(std::move(t));
}

/// Q_n in the alternative normal form: the chain extends to [Y_1, Y_{n-1}] = Y_n.
inline LieAlgebra make_Qn_alternate(std::size_t n) {
  require(n >= 4 && n % 2 == 0, ErrorCode::InvalidArgument, "make_Qn_alternate: n must be even and at least 4");
  StructureTable t(n);
  for (std::size_t i = 1; i + 1 < n; ++i) t.add(0, i, i + 1, 1);
  for (std::size_t j = 2; j <= n / 2; ++j) t.add(j - 1, n - j, n - 1, j % 2 == 0 ? -1 : 1);
  return LieAlgebra(std::move(t));
}

/// Basis change Y_1 = X_1 - X_2, Y_i = X_i carrying make_Qn(n) onto make_Qn_alternate(n).
inline RationalMatrix alternate_basis_map(std::size_t n) {
  RationalMatrix p = RationalMatrix::identity(n);
  p(1, 0) = -1;
  return p;
}

/// Basis (-X_2, X_1, X_3, X_4) of Q_4 in which it has the L_4 relations.
inline RationalMatrix q4_to_l4_map() {
  RationalMatrix p(4, 4);
  p(1, 0) = -1;
  p(0, 1) = 1;
  p(2, 2) = 1;
  p(3, 3) = 1;
  return p;
}

inline bool is_Ln(const LieAlgebra& g) { return g.dim() >= 3 && g == make_Ln(g.dim()); }
inline bool is_Qn(const LieAlgebra& g) { return g.dim() >= 4 && g.dim() % 2 == 0 && g == make_Qn(g.dim()); }

inline LieAlgebra make_algebra(const FiliformSpec& s) { return s.family == Family::L ? make_Ln(s.n) : make_Qn(s.n); }

/// The two diagonal derivations spanning the maximal torus.
inline std::pair<DerivationMatrix, DerivationMatrix> torus(const FiliformSpec& s) {
  const std::size_t n = s.n;
  RationalVector d1(n), d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d1[i] = static_cast<long>(i + 1);
    d2[i] = i == 0 ? 0 : 1;
  }
  if (s.family == Family::Q) {
    d1[n - 1] = static_cast<long>(n + 1);
    d2[n - 1] = 2;
  }
  const auto g = make_algebra(s);
  return {DerivationMatrix(g, RationalMatrix::diagonal(d1)), DerivationMatrix(g, RationalMatrix::diagonal(d2))};
}

/// Diagonal of the rank-one torus generator: diag(1, 2+r, ..., (n-1)+r, n+2r).
inline RationalMatrix rank_one_torus(std::size_t n, std::size_t r) {
  require(n >= 5 && r >= 1 && r + 4 <= n, ErrorCode::InvalidArgument, "rank_one_torus: need 1 <= r <= n-4");
  RationalVector d(n);
  d[0] = 1;
  for (std::size_t i = 2; i < n; ++i) d[i - 1] = static_cast<long>(i + r);
  d[n - 1] = static_cast<long>(n + 2 * r);
  return RationalMatrix::diagonal(d);
}

/// Eigenvalues a, d, a+d, ..., (n-3)a+d, (n-3)a+2d of the diagonal Q_n derivation.
inline RationalVector qn_eigenvalues(std::size_t n, const Rational& a, const Rational& d) {
  require(n >= 4 && n % 2 == 0, ErrorCode::InvalidArgument, "Q_n requires even n >= 4");
  RationalVector lambda(n);
  lambda[0] = a;
  for (std::size_t i = 2; i <= n - 1; ++i) lambda[i - 1] = d + Rational(static_cast<long>(i - 2)) * a;
  lambda[n - 1] = Rational(static_cast<long>(n - 3)) * a + 2 * d;
  return lambda;
}

/// a*phi_1 + (d - 2a)*phi_2 on Q_n.
inline DerivationMatrix qn_diagonal_derivation(std::size_t n, const Rational& a, const Rational& d) {
  return DerivationMatrix(make_Qn(n), RationalMatrix::diagonal(qn_eigenvalues(n, a, d)));
}

/// alpha*phi_1 + beta*phi_2 on L_n.
inline RationalVector ln_eigenvalues(std::size_t n, const Rational& alpha, const Rational& beta) {
  require(n >= 3, ErrorCode::InvalidArgument, "L_n requires n >= 3");
  RationalVector lambda(n);
  lambda[0] = alpha;
  for (std::size_t i = 2; i <= n; ++i) lambda[i - 1] = Rational(static_cast<long>(i)) * alpha + beta;
  return lambda;
}

inline DerivationMatrix ln_diagonal_derivation(std::size_t n, const Rational& alpha, const Rational& beta) {
  return DerivationMatrix(make_Ln(n), RationalMatrix::diagonal(ln_eigenvalues(n, alpha, beta)));
}

struct BasisChange {
  RationalMatrix p;        // columns: new basis in old coordinates
  RationalMatrix derived;  // P^{-1} D P
};

/// Removes the X_1-component b of D X_2 by X_2 -> X_2 - b/(a-d) X_1. Apart from b the matrix
/// must be lower-triangular with no X_2-component in D X_1; the result is then lower-triangular
/// with the same diagonal.
inline BasisChange eliminate_b(const Rational& a, const Rational& d, const RationalMatrix& m) {
  require(m.square() && m.rows() >= 2, ErrorCode::DimensionMismatch, "eliminate_b: need a square matrix of size >= 2");
  require(a != d, ErrorCode::InvalidArgument, "eliminate_b: a = d, not eliminable; use the positive-eigenvalue path");
  require(m(0, 0) == a && m(1, 1) == d, ErrorCode::InvalidArgument, "eliminate_b: diagonal does not start with (a, d)");
  RationalMatrix rest = m;
  rest(0, 1) = 0;
  require(rest.is_lower_triangular(), ErrorCode::InvalidArgument, "eliminate_b: only the (1,2) slot may lie above the diagonal");
  require(m(0, 1) == 0 || m(1, 0) == 0, ErrorCode::InvalidArgument,
          "eliminate_b: D X_1 has an X_2-component; the substitution would not clear b");
  RationalMatrix p = RationalMatrix::identity(m.rows());
  p(0, 1) = -m(0, 1) / (a - d);
  return {p, inverse(p) * m * p};
}

/// Algebra [Y_1,Y_i] = Y_{i+1} (2 <= i <= n-1), [Y_i,Y_j] = K_ij Y_n; K is indexed by 2..n-1.
inline StructureTable skew_filiform_table(std::size_t n, const RationalMatrix& k) {
  require(n >= 4, ErrorCode::InvalidArgument, "skew filiform family needs n >= 4");
  require(k.rows() == n - 2 && k.cols() == n - 2, ErrorCode::DimensionMismatch, "K must be (n-2)x(n-2)");
  require(k + k.transpose() == RationalMatrix(n - 2, n - 2), ErrorCode::InvalidArgument, "K must be skew-symmetric");
  StructureTable t(n);
  for (std::size_t i = 1; i + 1 < n; ++i) t.add(0, i, i + 1, 1);
  for (std::size_t i = 0; i < n - 2; ++i)
    for (std::size_t j = i + 1; j < n - 2; ++j)
      if (k(i, j) != 0) t.add(i + 1, j + 1, n - 1, k(i, j));
  return t;
}

struct Normalization {
  RationalMatrix p;  // columns: normal-form basis in the input basis
  LieAlgebra algebra;
};

/// Carries the skew filiform algebra with nonsingular K onto make_Qn_alternate(n).
///
/// Y'_1 = Y_1, Y'_2 = Y_2 + a_4 Y_4 + a_6 Y_6 + ..., Y'_{i+1} = [Y'_1, Y'_i]; the even
/// coefficients are fixed one at a time so that K'_{2,n-3}, K'_{2,n-5}, ... vanish (each
/// is affine in its coefficient with slope 2 K_{2,n-1}). Odd coefficients stay 0. A final
/// rescaling of Y'_2..Y'_n by -1/K_{2,n-1} fixes the sign pattern.
inline Normalization normalize_to_Qn(std::size_t n, const RationalMatrix& k) {
  require(n >= 4 && n % 2 == 0, ErrorCode::InvalidArgument, "normalize_to_Qn: n must be even and at least 4");
  StructureTable table = skew_filiform_table(n, k);
  const LieAlgebra input(std::move(table));  // throws JacobiViolated
  require(determinant(k) != 0, ErrorCode::Singular, "normalize_to_Qn: K is singular");
  const Rational k_top = k(0, n - 3);  // K_{2,n-1}
  require(k_top != 0, ErrorCode::Singular, "normalize_to_Qn: K_{2,n-1} vanishes");

  RationalVector coef(n, Rational(0));  // coef[t-1] multiplies Y_t in Y'_2
  auto basis = [&](const RationalVector& c) {
    std::vector<RationalVector> cols(n);
    cols[0] = unit_vector(n, 0);
    cols[1] = unit_vector(n, 1);
    for (std::size_t t = 2; t < n; ++t) cols[1][t] += c[t];
    for (std::size_t i = 2; i < n; ++i) cols[i] = bracket(input, cols[0], cols[i - 1]);
    return cols;
  };
  // K'_{i,j} for 1-based indices i, j in 2..n-1.
  auto k_prime = [&](const RationalVector& c, std::size_t i, std::size_t j) {
    const auto cols = basis(c);
    const auto w = bracket(input, cols[i - 1], cols[j - 1]);
    for (std::size_t q = 0; q + 1 < n; ++q)
      require(w[q] == 0, ErrorCode::InvalidArgument, "normalize_to_Qn: bracket leaves the centre");
    return w[n - 1];
  };

  for (std::size_t t = 4; t + 2 <= n; t += 2) {
    const std::size_t j = n + 1 - t;
    RationalVector c0 = coef, c1 = coef;
    c0[t - 1] = 0;
    c1[t - 1] = 1;
    const Rational v0 = k_prime(c0, 2, j);
    const Rational slope = k_prime(c1, 2, j) - v0;
    require(slope != 0, ErrorCode::Singular, "normalize_to_Qn: degenerate recursion step");
    coef[t - 1] = -v0 / slope;
  }

  const auto cols = basis(coef);
  const Rational scale = -1 / k_top;
  RationalMatrix p(n, n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < n; ++r) p(r, c) = c == 0 ? cols[c][r] : scale * cols[c][r];
  LieAlgebra out = change_basis(input, p);
  require(out == make_Qn_alternate(n), ErrorCode::InvalidArgument, "normalize_to_Qn: result is not in normal form");
  return {p, std::move(out)};
}

}  // namespace negric
