#pragma once

#include <cstddef>
#include <vector>

#include "negric/error.hpp"
#include "negric/lie_algebra.hpp"
#include "negric/rational.hpp"

namespace negric {

/// Largest |coefficient| of D[X_i,X_j] - [DX_i,X_j] - [X_i,DX_j] over all i < j.
inline Rational leibniz_defect(const LieAlgebra& g, const RationalMatrix& d) {
  const std::size_t n = g.dim();
  require(d.rows() == n && d.cols() == n, ErrorCode::DimensionMismatch, "derivation matrix has wrong size");
  Rational worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = unit_vector(n, i);
    const auto dxi = d.column(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto xj = unit_vector(n, j);
      const auto dxj = d.column(j);
      auto lhs = d * bracket(g, xi, xj);
      const auto r1 = bracket(g, dxi, xj);
      const auto r2 = bracket(g, xi, dxj);
      for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, negric::abs(lhs[k] - r1[k] - r2[k]));
    }
  }
  return worst;
}

inline bool is_derivation(const LieAlgebra& g, const RationalMatrix& d) { return leibniz_defect(g, d) == 0; }

/// An n×n matrix verified to satisfy the Leibniz rule over the algebra it was built against.
class DerivationMatrix {
 public:
  DerivationMatrix() = default;
  DerivationMatrix(const LieAlgebra& g, RationalMatrix m) : m_(std::move(m)) {
    require(is_derivation(g, m_), ErrorCode::NotDerivation, "matrix is not a derivation of the algebra");
  }

  const RationalMatrix& matrix() const { return m_; }
  std::size_t dim() const { return m_.rows(); }
  Rational trace() const { return m_.trace(); }
  RationalVector diagonal() const { return m_.diagonal_entries(); }

  friend bool operator==(const DerivationMatrix& a, const DerivationMatrix& b) { return a.m_ == b.m_; }

 private:
  RationalMatrix m_;
};

namespace detail {

inline RationalMatrix unflatten(std::span<const Rational> v, std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) m(p, q) = v[p * n + q];
  return m;
}

inline RationalVector flatten(const RationalMatrix& m) {
  RationalVector v;
  v.reserve(m.rows() * m.cols());
  for (std::size_t p = 0; p < m.rows(); ++p)
    for (std::size_t q = 0; q < m.cols(); ++q) v.push_back(m(p, q));
  return v;
}

}  // namespace detail

/// Basis of Der(g): exact nullspace of the Leibniz system in the n² entries of D.
inline std::vector<DerivationMatrix> derivation_space(const LieAlgebra& g) {
  const std::size_t n = g.dim();
  const std::size_t unknowns = n * n;
  std::vector<RationalVector> rows;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        RationalVector row(unknowns, Rational(0));
        // D[X_i,X_j] contributes sum_l c_ij^l D(k,l)
        if (const auto* t = g.table().terms(i, j))
          for (const auto& [l, c] : *t) row[k * n + l] += c;
        for (std::size_t p = 0; p < n; ++p) {
          // -[D X_i, X_j] - [X_i, D X_j]
          if (Rational c = g.coefficient(p, j, k); c != 0) row[p * n + i] -= c;
          if (Rational c = g.coefficient(i, p, k); c != 0) row[p * n + j] -= c;
        }
        if (!is_zero(row)) rows.push_back(std::move(row));
      }
  RationalMatrix system(rows.size(), unknowns);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < unknowns; ++c) system(r, c) = rows[r][c];
  std::vector<DerivationMatrix> out;
  for (const auto& v : nullspace(system)) out.emplace_back(g, detail::unflatten(v, n));
  return out;
}

/// Basis of the derivations with zero diagonal inside span(basis).
inline std::vector<RationalMatrix> zero_diagonal_part(const std::vector<DerivationMatrix>& basis) {
  if (basis.empty()) return {};
  const std::size_t n = basis.front().dim();
  RationalMatrix diag(n, basis.size());
  for (std::size_t t = 0; t < basis.size(); ++t)
    for (std::size_t i = 0; i < n; ++i) diag(i, t) = basis[t].matrix()(i, i);
  std::vector<RationalMatrix> out;
  for (const auto& c : nullspace(diag)) {
    RationalMatrix m(n, n);
    for (std::size_t t = 0; t < basis.size(); ++t)
      if (c[t] != 0) m = m + c[t] * basis[t].matrix();
    out.push_back(std::move(m));
  }
  return out;
}

/// Rewrites the structure constants in the basis Y_j = sum_i P(i,j) X_i.
inline LieAlgebra change_basis(const LieAlgebra& g, const RationalMatrix& p) {
  const std::size_t n = g.dim();
  require(p.rows() == n && p.cols() == n, ErrorCode::DimensionMismatch, "change_basis: matrix has wrong size");
  require(rank(p) == n, ErrorCode::Singular, "change_basis: matrix is singular");
  const RationalMatrix pinv = inverse(p);
  StructureTable t(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto ya = p.column(a);
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto w = pinv * bracket(g, ya, p.column(b));
      for (std::size_t k = 0; k < n; ++k)
        if (w[k] != 0) t.add(a, b, k, w[k]);
    }
  }
  return LieAlgebra(std::move(t));
}

/// g = span(Y_1..Y_r) ⊕ n with [Y_s, X] = D_s X and [Y_s, Y_t] = 0.
/// Basis order of the flattened algebra: Y_1..Y_r, X_1..X_n.
inline LieAlgebra solvable_extension(const LieAlgebra& nil, const std::vector<DerivationMatrix>& ders) {
  const std::size_t n = nil.dim(), r = ders.size();
  std::vector<std::string> labels;
  for (std::size_t s = 0; s < r; ++s) labels.push_back(r == 1 ? "Y" : "Y" + std::to_string(s + 1));
  for (const auto& l : nil.labels()) labels.push_back(l);
  StructureTable t(n + r, labels);
  for (std::size_t s = 0; s < r; ++s) {
    require(ders[s].dim() == n, ErrorCode::DimensionMismatch, "solvable_extension: derivation has wrong size");
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        if (ders[s].matrix()(i, j) != 0) t.add(s, r + j, r + i, ders[s].matrix()(i, j));
  }
  for (const auto& [ij, terms] : nil.table().entries())
    for (const auto& [k, c] : terms) t.add(r + ij.first, r + ij.second, r + k, c);
  return LieAlgebra(std::move(t));
}

/// Coordinates of m in span(basis), or nullopt if m is outside it.
inline std::optional<RationalVector> coordinates_in(const std::vector<DerivationMatrix>& basis, const RationalMatrix& m) {
  const std::size_t n = m.rows();
  RationalMatrix a(n * n, basis.size());
  for (std::size_t t = 0; t < basis.size(); ++t) {
    const auto v = detail::flatten(basis[t].matrix());
    for (std::size_t r = 0; r < v.size(); ++r) a(r, t) = v[r];
  }
  return solve(a, detail::flatten(m));
}

}  // namespace negric
