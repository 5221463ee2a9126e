#pragma once

// Finite-dimensional Lie algebras over Q given by structure constants.
// Indices are 0-based internally; labels and file formats are 1-based.

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "negric/error.hpp"
#include "negric/rational.hpp"

namespace negric {

/// Raw bracket data, not yet validated. [X_i, X_j] = sum_k c_k X_k, stored for i < j only.
class StructureTable {
 public:
  using Terms = std::map<std::size_t, Rational>;

  StructureTable() = default;
  explicit StructureTable(std::size_t dim) : dim_(dim) {
    for (std::size_t i = 0; i < dim; ++i) labels_.push_back("X" + std::to_string(i + 1));
  }
  StructureTable(std::size_t dim, std::vector<std::string> labels) : dim_(dim), labels_(std::move(labels)) {
    require(labels_.size() == dim_, ErrorCode::DimensionMismatch, "label count does not match dimension");
  }

  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Adds c * X_k to [X_i, X_j]; i > j is stored as the negated [X_j, X_i].
  void add(std::size_t i, std::size_t j, std::size_t k, const Rational& c) {
    require(i < dim_ && j < dim_ && k < dim_, ErrorCode::DimensionMismatch, "bracket index out of range");
    require(i != j, ErrorCode::InvalidArgument, "bracket [X_i, X_i] must vanish");
    if (c == 0) return;
    Rational v = c;
    if (i > j) {
      std::swap(i, j);
      v = -v;
    }
    auto& terms = entries_[{i, j}];
    terms[k] += v;
    if (terms[k] == 0) terms.erase(k);
    if (terms.empty()) entries_.erase({i, j});
  }

  const Terms* terms(std::size_t i, std::size_t j) const {
    auto it = entries_.find({i, j});
    return it == entries_.end() ? nullptr : &it->second;
  }

  /// Coefficient of X_k in [X_i, X_j] for any ordering of i, j.
  Rational coefficient(std::size_t i, std::size_t j, std::size_t k) const {
    if (i == j) return 0;
    const bool flip = i > j;
    const auto* t = flip ? terms(j, i) : terms(i, j);
    if (t == nullptr) return 0;
    auto it = t->find(k);
    if (it == t->end()) return 0;
    return flip ? Rational(-it->second) : it->second;
  }

  const std::map<std::pair<std::size_t, std::size_t>, Terms>& entries() const { return entries_; }

  friend bool operator==(const StructureTable& a, const StructureTable& b) {
    return a.dim_ == b.dim_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> labels_;
  std::map<std::pair<std::size_t, std::size_t>, Terms> entries_;
};

/// Bilinear extension of the structure constants.
inline RationalVector bracket(const StructureTable& s, std::span<const Rational> u, std::span<const Rational> v) {
  require(u.size() == s.dim() && v.size() == s.dim(), ErrorCode::DimensionMismatch, "bracket: vector length mismatch");
  RationalVector out(s.dim(), Rational(0));
  for (const auto& [ij, terms] : s.entries()) {
    const auto [i, j] = ij;
    Rational w = u[i] * v[j] - u[j] * v[i];
    if (w == 0) continue;
    for (const auto& [k, c] : terms) out[k] += w * c;
  }
  return out;
}

/// Max absolute coefficient of the cyclic Jacobi sum over all basis triples; 0 iff Jacobi holds.
inline Rational jacobi_defect(const StructureTable& s) {
  const std::size_t n = s.dim();
  Rational worst = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        RationalVector sum(n, Rational(0));
        auto acc = [&](std::size_t a, std::size_t b, std::size_t c) {
          // [[X_a, X_b], X_c]
          const auto* t = a < b ? s.terms(a, b) : s.terms(b, a);
          if (t == nullptr) return;
          const Rational sign = a < b ? 1 : -1;
          for (const auto& [m, cm] : *t)
            for (std::size_t q = 0; q < n; ++q) {
              Rational x = s.coefficient(m, c, q);
              if (x != 0) sum[q] += sign * cm * x;
            }
        };
        acc(i, j, k);
        acc(j, k, i);
        acc(k, i, j);
        for (const auto& x : sum) worst = std::max(worst, negric::abs(x));
      }
  return worst;
}

/// A structure table that satisfies the Jacobi identity exactly (checked at construction).
class LieAlgebra {
 public:
  LieAlgebra() = default;
  explicit LieAlgebra(StructureTable table) : table_(std::move(table)) {
    Rational d = jacobi_defect(table_);
    require(d == 0, ErrorCode::JacobiViolated, "structure constants violate the Jacobi identity (defect " + to_string(d) + ")");
  }

  std::size_t dim() const { return table_.dim(); }
  const std::vector<std::string>& labels() const { return table_.labels(); }
  const StructureTable& table() const { return table_; }

  Rational coefficient(std::size_t i, std::size_t j, std::size_t k) const { return table_.coefficient(i, j, k); }

  friend bool operator==(const LieAlgebra& a, const LieAlgebra& b) { return a.table_ == b.table_; }

 private:
  StructureTable table_;
};

inline RationalVector bracket(const LieAlgebra& g, std::span<const Rational> u, std::span<const Rational> v) {
  return bracket(g.table(), u, v);
}

inline Rational jacobi_defect(const LieAlgebra& g) { return jacobi_defect(g.table()); }

/// Matrix of ad_{X_i}: column j holds the coordinates of [X_i, X_j].
inline RationalMatrix ad_matrix(const LieAlgebra& g, std::size_t i) {
  const std::size_t n = g.dim();
  RationalMatrix m(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) m(k, j) = g.coefficient(i, j, k);
  return m;
}

inline RationalMatrix ad_matrix(const LieAlgebra& g, std::span<const Rational> v) {
  const std::size_t n = g.dim();
  require(v.size() == n, ErrorCode::DimensionMismatch, "ad: vector length mismatch");
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    if (v[i] != 0) m = m + v[i] * ad_matrix(g, i);
  return m;
}

/// Linear subspace of Q^n, kept as a primitive integer echelon basis.
class Subspace {
 public:
  explicit Subspace(std::size_t ambient_dim = 0) : ambient_(ambient_dim) {}

  static Subspace span(std::size_t ambient_dim, const std::vector<RationalVector>& vectors) {
    Subspace s(ambient_dim);
    std::vector<std::vector<Integer>> rows;
    for (const auto& v : vectors) {
      require(v.size() == ambient_dim, ErrorCode::DimensionMismatch, "subspace: vector length mismatch");
      rows.push_back(detail::integer_row(v));
    }
    auto e = detail::echelon(std::move(rows), ambient_dim);
    for (const auto& r : e.rows) {
      RationalVector v(ambient_dim);
      for (std::size_t j = 0; j < ambient_dim; ++j) v[j] = Rational(r[j]);
      s.basis_.push_back(std::move(v));
    }
    return s;
  }

  static Subspace whole(std::size_t n) {
    std::vector<RationalVector> vs;
    for (std::size_t i = 0; i < n; ++i) vs.push_back(unit_vector(n, i));
    return span(n, vs);
  }

  /// span(X_from, ..., X_{n-1}) in 0-based indices.
  static Subspace coordinate_tail(std::size_t n, std::size_t from) {
    std::vector<RationalVector> vs;
    for (std::size_t i = from; i < n; ++i) vs.push_back(unit_vector(n, i));
    return span(n, vs);
  }

  std::size_t ambient_dim() const { return ambient_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<RationalVector>& basis() const { return basis_; }

  bool contains(std::span<const Rational> v) const {
    auto vs = basis_;
    vs.emplace_back(v.begin(), v.end());
    return span(ambient_, vs).dim() == dim();
  }

  bool contains(const Subspace& other) const {
    auto vs = basis_;
    vs.insert(vs.end(), other.basis_.begin(), other.basis_.end());
    return span(ambient_, vs).dim() == dim();
  }

  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.ambient_ == b.ambient_ && a.dim() == b.dim() && a.contains(b);
  }

 private:
  std::size_t ambient_;
  std::vector<RationalVector> basis_;
};

/// [g, S] for a subspace S.
inline Subspace bracket_with(const LieAlgebra& g, const Subspace& s) {
  std::vector<RationalVector> out;
  for (std::size_t i = 0; i < g.dim(); ++i) {
    const auto xi = unit_vector(g.dim(), i);
    for (const auto& v : s.basis()) {
      auto w = bracket(g, xi, v);
      if (!is_zero(w)) out.push_back(std::move(w));
    }
  }
  return Subspace::span(g.dim(), out);
}

/// g = g^(0) ⊇ g^(1) = [g,g] ⊇ ... until the terms stabilise (the stable term is listed once).
inline std::vector<Subspace> lower_central_series(const LieAlgebra& g) {
  std::vector<Subspace> series{Subspace::whole(g.dim())};
  while (series.back().dim() > 0) {
    Subspace next = bracket_with(g, series.back());
    if (next.dim() == series.back().dim()) break;
    series.push_back(std::move(next));
  }
  return series;
}

inline bool is_nilpotent(const LieAlgebra& g) { return lower_central_series(g).back().dim() == 0; }

/// True iff the (n-2)-th lower central term is nonzero; only defined for nilpotent algebras.
inline bool is_filiform(const LieAlgebra& g) {
  const auto series = lower_central_series(g);
  require(series.back().dim() == 0, ErrorCode::NotNilpotent, "is_filiform: algebra is not nilpotent");
  if (g.dim() < 2) return false;
  const std::size_t idx = g.dim() - 2;
  return idx < series.size() && series[idx].dim() > 0;
}

inline Subspace center(const LieAlgebra& g) {
  const std::size_t n = g.dim();
  RationalMatrix m(n * n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) m(i * n + k, j) = g.coefficient(j, i, k);
  return Subspace::span(n, nullspace(m));
}

/// B(X_i, X_j) = Tr(ad_{X_i} ad_{X_j}).
inline RationalMatrix killing_form(const LieAlgebra& g) {
  const std::size_t n = g.dim();
  std::vector<RationalMatrix> ads;
  for (std::size_t i = 0; i < n; ++i) ads.push_back(ad_matrix(g, i));
  RationalMatrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      b(i, j) = (ads[i] * ads[j]).trace();
      b(j, i) = b(i, j);
    }
  return b;
}

inline LieAlgebra abelian(std::size_t n) { return LieAlgebra(StructureTable(n)); }

}  // namespace negric
