#pragma once

// Exact rational scalars and a small dense rational matrix with the
// elimination routines the structural code needs (rank, nullspace, solve,
// inverse). All decisions made from these are exact.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "negric/error.hpp"

namespace negric {

using Rational = mpq_class;
using Integer = mpz_class;
using RationalVector = std::vector<Rational>;

/// Parses "p/q", "p", or a plain decimal such as "-0.25" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' '; }), s.end());
  require(!s.empty(), ErrorCode::Parse, "empty rational literal");
  auto is_int = [](std::string_view t) {
    if (!t.empty() && (t.front() == '-' || t.front() == '+')) t.remove_prefix(1);
    return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  auto strip_plus = [](std::string t) {
    if (!t.empty() && t.front() == '+') t.erase(0, 1);
    return t;
  };
  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    require(is_int(num) && is_int(den), ErrorCode::Parse, "malformed rational '" + s + "'");
    Integer q(strip_plus(den), 10);
    require(q != 0, ErrorCode::Parse, "zero denominator in '" + s + "'");
    Rational r(Integer(strip_plus(num), 10), q);
    r.canonicalize();
    return r;
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    bool neg = !ip.empty() && ip.front() == '-';
    if (!ip.empty() && (ip.front() == '-' || ip.front() == '+')) ip.erase(0, 1);
    if (ip.empty()) ip = "0";
    require(is_int(ip) && (fp.empty() || is_int(fp)) && (fp.empty() || (fp.front() != '-' && fp.front() != '+')),
            ErrorCode::Parse, "malformed decimal '" + s + "'");
    Integer den = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
    Rational r(Integer(ip + fp, 10), den);
    r.canonicalize();
    return neg ? Rational(-r) : r;
  }
  require(is_int(s), ErrorCode::Parse, "malformed rational '" + s + "'");
  return Rational(Integer(strip_plus(s), 10));
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline bool is_zero(std::span<const Rational> v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

inline RationalVector unit_vector(std::size_t n, std::size_t i) {
  RationalVector v(n, Rational(0));
  v.at(i) = 1;
  return v;
}

/// Dense row-major rational matrix.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

  static RationalMatrix identity(std::size_t n) {
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static RationalMatrix diagonal(std::span<const Rational> d) {
    RationalMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  /// Builds a matrix whose columns are the given vectors.
  static RationalMatrix from_columns(const std::vector<RationalVector>& cols, std::size_t rows) {
    RationalMatrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      require(cols[j].size() == rows, ErrorCode::DimensionMismatch, "column length mismatch");
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  RationalVector column(std::size_t j) const {
    RationalVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  RationalVector diagonal_entries() const {
    RationalVector v(std::min(rows_, cols_));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (*this)(i, i);
    return v;
  }

  RationalMatrix transpose() const {
    RationalMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Rational trace() const {
    Rational t = 0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  bool is_zero() const { return negric::is_zero(data_); }

  bool is_lower_triangular() const {
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if ((*this)(i, j) != 0) return false;
    return true;
  }

  bool is_diagonal() const {
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (i != j && (*this)(i, j) != 0) return false;
    return true;
  }

  RationalVector operator*(std::span<const Rational> v) const {
    require(v.size() == cols_, ErrorCode::DimensionMismatch, "matrix-vector size mismatch");
    RationalVector out(rows_, Rational(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if ((*this)(i, j) != 0 && v[j] != 0) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    require(a.cols_ == b.rows_, ErrorCode::DimensionMismatch, "matrix product size mismatch");
    RationalMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k) == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (b(k, j) != 0) c(i, j) += a(i, k) * b(k, j);
      }
    return c;
  }

  friend RationalMatrix operator+(RationalMatrix a, const RationalMatrix& b) {
    require(a.rows_ == b.rows_ && a.cols_ == b.cols_, ErrorCode::DimensionMismatch, "matrix sum size mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }

  friend RationalMatrix operator-(RationalMatrix a, const RationalMatrix& b) {
    require(a.rows_ == b.rows_ && a.cols_ == b.cols_, ErrorCode::DimensionMismatch, "matrix difference size mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }

  friend RationalMatrix operator*(const Rational& s, RationalMatrix a) {
    for (auto& x : a.data_) x *= s;
    return a;
  }

  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

inline RationalMatrix commutator(const RationalMatrix& a, const RationalMatrix& b) {
  return a * b - b * a;
}

namespace detail {

/// Integer row echelon form produced by fraction-free elimination.
struct Echelon {
  std::vector<std::vector<Integer>> rows;  // nonzero rows only, in pivot order
  std::vector<std::size_t> pivots;         // pivot column of each row
  std::size_t cols = 0;
};

inline void make_primitive(std::vector<Integer>& row) {
  Integer g = 0;
  for (const auto& x : row)
    if (x != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g > 1)
    for (auto& x : row)
      if (x != 0) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

/// Scales a rational row to a primitive integer row.
inline std::vector<Integer> integer_row(std::span<const Rational> row) {
  Integer l = 1;
  for (const auto& x : row)
    if (x != 0) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  std::vector<Integer> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] == 0) continue;
    out[j] = row[j].get_num() * (l / row[j].get_den());
  }
  make_primitive(out);
  return out;
}

/// Fraction-free Gaussian elimination: pivot on the first nonzero entry of
/// each column, eliminate by integer cross-multiplication, and keep every
/// row primitive (content divided out) to bound coefficient growth.
inline Echelon echelon(std::vector<std::vector<Integer>> rows, std::size_t cols) {
  std::erase_if(rows, [](const auto& r) { return std::all_of(r.begin(), r.end(), [](const Integer& x) { return x == 0; }); });
  Echelon e;
  e.cols = cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t piv = r;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    const auto& p = rows[r];
    for (std::size_t i = r + 1; i < rows.size(); ++i) {
      if (rows[i][c] == 0) continue;
      Integer g = gcd(p[c], rows[i][c]);
      Integer fp = rows[i][c] / g, fi = p[c] / g;
      auto& row = rows[i];
      for (std::size_t j = c; j < cols; ++j) {
        if (p[j] == 0 && row[j] == 0) continue;
        row[j] = fi * row[j] - fp * p[j];
      }
      make_primitive(row);
    }
    e.pivots.push_back(c);
    ++r;
  }
  rows.resize(r);
  e.rows = std::move(rows);
  return e;
}

inline Echelon echelon(const RationalMatrix& m) {
  std::vector<std::vector<Integer>> rows;
  rows.reserve(m.rows());
  RationalVector buf(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) buf[j] = m(i, j);
    rows.push_back(integer_row(buf));
  }
  return echelon(std::move(rows), m.cols());
}

}  // namespace detail

inline std::size_t rank(const RationalMatrix& m) { return detail::echelon(m).rows.size(); }

/// Basis of {x : m x = 0}, each vector scaled to a primitive integer vector.
inline std::vector<RationalVector> nullspace(const RationalMatrix& m) {
  const auto e = detail::echelon(m);
  const std::size_t n = m.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto c : e.pivots) is_pivot[c] = true;
  std::vector<RationalVector> basis;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    RationalVector x(n, Rational(0));
    x[f] = 1;
    for (std::size_t r = e.rows.size(); r-- > 0;) {
      const auto& row = e.rows[r];
      const std::size_t c = e.pivots[r];
      Rational s = 0;
      for (std::size_t j = c + 1; j < n; ++j)
        if (row[j] != 0 && x[j] != 0) s += Rational(row[j]) * x[j];
      x[c] = -s / Rational(row[c]);
    }
    auto ints = detail::integer_row(x);
    for (std::size_t j = 0; j < n; ++j) x[j] = Rational(ints[j]);
    basis.push_back(std::move(x));
  }
  return basis;
}

/// Solves m x = b exactly; returns nullopt when inconsistent. Free variables are set to 0.
inline std::optional<RationalVector> solve(const RationalMatrix& m, std::span<const Rational> b) {
  require(b.size() == m.rows(), ErrorCode::DimensionMismatch, "solve: right-hand side length mismatch");
  RationalMatrix aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  const auto e = detail::echelon(aug);
  if (!e.pivots.empty() && e.pivots.back() == m.cols()) return std::nullopt;
  RationalVector x(m.cols(), Rational(0));
  for (std::size_t r = e.rows.size(); r-- > 0;) {
    const auto& row = e.rows[r];
    const std::size_t c = e.pivots[r];
    Rational s = Rational(row[m.cols()]);
    for (std::size_t j = c + 1; j < m.cols(); ++j)
      if (row[j] != 0 && x[j] != 0) s -= Rational(row[j]) * x[j];
    x[c] = s / Rational(row[c]);
  }
  return x;
}

inline Rational determinant(RationalMatrix m) {
  require(m.square(), ErrorCode::DimensionMismatch, "determinant of non-square matrix");
  const std::size_t n = m.rows();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m(piv, c) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m(i, c) == 0) continue;
      Rational f = m(i, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

inline RationalMatrix inverse(const RationalMatrix& m) {
  require(m.square(), ErrorCode::DimensionMismatch, "inverse of non-square matrix");
  const std::size_t n = m.rows();
  RationalMatrix a = m, inv = RationalMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a(piv, c) == 0) ++piv;
    require(piv < n, ErrorCode::Singular, "matrix is singular");
    if (piv != c)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(c, j), a(piv, j));
        std::swap(inv(c, j), inv(piv, j));
      }
    const Rational p = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= p;
      inv(c, j) /= p;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a(i, c) == 0) continue;
      const Rational f = a(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(c, j);
        inv(i, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

/// Characteristic polynomial coefficients (monic, highest degree first) via Faddeev-LeVerrier.
inline RationalVector characteristic_polynomial(const RationalMatrix& m) {
  require(m.square(), ErrorCode::DimensionMismatch, "characteristic polynomial of non-square matrix");
  const std::size_t n = m.rows();
  RationalVector coeffs(n + 1);
  coeffs[0] = 1;
  RationalMatrix mk = RationalMatrix::identity(n);
  RationalMatrix am(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    am = m * mk;
    coeffs[k] = -am.trace() / Rational(static_cast<long>(k));
    mk = am;
    for (std::size_t i = 0; i < n; ++i) mk(i, i) += coeffs[k];
  }
  return coeffs;
}

}  // namespace negric
