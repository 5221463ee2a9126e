#pragma once

// Exact decision layer: the trace functionals iota_k, the critical index l,
// and yes/no answers for one- and multi-dimensional extensions of L_n and Q_n.

#include <json.hpp>

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "negric/cone_vectors.hpp"
#include "negric/derivations.hpp"
#include "negric/error.hpp"
#include "negric/filiform.hpp"
#include "negric/lie_algebra.hpp"
#include "negric/rational.hpp"

namespace negric {

namespace detail {

inline void require_qn_dim(std::size_t n) {
  require(n >= 6 && n % 2 == 0, ErrorCode::InvalidArgument, "Q_n criterion requires even n >= 6");
}

inline Rational lint(std::size_t v) { return Rational(static_cast<long>(v)); }

}  // namespace detail

/// iota_k = 1/2((n-3)n - (k-3)(k-2)) a + (n-k+2) d, the trace of the derivation on span(X_k..X_n).
inline Rational iota_Qn(std::size_t n, const Rational& a, const Rational& d, std::size_t k) {
  detail::require_qn_dim(n);
  require(k >= 3 && k <= n, ErrorCode::InvalidArgument, "iota_Qn: k must lie in 3..n");
  using detail::lint;
  return (lint((n - 3) * n) - lint((k - 3) * (k - 2))) / 2 * a + lint(n - k + 2) * d;
}

inline Rational trace_T(std::size_t n, const Rational& a, const Rational& d) {
  detail::require_qn_dim(n);
  using detail::lint;
  return lint((n - 1) * (n - 2)) / 2 * a + lint(n) * d;
}

/// iota_2 and iota_n of alpha*phi_1 + beta*phi_2 on L_n.
inline Rational iota2_Ln(std::size_t n, const Rational& alpha, const Rational& beta) {
  using detail::lint;
  return (lint(n * (n + 1)) / 2 - 1) * alpha + lint(n - 1) * beta;
}

inline Rational iotan_Ln(std::size_t n, const Rational& alpha, const Rational& beta) {
  return detail::lint(n) * alpha + beta;
}

/// Trace of D restricted to span(X_k, ..., X_n) (k 1-based), which must be D-invariant.
inline Rational iota_general(const DerivationMatrix& d, std::size_t k) {
  const std::size_t n = d.dim();
  require(k >= 1 && k <= n, ErrorCode::InvalidArgument, "iota_general: k out of range");
  const auto& m = d.matrix();
  for (std::size_t j = k - 1; j < n; ++j)
    for (std::size_t i = 0; i + 1 < k; ++i)
      require(m(i, j) == 0, ErrorCode::InvalidArgument, "iota_general: span(X_k..X_n) is not invariant");
  Rational s = 0;
  for (std::size_t j = k - 1; j < n; ++j) s += m(j, j);
  return s;
}

/// f(t) = ((n-3)n - (t-3)(t-2)) / (2(n-t+2)); kappa_k = f(k).
inline Rational kappa(std::size_t n, std::size_t t) {
  using detail::lint;
  return (lint((n - 3) * n) - lint((t - 3) * (t - 2))) / lint(2 * (n - t + 2));
}

struct CriticalIndex {
  std::size_t p = 0;
  std::size_t l = 0;
  Rational f_p;
  Rational f_p1;
  Rational kappa_max;
  Rational kappa_min;
};

/// p = floor(n + 2 - sqrt(2n)), found as n + 2 - ceil(sqrt(2n)) with integer arithmetic;
/// l is whichever of p, p+1 has the larger f (the smaller one on a tie).
inline CriticalIndex critical_l(std::size_t n) {
  detail::require_qn_dim(n);
  std::size_t q = 0;
  while (q * q < 2 * n) ++q;
  CriticalIndex c;
  c.p = n + 2 - q;
  c.f_p = kappa(n, c.p);
  c.f_p1 = kappa(n, c.p + 1);
  c.l = c.f_p >= c.f_p1 ? c.p : c.p + 1;
  c.kappa_max = kappa(n, c.l);
  c.kappa_min = detail::lint(n - 3) / 2;
  return c;
}

struct IotaProfile {
  std::size_t n = 0;
  std::map<std::size_t, Rational> values;  // k = 3..n
  Rational T;
};

inline IotaProfile iota_profile(std::size_t n, const Rational& a, const Rational& d) {
  IotaProfile p;
  p.n = n;
  for (std::size_t k = 3; k <= n; ++k) p.values[k] = iota_Qn(n, a, d, k);
  p.T = trace_T(n, a, d);
  return p;
}

struct Decision {
  bool answer = false;
  char case_tag = 'b';  // 'a': L_n, 'b': Q_n one-dimensional, 'c': everything else
  bool sign_flipped = false;
  std::vector<std::pair<std::string, Rational>> witness;
  RationalVector witness_diagonal;     // case (c): positive-eigenvalue combination
  RationalVector witness_coefficients; // case (c): its coefficients over the given derivations
  std::optional<std::size_t> l;
  Rational T;
  std::string reason;
};

inline nlohmann::json to_json(const Decision& d) {
  nlohmann::json w = nlohmann::json::object();
  for (const auto& [name, v] : d.witness) w[name] = to_string(v);
  nlohmann::json j = {{"answer", d.answer ? "yes" : "no"},
                      {"case", std::string(1, d.case_tag)},
                      {"sign_flipped", d.sign_flipped},
                      {"T", to_string(d.T)},
                      {"witness", w},
                      {"reason", d.reason}};
  if (d.l) j["l"] = *d.l;
  auto strs = [](const RationalVector& v) {
    std::vector<std::string> out;
    for (const auto& x : v) out.push_back(to_string(x));
    return out;
  };
  if (!d.witness_diagonal.empty()) j["witness_diagonal"] = strs(d.witness_diagonal);
  if (!d.witness_coefficients.empty()) j["witness_coefficients"] = strs(d.witness_coefficients);
  return j;
}

/// For n = 3 (the Heisenberg algebra) the ideal span(X_2, X_3) is not characteristic: swapping
/// X_1 and X_2 is an automorphism, so the trace over span(X_1, X_3), iota_1 = 4 alpha + beta,
/// must be positive as well for the answer to be basis-independent.
inline Decision decide_Ln(std::size_t n, const Rational& alpha, const Rational& beta) {
  require(n >= 3, ErrorCode::InvalidArgument, "decide_Ln: n must be at least 3");
  require(alpha != 0 || beta != 0, ErrorCode::NilpotentExtension,
          "derivation is nilpotent (alpha = beta = 0): the nilradical would grow; extension not admissible");
  auto forms = [&](const Rational& sa, const Rational& sb) {
    std::vector<std::pair<std::string, Rational>> w{{"iota_2", iota2_Ln(n, sa, sb)}, {"iota_n", iotan_Ln(n, sa, sb)}};
    if (n == 3) w.emplace_back("iota_1", 4 * sa + sb);
    return w;
  };
  Decision dec;
  dec.case_tag = 'a';
  const Rational t = alpha + iota2_Ln(n, alpha, beta);
  dec.T = t;
  if (t == 0) {
    dec.witness = forms(alpha, beta);
    dec.reason = "unimodular: T = 0 for both signs";
    return dec;
  }
  for (int s : {1, -1}) {
    auto w = forms(s * alpha, s * beta);
    if (std::all_of(w.begin(), w.end(), [](const auto& f) { return f.second > 0; })) {
      dec.answer = true;
      dec.sign_flipped = s < 0;
      dec.T = s * t;
      dec.witness = std::move(w);
      return dec;
    }
  }
  const int s = t > 0 ? 1 : -1;
  dec.sign_flipped = s < 0;
  dec.T = s * t;
  dec.witness = forms(s * alpha, s * beta);
  for (const auto& [name, value] : dec.witness)
    if (value <= 0) {
      dec.reason = name + " = " + to_string(value) + " is not positive";
      break;
    }
  return dec;
}

inline Decision decide_Qn(std::size_t n, const Rational& a, const Rational& d) {
  require(n >= 4 && n % 2 == 0, ErrorCode::InvalidArgument, "decide_Qn: n must be even and at least 4");
  require(a != 0 || d != 0, ErrorCode::NilpotentExtension,
          "derivation is nilpotent (a = d = 0): the nilradical would grow; extension not admissible");
  if (n == 4) {
    // Q_4 is L_4 in the basis (-X_2, X_1, X_3, X_4); the eigenvalues (d, a, a+d, a+2d) read alpha = d, beta = a - 2d.
    Decision dec = decide_Ln(4, d, a - 2 * d);
    dec.reason = dec.reason.empty() ? "Q_4 decided as L_4" : "Q_4 decided as L_4: " + dec.reason;
    return dec;
  }
  const auto crit = critical_l(n);
  const std::size_t m = n / 2;
  Decision dec;
  dec.case_tag = 'b';
  dec.l = crit.l;
  const Rational t = trace_T(n, a, d);
  auto binding = [&](int s) {
    return std::vector<std::pair<std::string, Rational>>{
        {"iota_" + std::to_string(crit.l), iota_Qn(n, s * a, s * d, crit.l)}, {"iota_" + std::to_string(n), iota_Qn(n, s * a, s * d, n)}};
  };
  if (t == 0) {
    dec.T = 0;
    dec.witness = binding(1);
    dec.reason = "unimodular: T = 0 for both signs";
    return dec;
  }
  for (int s : {1, -1}) {
    const Rational sa = s * a, sd = s * d;
    if (iota_Qn(n, sa, sd, crit.l) > 0 && iota_Qn(n, sa, sd, n) > 0) {
      for (std::size_t k = m + 1; k <= n; ++k)
        if (iota_Qn(n, sa, sd, k) <= 0) throw std::logic_error("decide_Qn: iota_l, iota_n > 0 but iota_k <= 0");
      if (trace_T(n, sa, sd) <= 0) throw std::logic_error("decide_Qn: iota_l, iota_n > 0 but T <= 0");
      dec.answer = true;
      dec.sign_flipped = s < 0;
      dec.T = s * t;
      dec.witness = binding(s);
      return dec;
    }
  }
  const int s = t > 0 ? 1 : -1;
  dec.sign_flipped = s < 0;
  dec.T = s * t;
  dec.witness = binding(s);
  for (const auto& [name, v] : dec.witness)
    if (v <= 0) {
      dec.reason = name + " = " + to_string(v) + " is not positive";
      break;
    }
  return dec;
}

/// Decision for g = span(Y_1..Y_r) + nil with ad_{Y_s}|nil = ders[s]. Derivations must be
/// lower-triangular in the given basis, so that a combination is nilpotent exactly when its
/// diagonal vanishes. The commuting-extension hypothesis is trusted, not checked.
inline Decision decide_extension(const LieAlgebra& nil, const std::vector<DerivationMatrix>& ders) {
  require(!ders.empty(), ErrorCode::InvalidArgument, "decide_extension: at least one derivation is required");
  require(is_nilpotent(nil) && is_filiform(nil), ErrorCode::InvalidArgument, "decide_extension: nilradical must be filiform");
  const std::size_t n = nil.dim(), r = ders.size();
  for (const auto& d : ders) {
    require(d.dim() == n, ErrorCode::DimensionMismatch, "decide_extension: derivation has wrong size");
    require(is_derivation(nil, d.matrix()), ErrorCode::NotDerivation, "decide_extension: matrix is not a derivation");
    require(d.matrix().is_lower_triangular(), ErrorCode::InvalidArgument,
            "decide_extension: derivations must be lower-triangular in the algebra basis");
  }

  if (n == 4 && is_Qn(nil)) {
    const RationalMatrix p = q4_to_l4_map(), pinv = inverse(p);
    const LieAlgebra l4 = change_basis(nil, p);
    std::vector<DerivationMatrix> moved;
    for (const auto& d : ders) moved.emplace_back(l4, pinv * d.matrix() * p);
    Decision dec = decide_extension(l4, moved);
    dec.reason = dec.reason.empty() ? "Q_4 decided as L_4" : "Q_4 decided as L_4: " + dec.reason;
    return dec;
  }

  RationalMatrix diag(n, r);
  for (std::size_t s = 0; s < r; ++s)
    for (std::size_t i = 0; i < n; ++i) diag(i, s) = ders[s].matrix()(i, i);
  require(rank(diag) == r, ErrorCode::NilpotentExtension,
          "a nonzero combination of the derivations is nilpotent: the nilradical would grow");

  const bool ln = is_Ln(nil), qn = is_Qn(nil);
  if (r == 1 && (ln || qn)) {
    const Rational d1 = diag(0, 0), d2 = diag(1, 0);
    if (qn) {
      require(diag.column(0) == qn_eigenvalues(n, d1, d2), ErrorCode::InvalidArgument,
              "decide_extension: diagonal is not of the Q_n torus form");
      return decide_Qn(n, d1, d2);
    }
    const Rational beta = d2 - 2 * d1;
    require(diag.column(0) == ln_eigenvalues(n, d1, beta), ErrorCode::InvalidArgument,
            "decide_extension: diagonal is not of the L_n torus form");
    return decide_Ln(n, d1, beta);
  }

  Decision dec;
  dec.case_tag = 'c';
  RationalVector target;
  if (ln || qn) {
    target = qn ? qn_eigenvalues(n, 1, 1) : ln_eigenvalues(n, 1, 0);
  } else if (r == 1) {
    const auto col = diag.column(0);
    const bool pos = std::all_of(col.begin(), col.end(), [](const Rational& x) { return x > 0; });
    const bool neg = std::all_of(col.begin(), col.end(), [](const Rational& x) { return x < 0; });
    require(pos || neg, ErrorCode::InvalidArgument,
            "decide_extension: mixed-sign eigenvalues on a rank-one nilradical; the basis is not torus-adapted");
    target = col;
    if (neg)
      for (auto& x : target) x = -x;
  } else {
    throw Error(ErrorCode::InvalidArgument,
                "decide_extension: multi-dimensional extension of a non-catalog presentation; rewrite it in the L_n or Q_n basis");
  }
  const auto coeffs = solve(diag, target);
  require(coeffs.has_value(), ErrorCode::InvalidArgument,
          "decide_extension: no combination of the derivations has the expected positive diagonal");
  dec.answer = true;
  dec.witness_coefficients = *coeffs;
  dec.witness_diagonal = target;
  dec.sign_flipped = !coeffs->empty() && r == 1 && (*coeffs)[0] < 0;
  for (const auto& x : target) dec.T += x;
  dec.reason = "a combination with all eigenvalues positive exists";
  return dec;
}

struct System18 {
  RationalVector w;  // w_1..w_{n-2}
  RationalVector y;  // y_1..y_{m-2}
  Rational z1, z2;
  Rational z1_closed, z2_closed;
};

/// Coefficient of y_j in the iota_k equation: -1 when k <= j+2, +1 when k >= n-j, else 0.
inline int system18_sign(std::size_t n, std::size_t k, std::size_t j) {
  if (k <= j + 2) return -1;
  if (k + j >= n) return 1;
  return 0;
}

/// y_j = (1/2) min_k iota_k / (m-1) over k = 3..n; requires every iota_k > 0.
inline RationalVector default_y(std::size_t n, const Rational& a, const Rational& d) {
  detail::require_qn_dim(n);
  const std::size_t m = n / 2;
  Rational lo = iota_Qn(n, a, d, 3);
  for (std::size_t k = 4; k <= n; ++k) lo = std::min(lo, iota_Qn(n, a, d, k));
  require(lo > 0, ErrorCode::Infeasible, "default_y: some iota_k is not positive");
  return RationalVector(m - 2, lo / (2 * detail::lint(m - 1)));
}

/// Solves a V_1 + d V_2 = sum w_i F_i + sum y_j F_{n-2+j} + z_1 E_1 + z_2 E_2 for w, z given y.
inline System18 solve_system18(std::size_t n, const Rational& a, const Rational& d, const RationalVector& y) {
  detail::require_qn_dim(n);
  const std::size_t m = n / 2;
  require(y.size() == m - 2, ErrorCode::DimensionMismatch, "solve_system18: y must have length m-2");
  for (const auto& v : y) require(v > 0, ErrorCode::InvalidArgument, "solve_system18: y must be strictly positive");
  System18 s;
  s.y = y;
  s.w.resize(n - 2);
  std::vector<std::size_t> bad;
  for (std::size_t k = 3; k <= n; ++k) {
    Rational w = iota_Qn(n, a, d, k);
    for (std::size_t j = 1; j + 2 <= m; ++j) w -= system18_sign(n, k, j) * y[j - 1];
    s.w[k - 3] = w;
    if (w <= 0) bad.push_back(k - 2);
  }
  if (!bad.empty()) {
    std::string list;
    for (auto i : bad) list += (list.empty() ? "w_" : ", w_") + std::to_string(i) + " = " + to_string(s.w[i - 1]);
    throw Error(ErrorCode::Infeasible, "solve_system18: y too large (" + list + "); choose smaller y");
  }
  s.z1 = a;
  for (std::size_t i = 1; i <= n - 3; ++i) s.z1 += s.w[i - 1];
  s.z2 = d + s.w[0] + s.w[n - 3];

  using detail::lint;
  const Rational in = iota_Qn(n, a, d, n), in1 = iota_Qn(n, a, d, n - 1);
  s.z2_closed = lint(m + 1) * in;
  s.z1_closed = (lint(n * n * n + 11 * n + 6) - lint(6 * n * n)) / lint(6 * (n - 3)) * in1 +
                (lint(n * n + 6) - lint(7 * n)) / lint(2 * (n - 3)) * in;

  const auto cone = cone_vectors_Qn(n);
  RationalVector lhs(n), rhs(n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) lhs[i] = a * cone.V1[i] + d * cone.V2[i];
  for (std::size_t i = 0; i < n - 2; ++i)
    for (std::size_t c = 0; c < n; ++c) rhs[c] += s.w[i] * cone.F[i][c];
  for (std::size_t j = 0; j + 2 < m; ++j)
    for (std::size_t c = 0; c < n; ++c) rhs[c] += s.y[j] * cone.F[n - 2 + j][c];
  rhs[0] += s.z1;
  rhs[1] += s.z2;
  if (lhs != rhs) throw std::logic_error("solve_system18: nonzero residual");
  return s;
}

}  // namespace negric
