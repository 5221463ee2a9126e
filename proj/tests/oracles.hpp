#pragma once

// Reference computations used only by the tests. They are written directly from the
// definitions and share no code path with the library's Ricci or eigenvalue routines.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "negric/lie_algebra.hpp"

namespace negric::oracle {

/// Dense structure constants c[i][j][k] of [X_i, X_j] = sum_k c_ijk X_k.
inline std::vector<std::vector<std::vector<double>>> constants(const LieAlgebra& g) {
  const std::size_t n = g.dim();
  std::vector<std::vector<std::vector<double>>> c(n, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) c[i][j][k] = g.table().coefficient(i, j, k).get_d();
  return c;
}

/// An orthonormal frame from the Cholesky factor: G = L L^t, columns of L^{-t}.
inline Eigen::MatrixXd cholesky_frame(const Eigen::MatrixXd& gram) {
  const Eigen::MatrixXd l = gram.llt().matrixL();
  return l.transpose().inverse();
}

/// Ricci form in the given orthonormal frame, from
///   ric(x, y) = -1/2 sum_i <[x,e_i],[y,e_i]> + 1/4 sum_{i,j} <[e_i,e_j],x><[e_i,e_j],y>
///               - 1/2 B(x, y) - 1/2 (<[H,x],y> + <[H,y],x>),   <H, z> = Tr ad_z.
inline Eigen::MatrixXd ricci(const LieAlgebra& g, const Eigen::MatrixXd& gram, const Eigen::MatrixXd& frame) {
  const std::size_t n = g.dim();
  const auto c = constants(g);
  auto br = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double s = u(static_cast<Eigen::Index>(i)) * v(static_cast<Eigen::Index>(j));
        if (s == 0.0) continue;
        for (std::size_t k = 0; k < n; ++k) w(static_cast<Eigen::Index>(k)) += s * c[i][j][k];
      }
    return w;
  };
  auto ip = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) { return u.dot(gram * v); };
  auto ad = [&](const Eigen::VectorXd& u) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) m.col(static_cast<Eigen::Index>(j)) = br(u, Eigen::VectorXd::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)));
    return m;
  };

  std::vector<Eigen::VectorXd> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = frame.col(static_cast<Eigen::Index>(i));
  Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) h += ad(e[i]).trace() * e[i];

  Eigen::MatrixXd r(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s -= 0.5 * ip(br(e[a], e[i]), br(e[b], e[i]));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const Eigen::VectorXd z = br(e[i], e[j]);
          s += 0.25 * ip(z, e[a]) * ip(z, e[b]);
        }
      s -= 0.5 * (ad(e[a]) * ad(e[b])).trace();
      s -= 0.5 * (ip(br(h, e[a]), e[b]) + ip(br(h, e[b]), e[a]));
      r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s;
      r(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = s;
    }
  return r;
}

inline Eigen::MatrixXd ricci(const LieAlgebra& g, const Eigen::MatrixXd& gram) {
  return ricci(g, gram, cholesky_frame(gram));
}

/// Cyclic Jacobi rotations; eigenvalues in ascending order.
inline Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXd a, int sweeps = 100) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double off = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double cs = 1 / std::sqrt(t * t + 1), sn = t * cs;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = cs * akp - sn * akq;
          a(k, q) = sn * akp + cs * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = cs * apk - sn * aqk;
          a(q, k) = sn * apk + cs * aqk;
        }
      }
  }
  Eigen::VectorXd ev = a.diagonal();
  std::sort(ev.data(), ev.data() + n);
  return ev;
}

}  // namespace negric::oracle
