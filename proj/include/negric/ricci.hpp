#pragma once

// Ricci operators of left-invariant metrics, computed from structure
// constants and a Gram matrix. Everything here is double precision; the
// algebra itself stays exact and is converted on entry.

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "negric/derivations.hpp"
#include "negric/error.hpp"
#include "negric/lie_algebra.hpp"
#include "negric/rational.hpp"

namespace negric {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd to_eigen(const RationalMatrix& m) {
  MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
  return out;
}

/// Adjoint matrices ad_{X_i} in double precision.
inline std::vector<MatrixXd> ad_matrices(const LieAlgebra& g) {
  std::vector<MatrixXd> ads;
  ads.reserve(g.dim());
  for (std::size_t i = 0; i < g.dim(); ++i) ads.push_back(to_eigen(ad_matrix(g, i)));
  return ads;
}

/// Max row sum of absolute values.
inline double inf_norm(const MatrixXd& m) { return m.rows() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff(); }

inline void require_positive_definite(const MatrixXd& gram, std::size_t n) {
  require(gram.rows() == static_cast<Eigen::Index>(n) && gram.cols() == static_cast<Eigen::Index>(n),
          ErrorCode::DimensionMismatch, "gram matrix has wrong size");
  require(gram.allFinite(), ErrorCode::InvalidArgument, "gram matrix has non-finite entries");
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  require((gram - gram.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * scale, ErrorCode::InvalidArgument,
          "gram matrix is not symmetric");
  Eigen::LLT<MatrixXd> llt(gram);
  require(llt.info() == Eigen::Success, ErrorCode::InvalidArgument, "gram matrix is not positive definite");
}

/// Orthonormalizes basis[n-1], basis[n-2], ..., basis[0] (columns) in that order, so
/// column i of the result lies in span(basis_i, ..., basis_{n-1}).
inline MatrixXd gram_schmidt_descending(const MatrixXd& basis, const MatrixXd& gram) {
  const Eigen::Index n = basis.cols();
  require(basis.rows() == gram.rows() && gram.rows() == gram.cols(), ErrorCode::DimensionMismatch,
          "gram_schmidt_descending: size mismatch");
  MatrixXd e(basis.rows(), n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    VectorXd v = basis.col(i);
    const double original = std::sqrt(std::max(0.0, v.dot(gram * v)));
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index j = i + 1; j < n; ++j) v -= e.col(j) * e.col(j).dot(gram * v);
    const double norm2 = v.dot(gram * v);
    require(norm2 > 0 && std::sqrt(norm2) > 1e-12 * original, ErrorCode::Singular,
            "gram_schmidt_descending: basis is linearly dependent");
    e.col(i) = v / std::sqrt(norm2);
  }
  return e;
}

/// Descending Gram-Schmidt of the coordinate basis: a lower-triangular frame F with F^t G F = I.
inline MatrixXd flag_frame(const MatrixXd& gram) {
  return gram_schmidt_descending(MatrixXd::Identity(gram.rows(), gram.cols()), gram);
}

class MetricLieAlgebra {
 public:
  MetricLieAlgebra(LieAlgebra alg, MatrixXd gram) : alg_(std::move(alg)), gram_(std::move(gram)) {
    require_positive_definite(gram_, alg_.dim());
  }

  const LieAlgebra& algebra() const { return alg_; }
  const MatrixXd& gram() const { return gram_; }
  std::size_t dim() const { return alg_.dim(); }

 private:
  LieAlgebra alg_;
  MatrixXd gram_;
};

/// ad_{E_i} in the frame: F^{-1} (sum_k F(k,i) ad_k) F for each frame vector.
inline std::vector<MatrixXd> frame_adjoints(const std::vector<MatrixXd>& ads, const MatrixXd& frame) {
  const Eigen::Index n = frame.cols();
  const MatrixXd finv = frame.inverse();
  std::vector<MatrixXd> out;
  out.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    MatrixXd ad = MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
      if (frame(k, i) != 0.0) ad += frame(k, i) * ads[k];
    out.push_back(finv * ad * frame);
  }
  return out;
}

/// Ric = -1/2 sum ad_i^t ad_i + 1/4 sum ad_i ad_i^t - 1/2 B - (ad_H)^s, in the given orthonormal frame.
inline MatrixXd ricci_in_frame(const LieAlgebra& g, const MatrixXd& frame) {
  const Eigen::Index n = static_cast<Eigen::Index>(g.dim());
  const auto ade = frame_adjoints(ad_matrices(g), frame);
  MatrixXd ric = MatrixXd::Zero(n, n);
  MatrixXd killing(n, n);
  VectorXd h(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ric += -0.5 * ade[i].transpose() * ade[i] + 0.25 * ade[i] * ade[i].transpose();
    h(i) = ade[i].trace();
    for (Eigen::Index j = 0; j <= i; ++j) killing(i, j) = killing(j, i) = (ade[i] * ade[j]).trace();
  }
  MatrixXd adh = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) adh += h(i) * ade[i];
  ric -= 0.5 * killing + 0.5 * (adh + adh.transpose());
  return 0.5 * (ric + ric.transpose());
}

/// General Ricci operator in the descending flag frame of the metric.
inline MatrixXd ricci_operator_general(const MetricLieAlgebra& m) {
  return ricci_in_frame(m.algebra(), flag_frame(m.gram()));
}

/// c(i,j,k) = <[e_i, e_j], e_k> for an orthonormal frame; stored as c[i](k, j).
inline std::vector<MatrixXd> frame_structure(const LieAlgebra& g, const MatrixXd& frame) {
  return frame_adjoints(ad_matrices(g), frame);
}

/// Ric^n from the two-sum formula for nilpotent algebras, in the given orthonormal frame.
inline MatrixXd ricci_nilpotent_in_frame(const LieAlgebra& nil, const MatrixXd& frame) {
  require(is_nilpotent(nil), ErrorCode::NotNilpotent, "ricci_nilpotent: algebra is not nilpotent");
  const Eigen::Index n = static_cast<Eigen::Index>(nil.dim());
  const auto c = frame_structure(nil, frame);
  MatrixXd ric = MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = 0; l <= k; ++l) {
      double s = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) s += 0.25 * c[i](k, j) * c[i](l, j) - 0.5 * c[k](j, i) * c[l](j, i);
      ric(k, l) = ric(l, k) = s;
    }
  return ric;
}

inline MatrixXd ricci_nilpotent(const LieAlgebra& nil, const MatrixXd& gram) {
  require_positive_definite(gram, nil.dim());
  return ricci_nilpotent_in_frame(nil, flag_frame(gram));
}

/// -1/4 sum_{i,j} |[e_i, e_j]|^2 in an orthonormal frame.
inline double bracket_energy(const LieAlgebra& g, const MatrixXd& frame) {
  double s = 0;
  for (const auto& ad : frame_structure(g, frame)) s += ad.squaredNorm();
  return -0.25 * s;
}

/// One-dimensional extension R f + n with [f, X] = D X, f a unit vector orthogonal to n.
class ExtensionMetric {
 public:
  ExtensionMetric(LieAlgebra nil, DerivationMatrix d, MatrixXd nil_gram)
      : nil_(std::move(nil)), d_(std::move(d)), gram_(std::move(nil_gram)) {
    require(d_.dim() == nil_.dim(), ErrorCode::DimensionMismatch, "ExtensionMetric: derivation has wrong size");
    require(is_derivation(nil_, d_.matrix()), ErrorCode::NotDerivation, "ExtensionMetric: not a derivation");
    require_positive_definite(gram_, nil_.dim());
  }

  const LieAlgebra& nil() const { return nil_; }
  const DerivationMatrix& derivation() const { return d_; }
  const MatrixXd& nil_gram() const { return gram_; }
  Rational trace() const { return d_.trace(); }
  bool unimodular() const { return d_.trace() == 0; }

  /// Flattened algebra in the basis (Y, X_1, ..., X_n).
  LieAlgebra flattened() const { return solvable_extension(nil_, {d_}); }

  /// Gram matrix of the flattened algebra: f = Y is a unit vector orthogonal to n.
  MatrixXd flattened_gram() const {
    const Eigen::Index n = gram_.rows();
    MatrixXd g = MatrixXd::Zero(n + 1, n + 1);
    g(0, 0) = 1.0;
    g.bottomRightCorner(n, n) = gram_;
    return g;
  }

 private:
  LieAlgebra nil_;
  DerivationMatrix d_;
  MatrixXd gram_;
};

/// Scale-relative strict negativity: max eigenvalue < -1e-9 max(1, |Ric|_inf).
struct Definiteness {
  VectorXd eigenvalues;
  double tolerance = 0;
  bool negative_definite = false;
};

inline Definiteness assess_negativity(const MatrixXd& ric) {
  Definiteness out;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(ric, Eigen::EigenvaluesOnly);
  out.eigenvalues = es.eigenvalues();
  out.tolerance = 1e-9 * std::max(1.0, inf_norm(ric));
  out.negative_definite = ric.rows() > 0 && out.eigenvalues.maxCoeff() < -out.tolerance;
  return out;
}

struct RicciReport {
  MatrixXd R1;
  VectorXd R2;
  double r3 = 0;
  MatrixXd full;  // [[R1, R2], [R2^t, r3]], f last
  VectorXd eigenvalues;
  double tolerance = 0;
  bool negative_definite = false;
};

inline RicciReport ricci_blocks(const ExtensionMetric& ext) {
  const LieAlgebra& nil = ext.nil();
  const Eigen::Index n = static_cast<Eigen::Index>(nil.dim());
  const MatrixXd frame = flag_frame(ext.nil_gram());
  const MatrixXd a = frame.inverse() * to_eigen(ext.derivation().matrix()) * frame;
  const MatrixXd as = 0.5 * (a + a.transpose());
  const double t = a.trace();
  const auto c = frame_structure(nil, frame);

  RicciReport r;
  r.R1 = ricci_nilpotent_in_frame(nil, frame) + 0.5 * (a * a.transpose() - a.transpose() * a) - t * as;
  r.R1 = 0.5 * (r.R1 + r.R1.transpose());
  r.R2 = VectorXd::Zero(n);
  // <[f, e_i], [e_i, e_j]> with [f, e_i] = A e_i and [e_i, e_j] = c[i].col(j)
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) r.R2(j) += 0.5 * a.col(i).dot(c[i].col(j));
  r.r3 = -(as * as).trace();
  r.full.resize(n + 1, n + 1);
  r.full.topLeftCorner(n, n) = r.R1;
  r.full.topRightCorner(n, 1) = r.R2;
  r.full.bottomLeftCorner(1, n) = r.R2.transpose();
  r.full(n, n) = r.r3;
  const auto def = assess_negativity(r.full);
  r.eigenvalues = def.eigenvalues;
  r.tolerance = def.tolerance;
  r.negative_definite = def.negative_definite;
  return r;
}

/// Moves the first basis vector to the end: (f, e_1..e_n) ordering to (e_1..e_n, f).
inline MatrixXd move_first_to_last(const MatrixXd& m) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXi perm(n);
  for (Eigen::Index i = 0; i < n; ++i) perm(i) = static_cast<int>((i + n - 1) % n);
  Eigen::PermutationMatrix<Eigen::Dynamic> p(perm);
  return p * m * p.transpose();
}

struct TraceBound {
  double lhs = 0;  // Tr pi_k R_1
  double rhs = 0;  // -T iota_k
};

/// Tr of R_1 over span(e_k, ..., e_n) against -T iota_k, k 1-based. Requires a lower-triangular
/// derivation with positive trace, so that the flag frame keeps it triangular.
/// The report must be ricci_blocks(ext); passing it avoids recomputing R_1 for every k.
inline TraceBound necessity_trace_bound(const ExtensionMetric& ext, const RicciReport& rep, std::size_t k) {
  const std::size_t n = ext.nil().dim();
  require(n >= 6 && n % 2 == 0, ErrorCode::InvalidArgument, "necessity_trace_bound: nilradical must be Q_n, n >= 6");
  require(k >= n / 2 + 1 && k <= n, ErrorCode::InvalidArgument, "necessity_trace_bound: k must lie in m+1..n");
  require(ext.trace() > 0, ErrorCode::InvalidArgument, "necessity_trace_bound: requires T > 0");
  require(ext.derivation().matrix().is_lower_triangular(), ErrorCode::InvalidArgument,
          "necessity_trace_bound: derivation must be lower-triangular in the algebra basis");
  require(rep.R1.rows() == static_cast<Eigen::Index>(n), ErrorCode::DimensionMismatch,
          "necessity_trace_bound: report has wrong size");
  Rational iota = 0;
  for (std::size_t j = k - 1; j < n; ++j) iota += ext.derivation().matrix()(j, j);
  TraceBound b;
  for (std::size_t j = k - 1; j < n; ++j) b.lhs += rep.R1(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
  b.rhs = -to_double(ext.trace()) * to_double(iota);
  return b;
}

inline TraceBound necessity_trace_bound(const ExtensionMetric& ext, std::size_t k) {
  return necessity_trace_bound(ext, ricci_blocks(ext), k);
}

/// Seeded random metric L^t L with L unit lower-triangular, off-diagonal entries uniform in
/// [-1, 1]; with log_spread > 0 the result is further scaled by diag(e^{u_i}), u_i uniform in
/// [-log_spread, log_spread].
inline MatrixXd sample_gram(std::size_t n, std::uint64_t seed, double log_spread = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> off(-1.0, 1.0);
  MatrixXd l = MatrixXd::Identity(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) l(i, j) = off(rng);
  MatrixXd g = l.transpose() * l;
  if (log_spread > 0) {
    std::uniform_real_distribution<double> u(-log_spread, log_spread);
    VectorXd s(n);
    for (std::size_t i = 0; i < n; ++i) s(i) = std::exp(u(rng));
    g = s.asDiagonal() * g * s.asDiagonal();
  }
  return 0.5 * (g + g.transpose());
}

inline nlohmann::json to_json(const MatrixXd& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json to_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline nlohmann::json to_json(const RicciReport& r) {
  return {{"R1", to_json(r.R1)},
          {"R2", to_json(r.R2)},
          {"r3", r.r3},
          {"eigenvalues", to_json(r.eigenvalues)},
          {"negative_definite", r.negative_definite},
          {"tolerance", r.tolerance}};
}

inline MatrixXd matrix_from_json_double(const nlohmann::json& j) {
  require(j.is_array() && !j.empty(), ErrorCode::Parse, "matrix JSON must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size()), cols = static_cast<Eigen::Index>(j.front().size());
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    require(j[r].is_array() && static_cast<Eigen::Index>(j[r].size()) == cols, ErrorCode::Parse,
            "matrix rows must have equal length");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& x = j[r][c];
      m(r, c) = x.is_string() ? to_double(parse_rational(x.get<std::string>())) : x.get<double>();
    }
  }
  return m;
}

}  // namespace negric
