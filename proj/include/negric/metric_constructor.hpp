#pragma once

// Explicit metrics of negative Ricci curvature on one-dimensional extensions of L_n and Q_n.
// A diagonal metric e_i = exp(-x_i) X_i on the diagonal limit algebra is found by cone
// feasibility; a strictly lower part of the derivation is then damped by the rescaling
// X_i -> exp(s N_i) X_i along the positive derivation N, and every claimed metric is
// re-certified from the general Ricci formula.

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "negric/algebra_io.hpp"
#include "negric/cone_solver.hpp"
#include "negric/cone_vectors.hpp"
#include "negric/criterion.hpp"
#include "negric/derivations.hpp"
#include "negric/error.hpp"
#include "negric/filiform.hpp"
#include "negric/ricci.hpp"

namespace negric {

struct Certificate {
  MatrixXd ricci;
  VectorXd eigenvalues;
  double tolerance = 0;
  bool negative_definite = false;
};

/// Recomputes Ric from the general formula (never the block shortcut) and judges it.
inline Certificate certify(const MetricLieAlgebra& m) {
  Certificate c;
  c.ricci = ricci_operator_general(m);
  const auto d = assess_negativity(c.ricci);
  c.eigenvalues = d.eigenvalues;
  c.tolerance = d.tolerance;
  c.negative_definite = d.negative_definite;
  return c;
}

inline nlohmann::json to_json(const Certificate& c) {
  return {{"eigenvalues", to_json(c.eigenvalues)},
          {"tolerance", c.tolerance},
          {"negative_definite", c.negative_definite},
          {"max_eigenvalue", c.eigenvalues.size() ? c.eigenvalues.maxCoeff() : 0.0}};
}

/// Diagonal of the positive derivation used for degeneration: phi_1 of the family.
inline VectorXd degeneration_weights(const LieAlgebra& nil) {
  const auto n = static_cast<Eigen::Index>(nil.dim());
  VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = static_cast<double>(i + 1);
  if (is_Qn(nil)) w(n - 1) = static_cast<double>(n + 1);
  return w;
}

/// Gram diag(1, exp(2(x_i - s N_i))) on the flattened extension in the basis (Y, X_1..X_n).
inline MetricLieAlgebra assemble_metric(const LieAlgebra& nil, const DerivationMatrix& d, const VectorXd& x, double s) {
  const auto n = static_cast<Eigen::Index>(nil.dim());
  require(x.size() == n, ErrorCode::DimensionMismatch, "assemble_metric: x has wrong length");
  require(s >= 0, ErrorCode::InvalidArgument, "assemble_metric: s must be non-negative");
  const VectorXd w = degeneration_weights(nil);
  MatrixXd gram = MatrixXd::Zero(n + 1, n + 1);
  gram(0, 0) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) gram(i + 1, i + 1) = std::exp(2.0 * (x(i) - s * w(i)));
  return MetricLieAlgebra(solvable_extension(nil, {d}), gram);
}

/// Cone problem for the diagonal limit: vectors 2F with weight 1/4 and target T * lambda, so
/// that the slack equals -R_1 on the diagonal limit algebra.
inline ConeProblem diagonal_cone_problem(const ConeData& cone, const RationalVector& lambda) {
  const auto n = static_cast<Eigen::Index>(cone.n);
  ConeProblem p;
  p.dim = cone.n;
  Rational t = 0;
  for (const auto& l : lambda) t += l;
  p.target.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) p.target(i) = to_double(t * lambda[static_cast<std::size_t>(i)]);
  for (const auto& f : cone.F) {
    VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = 2.0 * to_double(f[static_cast<std::size_t>(i)]);
    p.vectors.push_back(v);
    p.coefficients.push_back(0.25);
  }
  p.slack = true;
  return p;
}

struct ConstructedMetric {
  Family family = Family::Q;
  std::size_t n = 0;
  Rational a, d;
  Decision decision;
  LieAlgebra algebra;     // flattened extension, basis (Y, X_1..X_n), with the given derivation
  RationalMatrix derivation;
  VectorXd x;
  double s = 0;
  std::vector<double> s_tried;
  MatrixXd gram;          // on (Y, X_1..X_n)
  RicciReport report;     // block form in the working frame
  Certificate certificate;
  ConeResult solver;
  double margin = 0;      // target shift that the solver run achieved
  bool certified = false;
};

struct ConstructOptions {
  std::vector<double> schedule{0, 1, 2, 4, 8, 16, 32, 64};
  double max_log_gram = 600.0;  // largest 2(x_i - s N_i) representable without overflow
  ConeSolverOptions solver;
};

namespace detail {

/// Solves for the target shifted by -delta in every coordinate, trying delta = |u|/2, |u|/4, ...
/// and finally 0. The first success leaves every diagonal R_1 entry at most -delta, which keeps
/// thin-margin targets away from cancellation in the later Ricci evaluation.
inline ConeResult solve_with_margin(const ConeProblem& problem, const std::vector<VectorXd>& gauge,
                                    const ConeSolverOptions& opt, double& margin) {
  const double scale = std::max(1.0, problem.target.cwiseAbs().maxCoeff());
  ConeProblem shifted = problem;
  for (int k = 1; k <= 40; ++k) {
    const double delta = std::ldexp(scale, -k);
    shifted.target = problem.target - VectorXd::Constant(problem.target.size(), delta);
    ConeResult r = solve_feasibility_recentered(shifted, gauge, opt);
    if (r.converged()) {
      margin = delta;
      return r;
    }
  }
  margin = 0;
  return solve_feasibility_recentered(problem, gauge, opt);
}

/// gram on (f, X) from gram on (f, Z) where Z = X P.
inline MatrixXd pull_back_gram(const MatrixXd& gram_z, const RationalMatrix& p) {
  const auto n = static_cast<Eigen::Index>(p.rows());
  MatrixXd full = MatrixXd::Identity(n + 1, n + 1);
  full.bottomRightCorner(n, n) = to_eigen(inverse(p));
  MatrixXd g = full.transpose() * gram_z * full;
  return 0.5 * (g + g.transpose());
}

/// Core run for a lower-triangular derivation whose diagonal has positive trace and passes the
/// criterion. Returns the working-basis gram together with the solver trace.
inline void construct_core(const LieAlgebra& nil, const DerivationMatrix& d, const ConeData& cone,
                           const ConstructOptions& opt, ConstructedMetric& out, MatrixXd& gram_work) {
  const std::size_t n = nil.dim();
  const auto lambda = d.diagonal();
  const ConeProblem problem = diagonal_cone_problem(cone, lambda);
  std::vector<VectorXd> gauge;
  for (const auto* v : {&cone.V1, &cone.V2}) {
    VectorXd g(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) g(static_cast<Eigen::Index>(i)) = to_double((*v)[i]);
    gauge.push_back(g);
  }
  out.solver = solve_with_margin(problem, gauge, opt.solver, out.margin);
  if (!out.solver.converged())
    throw Error(ErrorCode::SearchExhausted,
                "cone solver did not converge (" + to_string(out.solver.status) + ", |grad| = " +
                    std::to_string(out.solver.gradient_norm) + ")");
  const VectorXd slack = cone_slack(problem, out.solver.x);
  if (slack.minCoeff() <= 0) throw Error(ErrorCode::SearchExhausted, "diagonal limit has a non-negative R_1 entry");
  out.x = out.solver.x;

  const bool diagonal = d.matrix().is_diagonal();
  const VectorXd w = degeneration_weights(nil);
  for (double s : opt.schedule) {
    if (diagonal && s > 0) break;
    if (2.0 * (out.x - s * w).maxCoeff() > opt.max_log_gram || 2.0 * (out.x - s * w).minCoeff() < -opt.max_log_gram) break;
    out.s_tried.push_back(s);
    const auto metric = assemble_metric(nil, d, out.x, s);
    MatrixXd nil_gram = metric.gram().bottomRightCorner(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    out.report = ricci_blocks(ExtensionMetric(nil, d, nil_gram));
    if (!out.report.negative_definite) continue;
    const auto cert = certify(metric);
    if (!cert.negative_definite) continue;
    out.s = s;
    gram_work = metric.gram();
    return;
  }
  throw Error(ErrorCode::SearchExhausted, "degeneration search exhausted without a negative-definite certificate");
}

}  // namespace detail

/// Builds and certifies a metric for the extension of the catalog algebra by diag(lambda(a, d))
/// plus an optional strictly lower derivation part. For L_n, (a, d) are (alpha, beta).
/// Refusals (criterion says no) raise ErrorCode::Infeasible or NilpotentExtension; a failed
/// search raises SearchExhausted.
inline ConstructedMetric construct(Family family, std::size_t n, const Rational& a, const Rational& d,
                                   const std::optional<RationalMatrix>& lower = std::nullopt,
                                   const ConstructOptions& opt = {}) {
  const FiliformSpec spec(family, n);
  const LieAlgebra nil = make_algebra(spec);
  ConstructedMetric out;
  out.family = family;
  out.n = n;
  out.a = a;
  out.d = d;
  out.decision = family == Family::Q ? decide_Qn(n, a, d) : decide_Ln(n, a, d);
  if (!out.decision.answer) throw Error(ErrorCode::Infeasible, "criterion refuses: " + out.decision.reason);

  const RationalVector lambda = family == Family::Q ? qn_eigenvalues(n, a, d) : ln_eigenvalues(n, a, d);
  RationalMatrix m = RationalMatrix::diagonal(lambda);
  if (lower) {
    require(lower->rows() == n && lower->cols() == n, ErrorCode::DimensionMismatch, "construct: lower part has wrong size");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        require((*lower)(i, j) == 0, ErrorCode::InvalidArgument, "construct: lower part must be strictly lower-triangular");
    m = m + *lower;
  }
  const DerivationMatrix given(nil, m);
  out.derivation = m;
  out.algebra = solvable_extension(nil, {given});

  // Work with f = -Y when the criterion holds for (-a, -d); the diagonal gram is the same.
  const Rational sign = out.decision.sign_flipped ? -1 : 1;
  RationalMatrix work = sign * m;
  LieAlgebra work_nil = nil;
  RationalMatrix p = RationalMatrix::identity(n);
  ConeData cone;

  if (family == Family::Q && n == 4) {
    p = q4_to_l4_map();
    work_nil = change_basis(nil, p);
    work = inverse(p) * work * p;
    cone = cone_vectors_Ln(4);
  } else if (family == Family::Q) {
    const Rational wa = sign * a, wd = sign * d;
    if (wa != wd) {
      auto bc = eliminate_b(wa, wd, work);
      if (!(change_basis(nil, bc.p) == nil))
        throw Error(ErrorCode::InvalidArgument, "construct: b-elimination changed the Q_n relations");
      p = bc.p;
      work = bc.derived;
    }
    cone = cone_vectors_Qn(n);
  } else {
    cone = cone_vectors_Ln(n);
  }
  require(work.is_lower_triangular(), ErrorCode::InvalidArgument, "construct: derivation is not lower-triangular");

  MatrixXd gram_work;
  detail::construct_core(work_nil, DerivationMatrix(work_nil, work), cone, opt, out, gram_work);
  out.gram = detail::pull_back_gram(gram_work, p);
  out.certificate = certify(MetricLieAlgebra(out.algebra, out.gram));
  out.certified = out.certificate.negative_definite;
  if (!out.certified) throw Error(ErrorCode::SearchExhausted, "metric failed independent re-certification");
  return out;
}

inline nlohmann::json to_json(const ConstructedMetric& m) {
  return {{"family", family_name(m.family)},
          {"n", m.n},
          {"a", to_string(m.a)},
          {"d", to_string(m.d)},
          {"case", std::string(1, m.decision.case_tag)},
          {"sign_flipped", m.decision.sign_flipped},
          {"algebra", algebra_to_json(m.algebra)},
          {"derivation", matrix_to_json(m.derivation)},
          {"basis", "Y,X1..Xn"},
          {"x", to_json(m.x)},
          {"s", m.s},
          {"s_tried", m.s_tried},
          {"gram", to_json(m.gram)},
          {"solver", {{"status", to_string(m.solver.status)}, {"iterations", m.solver.iterations}, {"gradient_norm", m.solver.gradient_norm}, {"margin", m.margin}}},
          {"eigenvalues", to_json(m.certificate.eigenvalues)},
          {"tolerance", m.certificate.tolerance},
          {"certified", m.certified}};
}

/// Reads the algebra and gram of a metric document for independent certification.
inline MetricLieAlgebra metric_from_json(const nlohmann::json& j) {
  require(j.contains("algebra") && j.contains("gram"), ErrorCode::Parse, "metric JSON needs \"algebra\" and \"gram\"");
  return MetricLieAlgebra(algebra_from_json(j.at("algebra")), matrix_from_json_double(j.at("gram")));
}

struct NecessityReport {
  std::size_t samples = 0;
  std::size_t negative_definite_hits = 0;
  std::size_t bound_checks = 0;
  std::size_t bound_failures = 0;
  double min_margin = 0;          // min over samples and k of (lhs - rhs) / max(1, |lhs|, |rhs|)
  double max_block_mismatch = 0;  // general vs block Ricci eigenvalues, relative
};

inline nlohmann::json to_json(const NecessityReport& r) {
  return {{"samples", r.samples},
          {"negative_definite_hits", r.negative_definite_hits},
          {"bound_checks", r.bound_checks},
          {"bound_failures", r.bound_failures},
          {"min_margin", r.min_margin},
          {"max_block_mismatch", r.max_block_mismatch}};
}

/// Random metrics on the extension of Q_n by diag(lambda(a, d)) (+ lower). Each sample picks a
/// random inner product on n and a unit normal f = c(Y + X) with random rational X and c > 0,
/// so ad_f|n = c(D + ad_X) stays lower-triangular. Counts negative-definite Ricci operators
/// (general formula on the flattened algebra) and checks Tr pi_k R_1 >= -T iota_k for
/// k = m+1..n.
inline NecessityReport necessity_test(std::size_t n, const Rational& a, const Rational& d, std::size_t samples,
                                      std::uint64_t seed, const std::optional<RationalMatrix>& lower = std::nullopt) {
  const LieAlgebra nil = make_Qn(n);
  RationalMatrix m = RationalMatrix::diagonal(qn_eigenvalues(n, a, d));
  if (lower) m = m + *lower;
  const DerivationMatrix base(nil, m);
  require(base.trace() != 0, ErrorCode::InvalidArgument, "necessity_test: unimodular extension (T = 0)");
  const LieAlgebra g = solvable_extension(nil, {base});
  const auto ni = static_cast<Eigen::Index>(n);

  NecessityReport r;
  r.samples = samples;
  r.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(s)};
    std::mt19937_64 rng(seq);
    const MatrixXd gram_n = sample_gram(n, rng(), 1.0);
    std::uniform_int_distribution<int> xnum(-2, 2), cnum(1, 4);
    RationalVector xv(n);
    for (auto& v : xv) v = Rational(xnum(rng), 2);
    const Rational c(cnum(rng), 2);

    // Y = f / c - X, with f a unit vector orthogonal to n
    VectorXd xd(ni);
    for (Eigen::Index i = 0; i < ni; ++i) xd(i) = to_double(xv[static_cast<std::size_t>(i)]);
    const double cd = to_double(c);
    MatrixXd full(ni + 1, ni + 1);
    full(0, 0) = 1.0 / (cd * cd) + xd.dot(gram_n * xd);
    full.block(1, 0, ni, 1) = -gram_n * xd;
    full.block(0, 1, 1, ni) = (-gram_n * xd).transpose();
    full.bottomRightCorner(ni, ni) = gram_n;
    const auto cert = certify(MetricLieAlgebra(g, full));
    if (cert.negative_definite) ++r.negative_definite_hits;

    RationalMatrix df = c * (m + ad_matrix(nil, xv));
    if (df.trace() < 0) df = Rational(-1) * df;
    const ExtensionMetric ext(nil, DerivationMatrix(nil, df), gram_n);
    const auto rep = ricci_blocks(ext);
    const double scale = std::max(1.0, cert.eigenvalues.cwiseAbs().maxCoeff());
    r.max_block_mismatch =
        std::max(r.max_block_mismatch, (rep.eigenvalues - cert.eigenvalues).cwiseAbs().maxCoeff() / scale);
    for (std::size_t k = n / 2 + 1; k <= n; ++k) {
      const auto b = necessity_trace_bound(ext, rep, k);
      const double norm = std::max({1.0, std::abs(b.lhs), std::abs(b.rhs)});
      ++r.bound_checks;
      if (b.lhs < b.rhs - 1e-9 * norm) ++r.bound_failures;
      r.min_margin = std::min(r.min_margin, (b.lhs - b.rhs) / norm);
    }
  }
  return r;
}

}  // namespace negric
