#pragma once

// Cone membership by smooth convex minimization. For vectors v_a with weights c_a and a
// target u, minimizes
//
//   G(x) = sum_a c_a exp(<v_a, x>) + [slack] sum_i sigma_i exp(x_i) - <u, x>.
//
// A critical point writes u as a combination of the v_a (and, with slack, the coordinate
// vectors) with strictly positive coefficients, so the minimizer is its own certificate.
// When u is not in the open cone the infimum is approached only at infinity.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "negric/error.hpp"

namespace negric {

struct ConeProblem {
  std::size_t dim = 0;
  std::vector<Eigen::VectorXd> vectors;
  std::vector<double> coefficients;        // empty means all 1
  Eigen::VectorXd target;
  bool slack = true;
  std::vector<double> slack_coefficients;  // sigma; empty means all 1
};

enum class ConeStatus { Converged, Divergent, IterationLimit };

inline std::string to_string(ConeStatus s) {
  switch (s) {
    case ConeStatus::Converged: return "converged";
    case ConeStatus::Divergent: return "divergent";
    case ConeStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

struct ConeSolverOptions {
  double gradient_tolerance = 1e-10;  // relative to max(1, |u|_inf)
  double step_tolerance = 1e-4;       // on the full Newton step, in log units
  double divergence_radius = 50.0;
  double max_condition = 1e12;
  int max_iterations = 500;
};

struct ConeResult {
  ConeStatus status = ConeStatus::IterationLimit;
  Eigen::VectorXd x;
  Eigen::VectorXd gradient;
  Eigen::VectorXd weights;  // c_a exp(<v_a, x>), then sigma_i exp(x_i) when slack is on
  double gradient_norm = 0;
  int iterations = 0;
  int gradient_steps = 0;

  bool converged() const { return status == ConeStatus::Converged; }
};

namespace detail {

struct ConeEval {
  double value;
  Eigen::VectorXd gradient;
  Eigen::VectorXd weights;
};

inline ConeEval cone_eval(const ConeProblem& p, const Eigen::VectorXd& x) {
  const std::size_t q = p.vectors.size();
  ConeEval e{0.0, -p.target, Eigen::VectorXd(q + (p.slack ? p.dim : 0))};
  e.value = -p.target.dot(x);
  for (std::size_t a = 0; a < q; ++a) {
    const double c = p.coefficients.empty() ? 1.0 : p.coefficients[a];
    const double w = c * std::exp(p.vectors[a].dot(x));
    e.weights(static_cast<Eigen::Index>(a)) = w;
    e.value += w;
    e.gradient += w * p.vectors[a];
  }
  if (p.slack)
    for (std::size_t i = 0; i < p.dim; ++i) {
      const double sigma = p.slack_coefficients.empty() ? 1.0 : p.slack_coefficients[i];
      const double w = sigma * std::exp(x(static_cast<Eigen::Index>(i)));
      e.weights(static_cast<Eigen::Index>(q + i)) = w;
      e.value += w;
      e.gradient(static_cast<Eigen::Index>(i)) += w;
    }
  return e;
}

inline Eigen::MatrixXd cone_hessian(const ConeProblem& p, const ConeEval& e) {
  const auto n = static_cast<Eigen::Index>(p.dim);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t a = 0; a < p.vectors.size(); ++a)
    h.selfadjointView<Eigen::Lower>().rankUpdate(p.vectors[a], e.weights(static_cast<Eigen::Index>(a)));
  h = h.selfadjointView<Eigen::Lower>();
  if (p.slack)
    for (Eigen::Index i = 0; i < n; ++i) h(i, i) += e.weights(static_cast<Eigen::Index>(p.vectors.size()) + i);
  return h;
}

}  // namespace detail

/// Safeguarded Newton from x = 0 with Armijo backtracking. Converged means the gradient is
/// below tolerance and the full Newton step is short. For a boundary target the gradient also
/// decays, but along an escape ray where the Newton step stays of order one, so such runs keep
/// going until they leave the divergence radius or hit the iteration cap.
inline ConeResult solve_feasibility(const ConeProblem& p, const ConeSolverOptions& opt = {}) {
  require(p.dim > 0, ErrorCode::InvalidArgument, "solve_feasibility: dimension must be positive");
  require(p.target.size() == static_cast<Eigen::Index>(p.dim), ErrorCode::DimensionMismatch,
          "solve_feasibility: target has wrong length");
  require(p.coefficients.empty() || p.coefficients.size() == p.vectors.size(), ErrorCode::DimensionMismatch,
          "solve_feasibility: coefficient count mismatch");
  for (const auto& v : p.vectors)
    require(v.size() == static_cast<Eigen::Index>(p.dim), ErrorCode::DimensionMismatch,
            "solve_feasibility: vector has wrong length");
  for (double c : p.coefficients) require(c > 0, ErrorCode::InvalidArgument, "solve_feasibility: coefficients must be positive");
  require(p.slack_coefficients.empty() || p.slack_coefficients.size() == p.dim, ErrorCode::DimensionMismatch,
          "solve_feasibility: slack coefficient count mismatch");
  for (double c : p.slack_coefficients)
    require(c > 0 && std::isfinite(c), ErrorCode::InvalidArgument, "solve_feasibility: slack coefficients must be positive");
  require(!p.vectors.empty() || p.slack, ErrorCode::InvalidArgument, "solve_feasibility: empty vector set");

  const double scale = std::max(1.0, p.target.cwiseAbs().maxCoeff());
  const double tol = opt.gradient_tolerance * scale;

  ConeResult r;
  r.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.dim));
  auto e = detail::cone_eval(p, r.x);
  for (r.iterations = 0; r.iterations < opt.max_iterations; ++r.iterations) {
    r.gradient_norm = e.gradient.cwiseAbs().maxCoeff();
    if (r.x.cwiseAbs().maxCoeff() > opt.divergence_radius) {
      r.status = ConeStatus::Divergent;
      break;
    }
    const Eigen::MatrixXd h = detail::cone_hessian(p, e);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    Eigen::VectorXd step;
    const bool newton = lo > 0 && hi / lo <= opt.max_condition;
    if (newton) {
      step = es.eigenvectors() * (es.eigenvectors().transpose() * -e.gradient).cwiseQuotient(es.eigenvalues());
    } else {
      step = -e.gradient / std::max(hi, 1e-300);
    }
    if (newton && r.gradient_norm < tol && step.cwiseAbs().maxCoeff() < opt.step_tolerance) {
      r.status = ConeStatus::Converged;
      break;
    }
    if (!newton) ++r.gradient_steps;
    const double slope = e.gradient.dot(step);
    double t = 1.0;
    detail::ConeEval next = detail::cone_eval(p, r.x + step);
    // Near the minimum the predicted decrease drops below the rounding error of G itself;
    // there a full Newton step is judged by the gradient instead of the value.
    if (newton && -slope <= 1e-12 * std::max(1.0, std::abs(e.value)) && std::isfinite(next.value) &&
        next.gradient.cwiseAbs().maxCoeff() < r.gradient_norm) {
      r.x += step;
      e = std::move(next);
      continue;
    }
    int halvings = 0;
    while (!(std::isfinite(next.value) && next.value <= e.value + 1e-4 * t * slope) && halvings < 60) {
      t *= 0.5;
      ++halvings;
      next = detail::cone_eval(p, r.x + t * step);
    }
    if (halvings == 60 && !(next.value <= e.value + 1e-14 * std::abs(e.value))) {
      // no decrease representable in double precision: stuck at the current point
      break;
    }
    r.x += t * step;
    e = std::move(next);
  }
  r.gradient = e.gradient;
  r.weights = e.weights;
  r.gradient_norm = e.gradient.cwiseAbs().maxCoeff();
  if (r.status != ConeStatus::Converged && r.status != ConeStatus::Divergent &&
      r.x.cwiseAbs().maxCoeff() > opt.divergence_radius)
    r.status = ConeStatus::Divergent;
  return r;
}

/// u - sum_a c_a exp(<v_a, x>) v_a, which equals (sigma_i exp(x_i))_i at a slack-mode critical point.
inline Eigen::VectorXd cone_slack(const ConeProblem& p, const Eigen::VectorXd& x) {
  Eigen::VectorXd s = p.target;
  for (std::size_t a = 0; a < p.vectors.size(); ++a) {
    const double c = p.coefficients.empty() ? 1.0 : p.coefficients[a];
    s -= c * std::exp(p.vectors[a].dot(x)) * p.vectors[a];
  }
  return s;
}

/// Solver run for problems with gauge directions g, i.e. <v_a, g> = 0 for every a. Shifting x
/// by such g changes only the slack terms, and G(y + g) equals the problem with sigma_i scaled
/// by exp(g_i) up to a constant, so the minimizer can be re-centred exactly. Each divergent pass
/// moves the gauge part of its last iterate into the offset and runs again; the returned x is in
/// the original coordinates. A target outside the open cone escapes along a non-gauge direction
/// and stays divergent.
inline ConeResult solve_feasibility_recentered(const ConeProblem& p, const std::vector<Eigen::VectorXd>& gauge,
                                               const ConeSolverOptions& opt = {}, int passes = 8) {
  const auto n = static_cast<Eigen::Index>(p.dim);
  Eigen::MatrixXd basis(n, static_cast<Eigen::Index>(gauge.size()));
  for (std::size_t k = 0; k < gauge.size(); ++k) {
    require(gauge[k].size() == n, ErrorCode::DimensionMismatch, "solve_feasibility_recentered: gauge vector has wrong length");
    for (const auto& v : p.vectors)
      require(std::abs(v.dot(gauge[k])) <= 1e-12 * std::max(1.0, v.norm() * gauge[k].norm()), ErrorCode::InvalidArgument,
              "solve_feasibility_recentered: gauge vector is not orthogonal to the cone vectors");
    basis.col(static_cast<Eigen::Index>(k)) = gauge[k];
  }
  Eigen::VectorXd offset = Eigen::VectorXd::Zero(n);
  ConeProblem q = p;
  ConeResult r;
  for (int pass = 0; pass < std::max(1, passes); ++pass) {
    q.slack_coefficients.resize(p.dim);
    for (Eigen::Index i = 0; i < n; ++i)
      q.slack_coefficients[static_cast<std::size_t>(i)] =
          (p.slack_coefficients.empty() ? 1.0 : p.slack_coefficients[static_cast<std::size_t>(i)]) * std::exp(offset(i));
    r = solve_feasibility(q, opt);
    if (r.converged() || gauge.empty()) break;
    const Eigen::VectorXd shift = basis * basis.colPivHouseholderQr().solve(r.x);
    if (shift.cwiseAbs().maxCoeff() < 1.0 || (offset + shift).cwiseAbs().maxCoeff() > 10 * opt.divergence_radius) break;
    offset += shift;
  }
  r.x += offset;
  return r;
}

}  // namespace negric
