#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "negric/derivations.hpp"
#include "negric/filiform.hpp"
#include "negric/ricci.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace negric;

namespace {

double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

Rational trace_of(const RationalVector& v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s;
}

/// Random lower-triangular derivation of Q_n: diag(lambda(a, d)) plus a random nilpotent part.
RationalMatrix random_qn_derivation(std::mt19937_64& rng, std::size_t n) {
  Rational a, d;
  do {
    a = test_support::random_rational(rng);
    d = test_support::random_rational(rng);
  } while (trace_of(qn_eigenvalues(n, a, d)) == 0);
  RationalMatrix m = RationalMatrix::diagonal(qn_eigenvalues(n, a, d));
  for (const auto& z : zero_diagonal_part(derivation_space(make_Qn(n))))
    m = m + test_support::random_rational(rng, 2, 2) * z;
  return m;
}

}  // namespace

TEST(GramSchmidt, FlagFrameIsLowerTriangularAndOrthonormal) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 3 + seed % 8;
    const MatrixXd g = sample_gram(n, seed, 1.0);
    const MatrixXd f = flag_frame(g);
    EXPECT_LT(max_abs(f.transpose() * g * f - MatrixXd::Identity(n, n)), 1e-10);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) EXPECT_EQ(f(i, j), 0.0);
  }
}

TEST(GramSchmidt, DependentBasisThrows) {
  MatrixXd b = MatrixXd::Identity(3, 3);
  b.col(0) = b.col(1);
  EXPECT_THROW(gram_schmidt_descending(b, MatrixXd::Identity(3, 3)), Error);
}

TEST(Metric, RejectsIndefiniteGram) {
  MatrixXd g = MatrixXd::Identity(6, 6);
  g(2, 2) = -1;
  EXPECT_THROW(MetricLieAlgebra(make_Qn(6), g), Error);
  MatrixXd h = MatrixXd::Identity(6, 6);
  h(0, 1) = 0.5;
  EXPECT_THROW(MetricLieAlgebra(make_Qn(6), h), Error);
}

TEST(NilpotentRicci, Q6IdentityMetric) {
  const MatrixXd ric = ricci_nilpotent(make_Qn(6), MatrixXd::Identity(6, 6));
  VectorXd expected(6);
  expected << -1.5, -1, -0.5, -0.5, 0, 1;
  EXPECT_LT((ric.diagonal() - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(max_abs(ric - MatrixXd(ric.diagonal().asDiagonal())), 1e-12);
  // trace = -1/4 sum over ordered pairs of |[e_i, e_j]|^2 = -10/4
  EXPECT_NEAR(ric.trace(), -2.5, 1e-12);
  EXPECT_NEAR(bracket_energy(make_Qn(6), MatrixXd::Identity(6, 6)), -2.5, 1e-12);
}

TEST(NilpotentRicci, DiagonalMetricsMatchBracketCount) {
  // For e_i = exp(-x_i) X_i each bracket [X_i, X_j] = c X_k contributes w = (c e^{x_k - x_i - x_j})^2:
  // +w/2 to Ric_kk and -w/2 to Ric_ii and Ric_jj.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 6 + 2 * (trial % 3);
    const LieAlgebra q = make_Qn(n);
    VectorXd x(n);
    for (std::size_t i = 0; i < n; ++i) x(i) = u(rng);
    VectorXd expected = VectorXd::Zero(n);
    for (const auto& [ij, terms] : q.table().entries())
      for (const auto& [k, c] : terms) {
        const double w = std::pow(c.get_d() * std::exp(x(k) - x(ij.first) - x(ij.second)), 2);
        expected(k) += 0.5 * w;
        expected(ij.first) -= 0.5 * w;
        expected(ij.second) -= 0.5 * w;
      }
    const MatrixXd gram = (2.0 * x).array().exp().matrix().asDiagonal();
    const MatrixXd ric = ricci_nilpotent(q, gram);
    const double scale = std::max(1.0, expected.cwiseAbs().maxCoeff());
    EXPECT_LT((ric.diagonal() - expected).cwiseAbs().maxCoeff() / scale, 1e-12);
  }
}

TEST(NilpotentRicci, RejectsNonNilpotent) {
  const LieAlgebra g = solvable_extension(make_Qn(6), {qn_diagonal_derivation(6, 1, 1)});
  EXPECT_THROW(ricci_nilpotent(g, MatrixXd::Identity(7, 7)), Error);
}

TEST(GeneralRicci, MatchesOracleOnRandomExtensions) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = trial % 2 ? 6 : 8;
    const DerivationMatrix d(make_Qn(n), random_qn_derivation(rng, n));
    const LieAlgebra g = solvable_extension(make_Qn(n), {d});
    const MatrixXd gram = sample_gram(n + 1, 1000 + trial, 0.5);
    const MatrixXd frame = flag_frame(gram);
    const MatrixXd ours = ricci_in_frame(g, frame);
    const MatrixXd ref = oracle::ricci(g, gram, frame);
    EXPECT_LT(max_abs(ours - ref) / std::max(1.0, max_abs(ref)), 1e-10);
  }
}

TEST(GeneralRicci, FrameIndependence) {
  std::mt19937_64 rng(23);
  const std::size_t n = 6;
  const DerivationMatrix d(make_Qn(n), random_qn_derivation(rng, n));
  const LieAlgebra g = solvable_extension(make_Qn(n), {d});
  const MatrixXd gram = sample_gram(n + 1, 77, 0.5);
  const MatrixXd f = flag_frame(gram);
  const MatrixXd q = Eigen::HouseholderQR<MatrixXd>(MatrixXd::Random(n + 1, n + 1)).householderQ();
  const MatrixXd rotated = ricci_in_frame(g, f * q);
  const MatrixXd direct = ricci_in_frame(g, f);
  EXPECT_LT(max_abs(rotated - q.transpose() * direct * q), 1e-10 * std::max(1.0, max_abs(direct)));
}

TEST(Blocks, AgreeWithGeneralFormula) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = trial % 2 ? 6 : 8;
    const DerivationMatrix d(make_Qn(n), random_qn_derivation(rng, n));
    const ExtensionMetric ext(make_Qn(n), d, sample_gram(n, 500 + trial, 0.5));
    const auto rep = ricci_blocks(ext);
    const MatrixXd general = move_first_to_last(ricci_operator_general(MetricLieAlgebra(ext.flattened(), ext.flattened_gram())));
    EXPECT_LT(max_abs(rep.full - general) / std::max(1.0, max_abs(general)), 1e-10);
    EXPECT_NEAR(rep.r3, general(n, n), 1e-10 * std::max(1.0, std::abs(general(n, n))));
  }
}

TEST(Blocks, NilpotentPartIsTheNilradicalRicci) {
  // A = 0 is excluded (derivation must be a derivation), so compare at D = 0 directly
  const ExtensionMetric ext(make_Qn(6), DerivationMatrix(make_Qn(6), RationalMatrix(6, 6)), MatrixXd::Identity(6, 6));
  const auto rep = ricci_blocks(ext);
  EXPECT_LT(max_abs(rep.R1 - ricci_nilpotent(make_Qn(6), MatrixXd::Identity(6, 6))), 1e-14);
  EXPECT_EQ(rep.r3, 0.0);
}

TEST(Spectrum, AgreesWithJacobiRotations) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 6;
    const DerivationMatrix d(make_Qn(n), random_qn_derivation(rng, n));
    const MatrixXd ric =
        ricci_operator_general(MetricLieAlgebra(solvable_extension(make_Qn(n), {d}), sample_gram(n + 1, 900 + trial, 0.3)));
    const auto def = assess_negativity(ric);
    const VectorXd ref = oracle::jacobi_eigenvalues(ric);
    EXPECT_LT((def.eigenvalues - ref).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
}

TEST(Spectrum, JacobiOracleOnKnownMatrix) {
  MatrixXd m(3, 3);
  m << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  const VectorXd ev = oracle::jacobi_eigenvalues(m);
  EXPECT_NEAR(ev(0), 2 - std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(ev(1), 2, 1e-12);
  EXPECT_NEAR(ev(2), 2 + std::sqrt(2.0), 1e-12);
}

TEST(Negativity, ScaleRelativeTolerance) {
  MatrixXd m = MatrixXd::Identity(3, 3) * -1.0;
  EXPECT_TRUE(assess_negativity(m).negative_definite);
  m(2, 2) = -1e-12;
  EXPECT_FALSE(assess_negativity(m).negative_definite);
  m(2, 2) = 1e-3;
  EXPECT_FALSE(assess_negativity(m).negative_definite);
}

TEST(TraceBound, HoldsOnRandomMetrics) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = trial % 2 ? 6 : 8;
    RationalMatrix m = random_qn_derivation(rng, n);
    if (trace_of(m.diagonal_entries()) < 0) m = Rational(-1) * m;
    const ExtensionMetric ext(make_Qn(n), DerivationMatrix(make_Qn(n), m), sample_gram(n, 300 + trial, 1.0));
    for (std::size_t k = n / 2 + 1; k <= n; ++k) {
      const auto b = necessity_trace_bound(ext, k);
      EXPECT_GE(b.lhs, b.rhs - 1e-9 * std::max({1.0, std::abs(b.lhs), std::abs(b.rhs)}));
    }
  }
}

TEST(TraceBound, Preconditions) {
  const ExtensionMetric neg(make_Qn(6), qn_diagonal_derivation(6, -1, -1), MatrixXd::Identity(6, 6));
  EXPECT_THROW(necessity_trace_bound(neg, 5), Error);
  const ExtensionMetric pos(make_Qn(6), qn_diagonal_derivation(6, 1, 1), MatrixXd::Identity(6, 6));
  EXPECT_THROW(necessity_trace_bound(pos, 3), Error);
  EXPECT_NO_THROW(necessity_trace_bound(pos, 4));
}

TEST(SampleGram, DeterministicAndPositive) {
  const MatrixXd a = sample_gram(7, 99, 1.0), b = sample_gram(7, 99, 1.0);
  EXPECT_EQ(a, b);
  EXPECT_EQ(Eigen::LLT<MatrixXd>(a).info(), Eigen::Success);
  EXPECT_NE(a, sample_gram(7, 100, 1.0));
}
