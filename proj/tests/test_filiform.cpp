#include <gtest/gtest.h>

#include <random>

#include "negric/derivations.hpp"
#include "negric/filiform.hpp"
#include "test_support.hpp"

using namespace negric;

namespace {

std::size_t bracket_count(const LieAlgebra& g) { return g.table().entries().size(); }

}  // namespace

TEST(Catalog, BracketCounts) {
  for (std::size_t n = 3; n <= 12; ++n) EXPECT_EQ(bracket_count(make_Ln(n)), n - 2) << n;
  for (std::size_t n = 6; n <= 12; n += 2) EXPECT_EQ(bracket_count(make_Qn(n)), (n - 3) + (n / 2 - 1)) << n;
  EXPECT_EQ(bracket_count(make_Qn(8)), 8u);
}

TEST(Catalog, FamilyRecognition) {
  EXPECT_TRUE(is_Qn(make_Qn(8)));
  EXPECT_FALSE(is_Ln(make_Qn(8)));
  EXPECT_TRUE(is_Ln(make_Ln(7)));
  EXPECT_FALSE(is_Qn(make_Qn_alternate(8)));
  EXPECT_THROW(make_Qn(7), Error);
  EXPECT_THROW(FiliformSpec(Family::L, 2), Error);
  EXPECT_EQ(parse_family("Qn"), Family::Q);
  EXPECT_THROW(parse_family("Rn"), Error);
}

TEST(Torus, GeneratorsAreCommutingDerivations) {
  for (auto f : {Family::L, Family::Q})
    for (std::size_t n = 4; n <= 12; n += 2) {
      const FiliformSpec spec(f, n);
      const auto g = make_algebra(spec);
      const auto [p1, p2] = torus(spec);
      EXPECT_TRUE(is_derivation(g, p1.matrix()));
      EXPECT_TRUE(is_derivation(g, p2.matrix()));
      EXPECT_TRUE(commutator(p1.matrix(), p2.matrix()).is_zero());
    }
}

TEST(Torus, QnEigenvaluesAreTheTorusCombination) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 6 + 2 * (trial % 4);
    const Rational a = test_support::random_rational(rng), d = test_support::random_rational(rng);
    const auto [p1, p2] = torus(FiliformSpec(Family::Q, n));
    // a*phi_1 + (d - 2a)*phi_2 read off entrywise
    const RationalMatrix combo = a * p1.matrix() + Rational(d - 2 * a) * p2.matrix();
    EXPECT_EQ(qn_eigenvalues(n, a, d), combo.diagonal_entries());
    EXPECT_TRUE(is_derivation(make_Qn(n), RationalMatrix::diagonal(qn_eigenvalues(n, a, d))));
    // the listed closed form: a, d, a+d, ..., (n-3)a+d, (n-3)a+2d
    const auto lam = qn_eigenvalues(n, a, d);
    EXPECT_EQ(lam[0], a);
    EXPECT_EQ(lam[1], d);
    EXPECT_EQ(lam[n - 2], Rational(static_cast<long>(n - 3)) * a + d);
    EXPECT_EQ(lam[n - 1], Rational(static_cast<long>(n - 3)) * a + 2 * d);
  }
}

TEST(Torus, LnEigenvalues) {
  const auto [p1, p2] = torus(FiliformSpec(Family::L, 6));
  const Rational alpha(2, 3), beta(-5);
  EXPECT_EQ(ln_eigenvalues(6, alpha, beta), (alpha * p1.matrix() + beta * p2.matrix()).diagonal_entries());
  EXPECT_NO_THROW(ln_diagonal_derivation(6, alpha, beta));
}

TEST(Torus, RankOneGenerator) {
  EXPECT_EQ(rank_one_torus(7, 1).diagonal_entries(), (RationalVector{1, 3, 4, 5, 6, 7, 9}));
  EXPECT_EQ(rank_one_torus(6, 1).diagonal_entries(), (RationalVector{1, 3, 4, 5, 6, 8}));
  for (std::size_t n = 5; n <= 12; ++n)
    for (std::size_t r = 1; r + 4 <= n; ++r)
      for (const auto& v : rank_one_torus(n, r).diagonal_entries()) EXPECT_GT(v, 0);
  EXPECT_THROW(rank_one_torus(6, 3), Error);
  EXPECT_THROW(rank_one_torus(6, 0), Error);
}

TEST(QnDerivations, NoX1ComponentInDX2) {
  for (std::size_t n : {6, 8}) {
    for (const auto& d : derivation_space(make_Qn(n))) {
      EXPECT_TRUE(d.matrix().is_lower_triangular());
      EXPECT_EQ(d.matrix()(0, 1), 0);
    }
  }
}

TEST(EliminateB, ClearsTheEntryAndKeepsTheDiagonal) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + trial % 4;
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) m(i, j) = test_support::random_rational(rng);
    m(1, 0) = 0;
    const Rational a = m(0, 0);
    Rational d = m(1, 1);
    if (a == d) m(1, 1) = d = a + 1;
    m(0, 1) = test_support::random_nonzero_rational(rng);
    const auto bc = eliminate_b(a, d, m);
    EXPECT_EQ(bc.derived(0, 1), 0);
    EXPECT_EQ(bc.derived.diagonal_entries(), m.diagonal_entries());
    EXPECT_EQ(bc.p * bc.derived, m * bc.p);
    EXPECT_TRUE(bc.derived.is_lower_triangular());
  }
}

TEST(EliminateB, ZeroBIsTheIdentity) {
  const auto d = qn_diagonal_derivation(6, 1, -1).matrix();
  const auto bc = eliminate_b(1, -1, d);
  EXPECT_EQ(bc.p, RationalMatrix::identity(6));
  EXPECT_EQ(bc.derived, d);
}

TEST(EliminateB, ProducesX2MinusX1ForUnitRatio) {
  // a = 1, d = -1, b = 2: b/(a-d) = 1, so the new X_2 is X_2 - X_1
  RationalMatrix m = RationalMatrix::diagonal(qn_eigenvalues(6, 1, -1));
  m(0, 1) = 2;
  const auto bc = eliminate_b(1, -1, m);
  EXPECT_EQ(bc.p(0, 1), -1);
  EXPECT_EQ(bc.p(1, 1), 1);
  EXPECT_TRUE(bc.derived.is_lower_triangular());
}

TEST(EliminateB, RejectsCoupledX1X2Block) {
  RationalMatrix m = RationalMatrix::diagonal(qn_eigenvalues(6, 1, -1));
  m(0, 1) = 2;
  m(1, 0) = 1;
  EXPECT_THROW(eliminate_b(1, -1, m), Error);
}

TEST(EliminateB, EqualDiagonalIsRejected) {
  RationalMatrix m = RationalMatrix::identity(4);
  m(0, 1) = 2;
  EXPECT_THROW(eliminate_b(1, 1, m), Error);
}

TEST(Alternate, BasisChangeGivesNormalForm) {
  for (std::size_t n = 4; n <= 12; n += 2)
    EXPECT_EQ(change_basis(make_Qn(n), alternate_basis_map(n)), make_Qn_alternate(n)) << n;
}

TEST(Alternate, Q4IsL4) { EXPECT_EQ(change_basis(make_Qn(4), q4_to_l4_map()), make_Ln(4)); }

TEST(Normalize, RandomConsistentKReachesNormalForm) {
  std::mt19937_64 rng(2024);
  for (std::size_t n : {6, 8, 10}) {
    int done = 0;
    for (int trial = 0; trial < 10; ++trial) {
      const RationalMatrix k = test_support::random_skew_k(rng, n);
      if (determinant(k) == 0) continue;
      ++done;
      const auto norm = normalize_to_Qn(n, k);
      const LieAlgebra input(skew_filiform_table(n, k));
      EXPECT_EQ(norm.algebra, make_Qn_alternate(n));
      EXPECT_EQ(change_basis(input, norm.p), make_Qn_alternate(n));
      EXPECT_EQ(change_basis(norm.algebra, inverse(alternate_basis_map(n))), make_Qn(n));
    }
    EXPECT_GE(done, 8) << n;
  }
}

TEST(Normalize, RejectsSingularAndInconsistentK) {
  RationalMatrix k(4, 4);
  k(0, 3) = 1;
  k(3, 0) = -1;
  EXPECT_THROW(normalize_to_Qn(6, k), Error);  // Jacobi fails: K_{3,4} must equal -K_{2,5}
  RationalMatrix zero(4, 4);
  EXPECT_THROW(normalize_to_Qn(6, zero), Error);
}
