#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "poppkit/error.hpp"
#include "poppkit/linalg.hpp"
#include "poppkit/random.hpp"

namespace poppkit {
namespace {

// Cofactor expansion; exponential but independent of elimination.
Rational laplace_det(const RationalMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 1) return m(0, 0);
  Rational d = 0;
  for (std::size_t j = 0; j < n; ++j) {
    RationalMatrix minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t c = 0, cc = 0; c < n; ++c)
        if (c != j) minor(r - 1, cc++) = m(r, c);
    const Rational term = m(0, j) * laplace_det(minor);
    d += (j % 2 == 0) ? term : Rational(-term);
  }
  return d;
}

RationalMatrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  RationalMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = random_rational(rng);
  return m;
}

Eigen::MatrixXd to_eigen(const RationalMatrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j).get_d();
  return e;
}

TEST(ExactLinalg, DeterminantMatchesCofactorExpansion) {
  std::mt19937_64 rng(1);
  for (std::size_t n = 1; n <= 5; ++n) {
    for (int t = 0; t < 5; ++t) {
      const RationalMatrix m = random_matrix(n, n, rng);
      EXPECT_EQ(determinant(m), laplace_det(m));
    }
  }
}

TEST(ExactLinalg, InverseIsExact) {
  std::mt19937_64 rng(2);
  for (std::size_t n = 1; n <= 5; ++n) {
    RationalMatrix m = random_matrix(n, n, rng);
    while (determinant(m) == 0) m = random_matrix(n, n, rng);
    EXPECT_EQ(m * inverse(m), RationalMatrix::identity(n));
  }
  EXPECT_THROW(inverse(RationalMatrix{{1, 2}, {2, 4}}), NumericalError);
}

TEST(ExactLinalg, Rank) {
  EXPECT_EQ(rank(RationalMatrix{{1, 2, 3}, {2, 4, 6}}), 1u);
  EXPECT_EQ(rank(RationalMatrix{{make_rational(1, 3), 0}, {0, make_rational(2, 7)}, {1, 1}}), 2u);
  EXPECT_EQ(rank(RationalMatrix(3, 4)), 0u);
  std::mt19937_64 rng(3);
  const RationalMatrix a = random_matrix(4, 2, rng);
  const RationalMatrix b = random_matrix(2, 5, rng);
  EXPECT_LE(rank(a * b), 2u);
}

TEST(ExactLinalg, PositiveDefinite) {
  EXPECT_TRUE(is_positive_definite(RationalMatrix{{2, 1}, {1, 2}}));
  EXPECT_FALSE(is_positive_definite(RationalMatrix{{1, 2}, {2, 1}}));
  EXPECT_FALSE(is_positive_definite(RationalMatrix{{1, 0}, {0, 0}}));
  EXPECT_FALSE(is_positive_definite(RationalMatrix{{2, 1}, {0, 2}}));
  std::mt19937_64 rng(4);
  for (std::size_t k = 1; k <= 5; ++k) EXPECT_TRUE(is_positive_definite(random_spd(k, rng)));
}

TEST(FloatLinalg, CholeskyReconstructs) {
  const RealMatrix a{{4, 2, 0.4}, {2, 10, 1}, {0.4, 1, 3}};
  const RealMatrix l = cholesky(a);
  const RealMatrix r = l * l.transpose();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(r(i, j), a(i, j), 1e-14);
  EXPECT_FALSE(try_cholesky(RealMatrix{{1, 2}, {2, 1}}).has_value());
}

TEST(FloatLinalg, SymmetricEigenvaluesMatchEigen) {
  std::mt19937_64 rng(5);
  for (std::size_t k = 1; k <= 6; ++k) {
    const RationalMatrix a = random_spd(k, rng);
    const std::vector<double> ours = symmetric_eigenvalues(to_real(a));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a));
    for (std::size_t i = 0; i < k; ++i) EXPECT_NEAR(ours[i] / es.eigenvalues()(i), 1.0, 1e-12);
  }
}

TEST(FloatLinalg, GeneralizedEigenvaluesMatchEigen) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 30; ++t) {
    const std::size_t k = 1 + t % 6;
    const RationalMatrix g = random_spd(k, rng);
    const RationalMatrix h = random_spd(k, rng);
    const std::vector<double> ours = generalized_eigenvalues(to_real(g), to_real(h));
    // Oracle solves h v = lambda g v.
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(h), to_eigen(g));
    ASSERT_EQ(ours.size(), k);
    for (std::size_t i = 0; i < k; ++i) EXPECT_NEAR(ours[i] / es.eigenvalues()(i), 1.0, 1e-11);
    EXPECT_TRUE(std::is_sorted(ours.begin(), ours.end()));
  }
}

TEST(FloatLinalg, GeneralizedEigenvaluesRejectBadInput) {
  EXPECT_THROW(generalized_eigenvalues(RealMatrix{{1, 2}, {2, 1}}, RealMatrix::identity(2)), NumericalError);
  EXPECT_THROW(generalized_eigenvalues(RealMatrix::identity(2), RealMatrix::identity(3)), NumericalError);
}

TEST(FloatLinalg, DeterminantAndInverse) {
  const RealMatrix a{{0, 2, 1}, {1, 0, 0}, {3, 1, 5}};
  EXPECT_NEAR(determinant(a), -9.0, 1e-12);
  const RealMatrix p = a * inverse(a);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(p(i, j), i == j ? 1.0 : 0.0, 1e-14);
}

TEST(FloatLinalg, RelativeDifference) {
  EXPECT_DOUBLE_EQ(relative_difference(1.0, 1.0), 0.0);
  EXPECT_NEAR(relative_difference(100.0, 101.0), 1.0 / 101.0, 1e-15);
  EXPECT_TRUE(approx_equal(1.0, 1.0 + 1e-12, 1e-9));
  EXPECT_FALSE(approx_equal(1.0, 1.1, 1e-9));
}

}  // namespace
}  // namespace poppkit
