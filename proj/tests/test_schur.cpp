#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "cbfactor/schur.hpp"

using namespace cbf;

namespace {

void expect_sound(const Nu2Certificate& c, const SchurKernel& k, double eps) {
  EXPECT_LE(max_column_norm(c.a1) * max_column_norm(c.a2), c.value * (1 + 1e-6));
  EXPECT_LE(reconstruction_error(c.a1, c.a2, k.values()), 1e-6 * std::max(1.0, c.value));
  EXPECT_LE(c.dual_lower, c.value);
  EXPECT_LE(c.value - c.dual_lower, eps * std::max(1.0, c.value));
  EXPECT_TRUE(check_certificate(c, k, eps * std::max(1.0, c.value)).ok());
}

ComplexMatrix random_contraction(Eigen::Index n, GaussianStream& s) {
  return random_with_norm(n, 1.0, s);
}

}  // namespace

TEST(Nu2, RankOneKernel) {
  ComplexVector u(2), v(2);
  u << 1, 2;
  v << 3, 1;
  const SchurKernel k(u * v.transpose());
  const Nu2Certificate c = nu2(k, 1e-9);
  EXPECT_NEAR(c.value, 6.0, 1e-8);
  expect_sound(c, k, 1e-9);
}

TEST(Nu2, IdentityPattern) {
  for (int n : {2, 5, 9}) {
    const SchurKernel k(ComplexMatrix::Identity(n, n));
    const Nu2Certificate c = nu2(k, 1e-9);
    EXPECT_NEAR(c.value, 1.0, 1e-8);
    expect_sound(c, k, 1e-9);
  }
}

TEST(Nu2, TriangularTruncation) {
  ComplexMatrix a(2, 2);
  a << 1, 0, 1, 1;
  const SchurKernel k(a);
  const Nu2Certificate c = nu2(k, 1e-9);
  EXPECT_NEAR(c.value, 2.0 / std::sqrt(3.0), 1e-8);
  expect_sound(c, k, 1e-9);
}

TEST(Nu2, OneByOneSkipsSolver) {
  const SchurKernel k(ComplexMatrix::Constant(1, 1, cplx(3, -4)));
  const Nu2Certificate c = nu2(k, 1e-9);
  EXPECT_DOUBLE_EQ(c.value, 5.0);
  EXPECT_EQ(c.k, 1);
  EXPECT_LT(c.reconstruction_residual, 1e-14);
}

TEST(Nu2, ZeroKernel) {
  const SchurKernel k(ComplexMatrix::Zero(3, 2));
  const Nu2Certificate c = nu2(k, 1e-9);
  EXPECT_EQ(c.value, 0.0);
  EXPECT_EQ(c.k, 0);
  EXPECT_EQ(reconstruction_error(c.a1, c.a2, k.values()), 0.0);
}

TEST(Nu2, RandomCertificatesAreSound) {
  GaussianStream s(31);
  for (auto [m, n] : {std::pair{2, 3}, {4, 4}, {6, 3}, {8, 8}}) {
    const SchurKernel k(s.draw_matrix(m, n));
    const Nu2Certificate c = nu2(k, 1e-8);
    expect_sound(c, k, 1e-8);
    EXPECT_GE(c.value * (1 + 1e-9), max_abs(k.values()));
  }
}

TEST(Nu2, InvalidInputs) {
  EXPECT_THROW(SchurKernel(ComplexMatrix(0, 2)), Error);
  ComplexMatrix bad = ComplexMatrix::Ones(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(SchurKernel{bad}, Error);
  EXPECT_THROW(nu2(SchurKernel(ComplexMatrix::Ones(2, 2)), 1.0), Error);
}

TEST(Nu2, IsANorm) {
  GaussianStream s(77);
  const double eps = 1e-8;
  for (int i = 0; i < 5; ++i) {
    const ComplexMatrix a = s.draw_matrix(4, 4), b = s.draw_matrix(4, 4);
    const double na = nu2(SchurKernel(a), eps).value, nb = nu2(SchurKernel(b), eps).value;
    const double nab = nu2(SchurKernel(ComplexMatrix(a + b)), eps).value;
    EXPECT_LE(nab, na + nb + 2 * eps * std::max(1.0, na + nb));
    const cplx z(-1.5, 2.0);
    EXPECT_NEAR(nu2(SchurKernel(ComplexMatrix(z * a)), eps).value, std::abs(z) * na, 4 * eps * std::abs(z) * na);
  }
}

TEST(Nu2, PermutationInvariance) {
  GaussianStream s(91);
  const ComplexMatrix a = s.draw_matrix(5, 4);
  const double base = nu2(SchurKernel(a), 1e-9).value;
  std::vector<int> rows = {3, 0, 4, 1, 2}, cols = {2, 3, 1, 0};
  ComplexMatrix p(5, 4);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) p(i, j) = a(rows[static_cast<size_t>(i)], cols[static_cast<size_t>(j)]);
  EXPECT_NEAR(nu2(SchurKernel(p), 1e-9).value, base, 2e-9 * base);
}

TEST(SchurApply, Examples) {
  GaussianStream s(2);
  const ComplexMatrix c = s.draw_matrix(3, 3);
  EXPECT_EQ(schur_apply(SchurKernel(ComplexMatrix::Ones(3, 3)), c), c);
  const ComplexMatrix diag = schur_apply(SchurKernel(ComplexMatrix::Identity(3, 3)), c);
  EXPECT_EQ(ComplexMatrix(diag.diagonal().asDiagonal()), diag);
  EXPECT_EQ(diag.diagonal(), c.diagonal());
}

TEST(SchurApply, MatchesDirectLoop) {
  GaussianStream s(6);
  const ComplexMatrix phi = s.draw_matrix(4, 4), c = s.draw_matrix(4, 4);
  const ComplexMatrix out = schur_apply(SchurKernel(phi), c);
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) EXPECT_EQ(out(k, l), phi(k, l) * c(k, l));
}

TEST(SchurApply, DimensionMismatch) {
  try {
    schur_apply(SchurKernel(ComplexMatrix::Ones(2, 2)), ComplexMatrix::Ones(3, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(SchurApply, BoundedByNu2) {
  GaussianStream s(15);
  for (int trial = 0; trial < 3; ++trial) {
    const SchurKernel k(s.draw_matrix(5, 5));
    const double v = nu2(k, 1e-9).value;
    for (int i = 0; i < 100; ++i) {
      const ComplexMatrix c = random_contraction(5, s);
      EXPECT_LE(spectral_norm(schur_apply(k, c)), v * spectral_norm(c) + 1e-6);
    }
  }
}

TEST(MultiplierNormLower, Examples) {
  GaussianStream s(3);
  EXPECT_NEAR(multiplier_norm_lower(SchurKernel(ComplexMatrix::Ones(3, 3)), 10, s), 1.0, 1e-12);
  const double id = multiplier_norm_lower(SchurKernel(ComplexMatrix::Identity(4, 4)), 200, s);
  EXPECT_LE(id, 1.0 + 1e-12);
  EXPECT_GT(id, 0.5);
  ComplexMatrix a(2, 2);
  a << 1, 0, 1, 1;
  const double tri = multiplier_norm_lower(SchurKernel(a), 10000, s);
  EXPECT_GE(tri, 1.0);
  EXPECT_LE(tri, 2.0 / std::sqrt(3.0) + 1e-9);
}
