#include <gtest/gtest.h>

#include <cmath>

#include "cbfactor/calculus.hpp"

using namespace cbf;

namespace {

ComplexMatrix nilpotent() {
  ComplexMatrix t = ComplexMatrix::Zero(2, 2);
  t(0, 1) = 1.0;
  return t;
}

AnalyticPolynomial poly(std::initializer_list<cplx> c) {
  AnalyticPolynomial f{ComplexVector(static_cast<Eigen::Index>(c.size()))};
  Eigen::Index i = 0;
  for (cplx z : c) f.coeffs(i++) = z;
  return f;
}

// (1/2pi) int |p| by a fine Riemann sum, independent of the library grid.
template <class P>
double l1_quadrature(const P& p, int points) {
  double s = 0.0;
  for (int j = 0; j < points; ++j) s += std::abs(p(2 * M_PI * (j + 0.5) / points));
  return s / points;
}

template <class P>
double sup_quadrature(const P& p, int points) {
  double s = 0.0;
  for (int j = 0; j < points; ++j) s = std::max(s, std::abs(p(2 * M_PI * j / points)));
  return s;
}

}  // namespace

TEST(HankelKernel, Examples) {
  const SchurKernel d = hankel_kernel(delta_sequence(0, 4));
  EXPECT_EQ(d(0, 0), cplx(1.0));
  EXPECT_EQ(d.values().cwiseAbs().sum(), 1.0);
  const SchurKernel g = hankel_kernel(geometric_sequence(0.5, 4));
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) EXPECT_DOUBLE_EQ(g(k, l).real(), std::pow(0.5, k) * std::pow(0.5, l));
  const SchurKernel h = hankel_kernel(harmonic_sequence(8));
  for (int k = 0; k < 8; ++k)
    for (int l = 0; l < 8; ++l) EXPECT_DOUBLE_EQ(h(k, l).real(), 1.0 / (k + l + 1));
}

TEST(HankelKernel, LengthMismatch) {
  try {
    hankel_kernel(HankelSequence{ComplexVector::Ones(4), 3, false});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
  }
}

TEST(Ms1Lower, CompletelyMonotoneAndDeltas) {
  for (double r : {0.3, 0.8, 1.0}) EXPECT_NEAR(ms1_lower(geometric_sequence(r, 6), 1e-9).value, 1.0, 1e-7);
  for (int j : {0, 2, 5}) EXPECT_NEAR(ms1_lower(delta_sequence(j, 4), 1e-9).value, 1.0, 1e-7);
  for (int n : {2, 4, 8, 12}) EXPECT_NEAR(ms1_lower(harmonic_sequence(n), 1e-9).value, 1.0, 1e-5);
}

TEST(Ms1Lower, MonotoneInTruncation) {
  GaussianStream s(1);
  const ComplexVector vals = s.draw(11);
  double prev = 0.0;
  for (int n = 1; n <= 6; ++n) {
    const double v = ms1_lower(HankelSequence{vals, n, false}, 1e-9).value;
    EXPECT_GE(v, prev - 1e-7);
    prev = v;
  }
}

TEST(CoeffSequence, Examples) {
  ComplexVector x(2), xs(2);
  x << 1, cplx(0, 2);
  xs << 3, 1;
  const HankelSequence c = coeff_sequence(ComplexMatrix::Identity(2, 2), x, xs, 3);
  ASSERT_EQ(c.values.size(), 5);
  for (int k = 0; k < 5; ++k) EXPECT_EQ(c.values(k), pair(x, xs));
  const HankelSequence nil = coeff_sequence(nilpotent(), ComplexVector::Unit(2, 1), ComplexVector::Unit(2, 0), 3);
  EXPECT_EQ(nil.values(0), cplx(0.0));
  EXPECT_EQ(nil.values(1), cplx(1.0));
  for (int k = 2; k < 5; ++k) EXPECT_EQ(nil.values(k), cplx(0.0));
  const Eigen::Vector2cd a(0.5, cplx(0, -0.7));
  const HankelSequence dg = coeff_sequence(ComplexMatrix(a.asDiagonal()), x, xs, 4);
  for (int n = 0; n < 7; ++n)
    EXPECT_LT(std::abs(dg.values(n) - (std::pow(a(0), n) * x(0) * xs(0) + std::pow(a(1), n) * x(1) * xs(1))), 1e-13);
}

TEST(VerifyPower, Examples) {
  GaussianStream s(2);
  const ComplexMatrix u = random_unitary(2, s);
  ComplexVector x = s.draw(2), xs = s.draw(2);
  x /= x.norm();
  xs /= xs.norm();
  const PowerReport r = verify_power(u, x, xs, 8, 1.0, 1e-8);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.nu2, 1.0 + 1e-6);

  const ComplexVector y = s.draw(3), ys = s.draw(3);
  const PowerReport z = verify_power(ComplexMatrix::Zero(3, 3), y, ys, 5, 1.0, 1e-8);
  EXPECT_NEAR(z.nu2, std::abs(pair(y, ys)), 1e-8 * z.nu2);
  EXPECT_TRUE(z.pass);
}

TEST(VerifyPower, RandomContractions) {
  GaussianStream s(3);
  for (int i = 0; i < 10; ++i) {
    const ComplexMatrix t = random_with_norm(3, 0.95, s);
    const PowerReport r = verify_power(t, s.draw(3), s.draw(3), 12, power_bound(t, 12), 1e-8);
    EXPECT_TRUE(r.pass);
  }
}

TEST(RhoEval, Examples) {
  GaussianStream s(4);
  const ComplexMatrix t = s.draw_matrix(3, 3);
  EXPECT_EQ(rho_eval(t, AnalyticPolynomial::monomial(0)), ComplexMatrix::Identity(3, 3));
  EXPECT_LT(max_abs(ComplexMatrix(rho_eval(t, AnalyticPolynomial::monomial(1)) - t)), 1e-15);
  const ComplexMatrix n = nilpotent();
  EXPECT_EQ(rho_eval(n, poly({1, 2, 1})), ComplexMatrix(ComplexMatrix::Identity(2, 2) + 2.0 * n));
}

TEST(RhoEval, Multiplicative) {
  GaussianStream s(5);
  const ComplexMatrix t = random_with_norm(3, 0.9, s);
  const AnalyticPolynomial f{s.draw(4)}, g{s.draw(5)};
  EXPECT_LT(max_abs(ComplexMatrix(rho_eval(t, f * g) - rho_eval(t, f) * rho_eval(t, g))), 1e-10);
}

TEST(A0Upper, MonomialCalibration) {
  for (int n : {0, 1, 5, 12}) {
    const AnalyticPolynomial e = AnalyticPolynomial::monomial(n);
    A0Decomposition dec;
    dec.pairs.emplace_back(TrigPolynomial::from(e), e);
    EXPECT_NEAR(a0_upper(e, dec), 1.0, 1e-12);
    EXPECT_NEAR(a0_lower(e, delta_sequence(n, 1)).value, 1.0, 1e-12);
  }
}

TEST(A0Upper, DirichletDecomposition) {
  GaussianStream s(6);
  const int deg = 4;
  const AnalyticPolynomial f{s.draw(deg + 1)};
  const AnalyticPolynomial dirichlet{ComplexVector::Ones(deg + 1)};
  A0Decomposition dec;
  dec.pairs.emplace_back(TrigPolynomial::from(f), dirichlet);
  const double oracle = sup_quadrature(f, 400000) * l1_quadrature(dirichlet, 400000);
  const double up = a0_upper(f, dec);
  EXPECT_GE(up, oracle * (1 - 1e-6));
  EXPECT_LE(up, oracle * (1 + 1e-2));
}

TEST(A0Upper, ZeroAndMismatch) {
  EXPECT_EQ(a0_upper(AnalyticPolynomial{}, A0Decomposition{}), 0.0);
  A0Decomposition dec;
  dec.pairs.emplace_back(TrigPolynomial::from(AnalyticPolynomial::monomial(1)), AnalyticPolynomial::monomial(1));
  try {
    a0_upper(AnalyticPolynomial::monomial(2), dec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DecompositionMismatch);
  }
}

TEST(A0Lower, Examples) {
  GaussianStream s(7);
  const AnalyticPolynomial f{s.draw(5)};
  for (int n = 0; n < 5; ++n) EXPECT_NEAR(a0_lower(f, delta_sequence(n, 1)).functional, std::abs(f.coeffs(n)), 1e-14);
  const AnalyticPolynomial pos = poly({1, 2, 0.5});
  const HankelSequence ones{ComplexVector::Ones(3), 1, false};
  EXPECT_NEAR(a0_lower(pos, ones).functional, 3.5 / 3.0, 1e-14);
}

TEST(A0Bounds, Sandwich) {
  GaussianStream s(8);
  for (int i = 0; i < 5; ++i) {
    const AnalyticPolynomial f{s.draw(4)};
    A0Decomposition dec;
    dec.pairs.emplace_back(TrigPolynomial::from(f), AnalyticPolynomial{ComplexVector::Ones(4)});
    const double up = a0_upper(f, dec);
    for (const HankelSequence& m : {geometric_sequence(0.7, 3), harmonic_sequence(3), delta_sequence(2, 1),
                                    HankelSequence{s.draw(4), 1, false}})
      EXPECT_LE(a0_lower(f, m).value, up * (1 + 1e-9));
  }
}

TEST(A0Bounds, CalculusConsequence) {
  GaussianStream s(9);
  for (int i = 0; i < 10; ++i) {
    const ComplexMatrix t = random_with_norm(3, s.next_uniform(), s);
    const AnalyticPolynomial f{s.draw(5)};
    A0Decomposition dec;
    dec.pairs.emplace_back(TrigPolynomial::from(f), AnalyticPolynomial{ComplexVector::Ones(5)});
    const double gamma = power_bound(t, 5);
    EXPECT_LE(spectral_norm(rho_eval(t, f)), gamma * gamma * a0_upper(f, dec) * (1 + 1e-6));
  }
}

TEST(HillePhillips, ScalarExponential) {
  const SemigroupSample sg = sample_semigroup(ComplexMatrix::Identity(1, 1), 1e-3, 501);
  const HillePhillips hp = hille_phillips(sg, ComplexVector::Ones(1001));
  EXPECT_NEAR(hp.value(0, 0).real(), 1.0 - std::exp(-1.0), 1e-5);
  EXPECT_TRUE(hp.rough_ok);
}

TEST(HillePhillips, TrivialCases) {
  GaussianStream s(10);
  const SemigroupSample sg = sample_semigroup(ComplexMatrix::Zero(2, 2), 0.1, 6);
  const ComplexVector b = s.draw(11);
  cplx quad = 0.0;
  for (int j = 0; j < 11; ++j) quad += (j == 0 || j == 10 ? 0.5 : 1.0) * 0.1 * b(j);
  const HillePhillips hp = hille_phillips(sg, b);
  EXPECT_LT(max_abs(ComplexMatrix(hp.value - quad * ComplexMatrix::Identity(2, 2))), 1e-14);
  EXPECT_EQ(hille_phillips(sg, ComplexVector::Zero(11)).value, ComplexMatrix::Zero(2, 2));
  try {
    hille_phillips(sg, ComplexVector::Zero(5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GridMismatch);
  }
}

TEST(HillePhillips, RoughBoundOnRandomSemigroups) {
  GaussianStream s(11);
  for (int i = 0; i < 10; ++i) {
    ComplexMatrix g = s.draw_matrix(3, 3);
    g.diagonal().array() += 3.0;
    const SemigroupSample sg = sample_semigroup(g, 0.05, 10);
    EXPECT_LT(sg.semigroup_defect(), 1e-8);
    EXPECT_TRUE(hille_phillips(sg, s.draw(19)).rough_ok);
  }
}

TEST(VerifySemigroup, Examples) {
  GaussianStream s(12);
  const ComplexMatrix h = s.draw_matrix(3, 3);
  const ComplexMatrix skew = (h - h.adjoint()) / 2.0;
  ComplexVector x = s.draw(3), xs = s.draw(3);
  x /= x.norm();
  xs /= xs.norm();
  const SemigroupReport r = verify_semigroup(sample_semigroup(skew, 0.3, 8), x, xs, 1.0, 1e-8);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.nu2, 1.0 + 1e-6);

  const SemigroupReport one = verify_semigroup(sample_semigroup(ComplexMatrix::Identity(3, 3), 0.2, 6), x, xs, 1.0, 1e-9);
  EXPECT_NEAR(one.nu2, std::abs(pair(x, xs)), 1e-8);
}
