#include <gtest/gtest.h>

#include "cbfactor/group.hpp"

using namespace cbf;

namespace {

std::vector<FiniteGroup> small_groups() {
  return {cyclic_group(1), cyclic_group(2), cyclic_group(8), cyclic_group(24), dihedral_group(3),
          dihedral_group(4), dihedral_group(12), symmetric_group(3), symmetric_group(4)};
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST(MakeGroup, KnownStructure) {
  const FiniteGroup z2 = make_group({"cyclic", 2, {}});
  EXPECT_EQ(z2.table(), (std::vector<std::vector<int>>{{0, 1}, {1, 0}}));
  const FiniteGroup s3 = make_group({"symmetric", 3, {}});
  EXPECT_EQ(s3.order(), 6);
  EXPECT_FALSE(s3.abelian());
  EXPECT_EQ(make_group({"dihedral", 4, {}}).order(), 8);
  EXPECT_FALSE(dihedral_group(4).abelian());
  EXPECT_TRUE(cyclic_group(8).abelian());
  EXPECT_EQ(symmetric_group(4).order(), 24);
}

TEST(MakeGroup, InvalidTables) {
  EXPECT_EQ(kind_of([] { FiniteGroup({{0, 1}, {0, 1}}); }), ErrorKind::NotAGroup);  // not Latin
  EXPECT_EQ(kind_of([] { FiniteGroup({{0, 1}, {1}}); }), ErrorKind::NotAGroup);     // ragged
  EXPECT_EQ(kind_of([] { FiniteGroup({{0, 5}, {5, 0}}); }), ErrorKind::NotAGroup);  // out of range
  // Latin square without associativity: a quasigroup of order 3.
  EXPECT_EQ(kind_of([] { FiniteGroup({{0, 2, 1}, {2, 1, 0}, {1, 0, 2}}); }), ErrorKind::NotAGroup);
  EXPECT_EQ(kind_of([] { make_group({"symmetric", 5, {}}); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { make_group({"klein", 4, {}}); }), ErrorKind::InvalidInput);
}

TEST(MakeGroup, RelabelledTableIsAccepted) {
  // Z_2 with the identity stored at index 1.
  const FiniteGroup g({{1, 0}, {0, 1}});
  EXPECT_EQ(g.identity(), 1);
  EXPECT_EQ(g.inverse(0), 0);
}

TEST(LeftRegular, Examples) {
  const Representation z2 = left_regular(cyclic_group(2));
  ComplexMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  EXPECT_EQ(z2.matrices[0], ComplexMatrix::Identity(2, 2));
  EXPECT_EQ(z2.matrices[1], swap);
  for (const auto& g : small_groups()) {
    const Representation l = left_regular(g);
    EXPECT_EQ(l.matrices[static_cast<size_t>(g.identity())], ComplexMatrix::Identity(g.order(), g.order()));
  }
}

TEST(LeftRegular, ExactlyMultiplicativeOnS3) {
  const FiniteGroup s3 = symmetric_group(3);
  const Representation l = left_regular(s3);
  for (int s = 0; s < 6; ++s)
    for (int t = 0; t < 6; ++t)
      EXPECT_EQ(l.matrices[static_cast<size_t>(s)] * l.matrices[static_cast<size_t>(t)], l.matrices[static_cast<size_t>(s3.mul(s, t))]);
  EXPECT_EQ(l.homomorphism_defect(), 0.0);
}

TEST(Representations, NaturalOnesAreUnitaryHomomorphisms) {
  for (const Representation& r : {permutation_representation(3), standard_representation(3), standard_representation(4),
                                  dihedral_representation(4), dihedral_representation(5), cyclic_character(8, 3)}) {
    EXPECT_NO_THROW(r.validate());
    for (const auto& m : r.matrices)
      EXPECT_LT(max_abs(ComplexMatrix(m.adjoint() * m - ComplexMatrix::Identity(r.dim(), r.dim()))), 1e-12);
  }
}

TEST(Representations, ConjugationKeepsHomomorphism) {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  const Representation c = conjugate(dihedral_representation(4), d);
  EXPECT_NO_THROW(c.validate());
  EXPECT_LE(c.sup_norm(), 2.0 + 1e-12);
  EXPECT_GT(c.sup_norm(), 1.0);
}

TEST(SigmaHom, Deltas) {
  const FiniteGroup g = symmetric_group(3);
  const Representation pi = standard_representation(3);
  EXPECT_LT(max_abs(ComplexMatrix(sigma_hom(pi, GroupFunction::delta(g, g.identity())) - ComplexMatrix::Identity(2, 2))), 1e-15);
  for (int s = 0; s < 6; ++s)
    EXPECT_EQ(sigma_hom(pi, GroupFunction::delta(g, s)), pi.matrices[static_cast<size_t>(s)]);
}

TEST(SigmaHom, IntertwinesConvolution) {
  GaussianStream st(1);
  for (const auto& g : small_groups()) {
    const Representation l = left_regular(g);
    const GroupFunction f{g, st.draw(g.order())}, h{g, st.draw(g.order())};
    const ComplexMatrix lhs = sigma_hom(l, convolution(f, h));
    const ComplexMatrix rhs = sigma_hom(l, f) * sigma_hom(l, h);
    EXPECT_LT(spectral_norm(ComplexMatrix(lhs - rhs)), 1e-10);
  }
}

TEST(Convolution, DirectOracleOnS3) {
  GaussianStream st(2);
  const FiniteGroup g = symmetric_group(3);
  const GroupFunction f{g, st.draw(6)}, h{g, st.draw(6)};
  const GroupFunction c = convolution(f, h);
  for (int u = 0; u < 6; ++u) {
    cplx acc = 0.0;
    for (int t = 0; t < 6; ++t) acc += f.values(t) * h.values(g.mul(g.inverse(t), u));
    EXPECT_LT(std::abs(acc - c.values(u)), 1e-13);
  }
}

TEST(QNorm, Examples) {
  const FiniteGroup s3 = symmetric_group(3);
  EXPECT_NEAR(q_norm(GroupFunction::delta(s3, s3.identity())), 1.0, 1e-14);
  EXPECT_NEAR(q_norm(GroupFunction::delta(s3, 4)), 1.0, 1e-14);
  const FiniteGroup z2 = cyclic_group(2);
  EXPECT_NEAR(q_norm({z2, Eigen::Vector2cd(0.5, 0.5)}), 1.0, 1e-14);
}

TEST(FourierCbNorm, Examples) {
  const FiniteGroup z6 = cyclic_group(6);
  EXPECT_NEAR(fourier_cb_norm({z6, ComplexVector::Ones(6)}, 1e-9).value, 1.0, 1e-8);
  for (int j = 0; j < 6; ++j) {
    ComplexVector chi(6);
    for (int k = 0; k < 6; ++k) chi(k) = std::polar(1.0, 2 * M_PI * j * k / 6.0);
    EXPECT_NEAR(fourier_cb_norm({z6, chi}, 1e-9).value, 1.0, 1e-8);
  }
  const FiniteGroup z4 = cyclic_group(4);
  EXPECT_NEAR(fourier_cb_norm(GroupFunction::delta(z4, 0), 1e-9).value, 1.0, 1e-8);
}

TEST(FourierCbNorm, KernelOrientation) {
  // psi is not a class function on S3, so psi(ts) and psi(st) differ.
  const FiniteGroup g = symmetric_group(3);
  ComplexVector v(6);
  v << 1, 2, 3, 4, 5, 6;
  const GroupFunction psi{g, v};
  const SchurKernel k = fourier_kernel(psi);
  bool differs = false;
  for (int s = 0; s < 6; ++s)
    for (int t = 0; t < 6; ++t) {
      EXPECT_EQ(k(s, t), v(g.mul(t, s)));
      differs = differs || k(s, t) != v(g.mul(s, t));
    }
  EXPECT_TRUE(differs);
}

TEST(FourierCbNorm, DominatesSupNormAndPairing) {
  GaussianStream st(3);
  for (const auto& g : {symmetric_group(3), dihedral_group(4), cyclic_group(5)}) {
    const GroupFunction psi{g, st.draw(g.order())};
    const double cb = fourier_cb_norm(psi, 1e-9).value;
    EXPECT_GE(cb, psi.values.cwiseAbs().maxCoeff() - 1e-9);
    for (int i = 0; i < 10; ++i) {
      const GroupFunction f{g, st.draw(g.order())};
      const double pairing = std::abs((f.values.array() * psi.values.array()).sum());
      EXPECT_LE(pairing, q_norm(f) * cb * (1 + 1e-8) + 1e-9);
    }
  }
}

TEST(VerifyGroup, RegularIsEquality) {
  GaussianStream st(4);
  const FiniteGroup g = dihedral_group(4);
  const GroupFunction f{g, st.draw(8)};
  const GroupReport r = verify_group(left_regular(g), f, 1.0, 1e-9);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.sigma_norm, r.q_norm, 1e-12 * r.q_norm);
}

TEST(VerifyGroup, UnitaryRepresentationsOnS3) {
  GaussianStream st(5);
  const FiniteGroup g = symmetric_group(3);
  const Representation pi = conjugate(standard_representation(3), random_unitary(2, st));
  for (int i = 0; i < 100; ++i) {
    const GroupFunction f{g, st.draw(6)};
    EXPECT_LE(spectral_norm(sigma_hom(pi, f)), q_norm(f) * (1 + 1e-8));
  }
}

TEST(VerifyGroup, SimilarityConjugated) {
  GaussianStream st(6);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  const Representation pi = conjugate(standard_representation(3), d);
  for (int i = 0; i < 50; ++i) {
    const GroupFunction f{symmetric_group(3), st.draw(6)};
    const GroupReport r = verify_group(pi, f, 2.0, 1e-9);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.bound, 4.0 * r.q_norm, 1e-12 * r.bound);
  }
}

TEST(SigmaHom, GroupMismatch) {
  EXPECT_THROW(sigma_hom(left_regular(cyclic_group(3)), GroupFunction::delta(cyclic_group(4), 0)), Error);
  EXPECT_THROW((GroupFunction{cyclic_group(3), ComplexVector::Ones(4)}), Error);
}
