#include <gtest/gtest.h>

#include "gpwb/moment_maps.hpp"
#include "gpwb/random.hpp"

using namespace gpwb;

namespace {

struct RepCase {
  const char* name;
  ProductGroupSpec spec;
  RepSpec rep;
};

std::vector<RepCase> rep_cases() {
  return {
      {"tensor", ProductGroupSpec({2, 3}), RepSpec::tensor(2, 3)},
      {"hom", ProductGroupSpec({3, 2}), RepSpec::hom(3, 2)},
      {"coherent", ProductGroupSpec({2, 2}), RepSpec::hom(2, 2)},
      {"twisted", ProductGroupSpec({2, 2, 2}), RepSpec::twisted_hom(2, 2, 2)},
      {"higgs", ProductGroupSpec({1, 3}), RepSpec::higgs(3)},
  };
}

}  // namespace

TEST(Act, IdentityIsNoop) {
  for (const auto& c : rep_cases()) {
    Rng rng(1);
    const CVector x = random_vector(c.rep.dim(), rng);
    EXPECT_NEAR((act(GroupElement::identity(c.spec), x, c.rep) - x).norm(), 0.0, 1e-15) << c.name;
  }
}

TEST(Act, HomIsConjugation) {
  ProductGroupSpec spec({2, 3});
  Rng rng(2);
  const auto g = random_group_element(spec, rng);
  const Matrix t = Matrix::Random(2, 3);
  // Row-major flattening of T: slot 0 is the row index.
  CVector x(6);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b) x(a * 3 + b) = t(a, b);
  const CVector y = act(g, x, RepSpec::hom(2, 3));
  const Matrix expected = g.blocks[0] * t * g.blocks[1].inverse();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(std::abs(y(a * 3 + b) - expected(a, b)), 0.0, 1e-12);
}

TEST(Act, CompositionLaw) {
  for (const auto& c : rep_cases()) {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const auto g = random_group_element(c.spec, rng);
      const auto h = random_group_element(c.spec, rng);
      const CVector x = random_vector(c.rep.dim(), rng);
      const CVector lhs = act(g, act(h, x, c.rep), c.rep);
      const CVector rhs = act(g * h, x, c.rep);
      EXPECT_NEAR((lhs - rhs).norm(), 0.0, 1e-11 * (1.0 + rhs.norm())) << c.name;
    }
  }
}

TEST(InfinitesimalAct, ZeroAndStandard) {
  ProductGroupSpec spec({3});
  Rng rng(4);
  const CVector x = random_vector(3, rng);
  EXPECT_EQ(infinitesimal_act(AlgebraElement::zero(spec), x, RepSpec::standard(3)).norm(), 0.0);
  const auto s = random_algebra(spec, rng);
  EXPECT_NEAR((infinitesimal_act(s, x, RepSpec::standard(3)) - s.blocks[0] * x).norm(), 0.0, 1e-14);
}

TEST(InfinitesimalAct, MatchesFiniteDifference) {
  for (const auto& c : rep_cases()) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const auto s = random_algebra(c.spec, rng);
      const CVector x = random_vector(c.rep.dim(), rng);
      const double eps = 1e-6;
      const CVector fd = (act(exp_element(s, eps), x, c.rep) - x) / eps;
      const CVector exact = infinitesimal_act(s, x, c.rep);
      EXPECT_LT((fd - exact).norm() / exact.norm(), 1e-4) << c.name;
    }
  }
}

TEST(MuFundamental, Examples) {
  const Matrix m = mu_fundamental(CVector::Unit(2, 0));
  EXPECT_EQ(m(0, 0), -kI);
  EXPECT_EQ(m(1, 1), Complex(0.0));
  EXPECT_EQ(mu_fundamental(CVector::Zero(2)).norm(), 0.0);
}

TEST(MuFactor, ScalarHomSigns) {
  const RepSpec rep = RepSpec::hom(1, 1);
  const CVector x = CVector::Ones(1);
  EXPECT_EQ(mu_factor(x, rep, 0)(0, 0), -kI);
  EXPECT_EQ(mu_factor(x, rep, 1)(0, 0), kI);
}

TEST(MuFactor, AdjointNilpotentAndNormal) {
  const RepSpec rep = RepSpec::higgs(2);
  CVector nil = CVector::Zero(4);
  nil(1) = 1.0;  // [[0,1],[0,0]]
  const Matrix m = mu_factor(nil, rep, 1);
  EXPECT_NEAR(std::abs(m(0, 0) + kI), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m(1, 1) - kI), 0.0, 1e-15);
  CVector normal = CVector::Zero(4);
  normal(0) = Complex(2.0, 1.0);
  normal(3) = -3.0;
  EXPECT_NEAR(mu_factor(normal, rep, 1).norm(), 0.0, 1e-15);
}

TEST(MuFactor, TrivialFactorThrows) {
  RepSpec rep({{2, 0, SlotAction::standard}, {2, 1, SlotAction::trivial}});
  EXPECT_THROW(mu_factor(CVector::Ones(4), rep, 1), DimensionError);
}

TEST(MuFull, TwistedFirstBlockSumsOverTwist) {
  const int n1 = 2, n2 = 2, n3 = 3;
  Rng rng(6);
  const CVector x = random_vector(n1 * n2 * n3, rng);
  Matrix expected = Matrix::Zero(n1, n1);
  for (int j = 0; j < n3; ++j) {
    Matrix phi(n1, n2);
    for (int a = 0; a < n1; ++a)
      for (int b = 0; b < n2; ++b) phi(a, b) = x((a * n2 + b) * n3 + j);
    expected += -kI * phi * phi.adjoint();
  }
  const auto mu = mu_full(x, RepSpec::twisted_hom(n1, n2, n3), ProductGroupSpec({n1, n2, n3}));
  EXPECT_NEAR((mu.blocks[0] - expected).norm(), 0.0, 1e-13);
}

TEST(MuFull, ZeroVector) {
  for (const auto& c : rep_cases()) {
    const auto mu = mu_full(CVector::Zero(c.rep.dim()), c.rep, c.spec);
    for (const auto& b : mu.blocks) EXPECT_EQ(b.norm(), 0.0);
  }
}

TEST(MuShifted, Examples) {
  ProductGroupSpec u1({1});
  const RepSpec rep = RepSpec::standard(1);
  CVector x(1);
  x(0) = Complex(1.2, -0.5);
  const auto setting = SubgroupSetting::all_full(u1, {std::norm(x(0))});
  EXPECT_NEAR(norm(mu_shifted(x, rep, setting), u1), 0.0, 1e-15);

  ProductGroupSpec spec({2, 3});
  Rng rng(7);
  const CVector y = random_vector(6, rng);
  const auto plain = mu_shifted(y, RepSpec::tensor(2, 3), SubgroupSetting::all_full(spec, {0.0, 0.0}));
  const auto full = mu_full(y, RepSpec::tensor(2, 3), spec);
  EXPECT_EQ(plain.blocks, full.blocks);
  SubgroupSetting frozen(spec, {FactorMode::full, FactorMode::frozen}, {1.0, 0.0});
  EXPECT_EQ(mu_shifted(y, RepSpec::tensor(2, 3), frozen).blocks[1].norm(), 0.0);
}

TEST(MomentMapProperties, EquivarianceSkewHamiltonianSumRules) {
  for (const auto& c : rep_cases()) {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
      const CVector x = random_vector(c.rep.dim(), rng);
      const auto k = random_unitary_element(c.spec, rng);
      const auto lhs = mu_full(act(k, x, c.rep), c.rep, c.spec);
      const auto rhs = adjoint_action(k, mu_full(x, c.rep, c.spec));
      for (std::size_t f = 0; f < c.spec.factors(); ++f) {
        EXPECT_NEAR((lhs.blocks[f] - rhs.blocks[f]).norm(), 0.0, 1e-11 * (1.0 + rhs.blocks[f].norm()))
            << c.name;
        const Matrix& b = lhs.blocks[f];
        EXPECT_LE((b + b.adjoint()).norm(), 1e-12 * (1.0 + b.norm())) << c.name;
      }

      const auto s = random_algebra(c.spec, rng);
      const CVector v = random_vector(c.rep.dim(), rng);
      const double eps = 1e-5;
      const double fd = (inner_product(mu_full(x + eps * v, c.rep, c.spec), s, c.spec) -
                         inner_product(mu_full(x - eps * v, c.rep, c.spec), s, c.spec)) /
                        (2.0 * eps);
      const double exact = -2.0 * symplectic_form(infinitesimal_act(s, x, c.rep), v);
      EXPECT_LT(std::abs(fd - exact), 1e-4 * (1.0 + std::abs(exact))) << c.name;
    }
  }
}

TEST(MomentMapProperties, HomTraceSumAndAdjointTraceless) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const CVector t = random_vector(6, rng);
    const auto mu = mu_full(t, RepSpec::hom(2, 3), ProductGroupSpec({2, 3}));
    EXPECT_NEAR(std::abs(mu.blocks[0].trace() + mu.blocks[1].trace()), 0.0, 1e-12);
    const CVector a = random_vector(9, rng);
    EXPECT_NEAR(std::abs(mu_factor(a, RepSpec::higgs(3), 1).trace()), 0.0, 1e-13);
  }
}

TEST(MomentMapProperties, BasisIndependentUnderRebasingOfOtherSlot) {
  // Re-basing the second slot by a unitary does not change the first block.
  Rng rng(10);
  ProductGroupSpec spec({2, 3});
  const CVector x = random_vector(6, rng);
  GroupElement k = GroupElement::identity(spec);
  k.blocks[1] = random_unitary(3, rng);
  const auto a = mu_factor(x, RepSpec::tensor(2, 3), 0);
  const auto b = mu_factor(act(k, x, RepSpec::tensor(2, 3)), RepSpec::tensor(2, 3), 0);
  EXPECT_NEAR((a - b).norm(), 0.0, 1e-13);
}
