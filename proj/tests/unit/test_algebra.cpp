#include <gtest/gtest.h>

#include <numbers>

#include "gpwb/algebra.hpp"
#include "gpwb/random.hpp"

using namespace gpwb;

namespace {

AlgebraElement single(const Matrix& m) {
  AlgebraElement s;
  s.blocks.push_back(m);
  return s;
}

Matrix diag2(Complex a, Complex b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST(ProductGroupSpec, RejectsEmptyAndNonPositive) {
  EXPECT_THROW(ProductGroupSpec({}), std::invalid_argument);
  EXPECT_THROW(ProductGroupSpec({2, 0}), DimensionError);
  ProductGroupSpec spec({2, 3});
  EXPECT_EQ(spec.aux_dim(), 5);
}

TEST(InnerProduct, DiagonalExample) {
  ProductGroupSpec spec({2});
  const auto u = single(diag2(kI, -kI));
  EXPECT_DOUBLE_EQ(inner_product(u, u, spec), 2.0);
}

TEST(InnerProduct, ZeroIsAnnihilating) {
  ProductGroupSpec spec({2, 3});
  Rng rng(3);
  const auto v = random_algebra(spec, rng);
  EXPECT_EQ(inner_product(AlgebraElement::zero(spec), v, spec), 0.0);
}

TEST(InnerProduct, SymmetricBilinearPositive) {
  ProductGroupSpec spec({2, 3});
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = random_algebra(spec, rng);
    const auto v = random_algebra(spec, rng);
    const auto w = random_algebra(spec, rng);
    EXPECT_NEAR(inner_product(u, v, spec), inner_product(v, u, spec), 1e-14);
    const double lhs = inner_product(2.0 * u + (-3.0) * v, w, spec);
    const double rhs = 2.0 * inner_product(u, w, spec) - 3.0 * inner_product(v, w, spec);
    EXPECT_NEAR(lhs, rhs, 1e-12 * (1.0 + std::abs(rhs)));
    EXPECT_GT(inner_product(u, u, spec), 0.0);
  }
}

TEST(InnerProduct, DimensionMismatchNamesFactor) {
  ProductGroupSpec spec({2, 3});
  AlgebraElement bad = AlgebraElement::zero(spec);
  bad.blocks[1] = Matrix::Zero(2, 2);
  try {
    inner_product(bad, bad, spec);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_EQ(e.factor(), 1u);
  }
}

TEST(ProjectSubalgebra, FrozenFactorZeroed) {
  ProductGroupSpec spec({2, 2});
  Rng rng(5);
  const auto s = random_algebra(spec, rng);
  SubgroupSetting setting(spec, {FactorMode::full, FactorMode::frozen}, {1.0, 0.0});
  const auto p = project_subalgebra(s, setting);
  EXPECT_EQ(p.blocks[0], s.blocks[0]);
  EXPECT_EQ(p.blocks[1], Matrix::Zero(2, 2));
}

TEST(ProjectSubalgebra, IdentityWhenAllFull) {
  ProductGroupSpec spec({2, 3});
  Rng rng(6);
  const auto s = random_algebra(spec, rng);
  const auto p = project_subalgebra(s, SubgroupSetting::all_full(spec, {0.0, 0.0}));
  EXPECT_EQ(p.blocks, s.blocks);
}

TEST(ProjectSubalgebra, SelfAdjointIdempotentOrthogonal) {
  ProductGroupSpec spec({2, 3, 1});
  SubgroupSetting setting(spec, {FactorMode::full, FactorMode::frozen, FactorMode::constant},
                          {1.0, 2.0, 3.0});
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_algebra(spec, rng);
    const auto t = random_algebra(spec, rng);
    const auto ps = project_subalgebra(s, setting);
    const auto pt = project_subalgebra(t, setting);
    EXPECT_NEAR(inner_product(ps, t, spec), inner_product(s, pt, spec), 1e-14);
    EXPECT_EQ(project_subalgebra(ps, setting).blocks, ps.blocks);
    EXPECT_NEAR(inner_product(ps, t - pt, spec), 0.0, 1e-13);
  }
}

TEST(SubgroupSetting, ShiftBlocks) {
  ProductGroupSpec spec({2, 3});
  SubgroupSetting setting(spec, {FactorMode::full, FactorMode::frozen}, {1.5, 7.0});
  EXPECT_EQ(setting.central_shift().blocks[0], Matrix(-kI * 1.5 * Matrix::Identity(2, 2)));
  EXPECT_EQ(setting.central_shift().blocks[1], Matrix::Zero(3, 3));
  EXPECT_THROW(SubgroupSetting(spec, {FactorMode::frozen, FactorMode::frozen}, {0.0, 0.0}),
               std::invalid_argument);
}

TEST(ExpElement, ZeroGivesIdentity) {
  ProductGroupSpec spec({2, 3});
  const auto g = exp_element(AlgebraElement::zero(spec), 1.0);
  EXPECT_TRUE(g.is_unitary(1e-14));
  EXPECT_NEAR((g.blocks[1] - Matrix::Identity(3, 3)).norm(), 0.0, 1e-15);
}

TEST(ExpElement, HalfTurn) {
  const auto g = exp_element(single(diag2(kI, -kI)), std::numbers::pi);
  EXPECT_NEAR((g.blocks[0] + Matrix::Identity(2, 2)).norm(), 0.0, 1e-12);
  EXPECT_EQ(g.flavor, GroupFlavor::unitary);
}

TEST(ExpElement, InverseAndOneParameterLaw) {
  ProductGroupSpec spec({2, 3});
  Rng rng(9);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_algebra(spec, rng);
    const auto id = exp_element(s, 1.0) * exp_element(s, -1.0);
    for (std::size_t f = 0; f < spec.factors(); ++f)
      EXPECT_NEAR((id.blocks[f] - Matrix::Identity(spec.dim(f), spec.dim(f))).norm(), 0.0, 1e-12);
    const double a = unif(rng);
    const double b = unif(rng);
    const auto lhs = exp_element(s, a) * exp_element(s, b);
    const auto rhs = exp_element(s, a + b);
    for (std::size_t f = 0; f < spec.factors(); ++f)
      EXPECT_NEAR((lhs.blocks[f] - rhs.blocks[f]).norm(), 0.0, 1e-10);
  }
}

TEST(ExpElement, GeneralFlavorMatchesCompactPath) {
  ProductGroupSpec spec({3});
  Rng rng(10);
  auto s = random_algebra(spec, rng);
  auto g = s;
  g.flavor = AlgebraFlavor::general;
  const auto a = exp_element(s, Complex(0.3, 0.7));
  const auto b = exp_element(g, Complex(0.3, 0.7));
  EXPECT_NEAR((a.blocks[0] - b.blocks[0]).norm(), 0.0, 1e-11);
}

TEST(CartanInvolution, FixesUnitaries) {
  ProductGroupSpec spec({3, 2});
  Rng rng(12);
  const auto k = random_unitary_element(spec, rng);
  const auto kk = cartan_involution(k);
  for (std::size_t f = 0; f < spec.factors(); ++f)
    EXPECT_NEAR((kk.blocks[f] - k.blocks[f]).norm(), 0.0, 1e-12);
}

TEST(CartanInvolution, ScalarExample) {
  GroupElement g;
  g.flavor = GroupFlavor::complexified;
  g.blocks.push_back(Matrix::Constant(1, 1, 2.0));
  EXPECT_NEAR(std::abs(cartan_involution(g).blocks[0](0, 0) - 0.5), 0.0, 1e-15);
}

TEST(CartanInvolution, Involutive) {
  ProductGroupSpec spec({3, 2});
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_group_element(spec, rng);
    const auto gg = cartan_involution(cartan_involution(g));
    for (std::size_t f = 0; f < spec.factors(); ++f)
      EXPECT_NEAR((gg.blocks[f] - g.blocks[f]).norm(), 0.0, 1e-10 * (1.0 + g.blocks[f].norm()));
  }
}

TEST(CartanInvolution, SingularBlockThrows) {
  GroupElement g;
  g.flavor = GroupFlavor::complexified;
  g.blocks.push_back(Matrix::Zero(2, 2));
  EXPECT_THROW(cartan_involution(g), DimensionError);
}

TEST(PositivePartLog, RecoversPolarFactor) {
  ProductGroupSpec spec({3});
  Rng rng(14);
  const auto u = random_algebra(spec, rng, 0.4);
  const auto k = random_unitary_element(spec, rng);
  const auto g = k * exp_element(u, Complex(0.0, 1.0));
  const auto back = positive_part_log(g);
  EXPECT_NEAR((back.blocks[0] - u.blocks[0]).norm(), 0.0, 1e-10);
  EXPECT_NEAR(sup_log_metric(k), 0.0, 1e-12);
}

TEST(Linalg, LogUnitaryInvertsExp) {
  Rng rng(15);
  const Matrix s = 0.5 * random_skew_hermitian(4, rng);
  const Matrix u = linalg::expm(s);
  EXPECT_NEAR((linalg::log_unitary(u) - s).norm(), 0.0, 1e-11);
}
