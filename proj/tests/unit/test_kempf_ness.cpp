#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gpwb/kempf_ness.hpp"
#include "gpwb/random.hpp"

using namespace gpwb;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix span_of(std::initializer_list<int> axes, int n) {
  Matrix q = Matrix::Zero(n, static_cast<Eigen::Index>(axes.size()));
  int c = 0;
  for (int a : axes) q(a, c++) = 1.0;
  return q;
}

AlgebraElement diag_element(std::initializer_list<double> alphas) {
  // chi with i*chi = diag(alphas)
  const int n = static_cast<int>(alphas.size());
  Matrix m = Matrix::Zero(n, n);
  int k = 0;
  for (double a : alphas) {
    m(k, k) = -kI * a;
    ++k;
  }
  AlgebraElement s;
  s.blocks.push_back(m);
  return s;
}

}  // namespace

TEST(NegativeSubspace, ZeroElementGivesEverything) {
  ProductGroupSpec spec({2, 3});
  EXPECT_EQ(negative_subspace(AlgebraElement::zero(spec), RepSpec::tensor(2, 3)).cols(), 6);
}

TEST(NegativeSubspace, TensorExampleFollowsEigenvalueSign) {
  ProductGroupSpec spec({2, 2});
  AlgebraElement s = AlgebraElement::zero(spec);
  s.blocks[0](0, 0) = -kI;
  s.blocks[0](1, 1) = kI;
  // i*s = diag(1,-1): the non-positive eigenspace is e2 (x) C^2.
  const Matrix q = negative_subspace(s, RepSpec::tensor(2, 2));
  ASSERT_EQ(q.cols(), 2);
  const Matrix p = q * q.adjoint();
  Matrix expected = Matrix::Zero(4, 4);
  expected(2, 2) = 1.0;
  expected(3, 3) = 1.0;
  EXPECT_NEAR((p - expected).norm(), 0.0, 1e-12);
}

TEST(NegativeSubspace, AdjointMatchesKroneckerOracle) {
  ProductGroupSpec spec({1, 2});
  AlgebraElement s = AlgebraElement::zero(spec);
  s.blocks[1](0, 0) = kI;  // i*s = diag(-1, 0)
  const Matrix q = negative_subspace(s, RepSpec::higgs(2));
  ASSERT_EQ(q.cols(), 3);
  // Oracle: i(S (x) I - I (x) S^T) on row-major End(C^2) is diag(0,-1,1,0).
  const Matrix sm = s.blocks[1];
  Matrix op = Matrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          Complex v = 0.0;
          if (b == d) v += sm(a, c);
          if (a == c) v -= sm(d, b);
          op(a * 2 + b, c * 2 + d) = kI * v;
        }
  Eigen::SelfAdjointEigenSolver<Matrix> es(op);
  Matrix oracle(4, 0);
  for (int k = 0; k < 4; ++k)
    if (es.eigenvalues()(k) <= 1e-12) {
      oracle.conservativeResize(4, oracle.cols() + 1);
      oracle.col(oracle.cols() - 1) = es.eigenvectors().col(k);
    }
  EXPECT_NEAR((q * q.adjoint() - oracle * oracle.adjoint()).norm(), 0.0, 1e-12);
  // Lower-left entry is the excluded direction: upper-triangular endomorphisms survive.
  EXPECT_NEAR((q.adjoint() * CVector::Unit(4, 2)).norm(), 0.0, 1e-12);
}

TEST(MaximalWeight, ZeroVectorAndPositiveEigenvector) {
  const RepSpec rep = RepSpec::standard(2);
  const auto s = diag_element({1.0, -1.0});
  EXPECT_EQ(maximal_weight(CVector::Zero(2), s, rep), 0.0);
  EXPECT_EQ(maximal_weight(CVector::Unit(2, 0), s, rep), kInf);
  EXPECT_EQ(maximal_weight(CVector::Unit(2, 1), s, rep), 0.0);
}

TEST(MaximalWeight, UnitaryInvariance) {
  ProductGroupSpec spec({2, 3});
  const RepSpec rep = RepSpec::hom(2, 3);
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    AlgebraElement s = AlgebraElement::zero(spec);
    s.blocks[0](0, 0) = -kI;
    // x in V^-(s) or not, depending on the trial.
    CVector x = random_vector(6, rng);
    if (trial % 2 == 0)
      for (int b = 0; b < 3; ++b) x(b) = 0.0;
    const auto k = random_unitary_element(spec, rng);
    EXPECT_EQ(maximal_weight(x, s, rep), maximal_weight(act(k, x, rep), adjoint_action(k, s), rep));
  }
}

TEST(TotalWeight, SingleStep) {
  ProductGroupSpec spec({3});
  const Matrix full = Matrix::Identity(3, 3);
  const double w[] = {-1.0};
  const auto filt = WeightedFiltration::from_chain(spec, 0, std::span<const Matrix>(&full, 1), w);
  const double d[] = {5.0};
  Rng rng(22);
  EXPECT_DOUBLE_EQ(total_weight(random_vector(3, rng), filt, AlgebraElement::zero(spec),
                                RepSpec::standard(3), d),
                   -5.0);
}

TEST(TotalWeight, TwoStep) {
  ProductGroupSpec spec({2});
  const Matrix chain[] = {span_of({0}, 2), Matrix::Identity(2, 2)};
  const double w[] = {0.0, 1.0};
  const auto filt = WeightedFiltration::from_chain(spec, 0, chain, w);
  const double d[] = {1.0, 3.0};
  EXPECT_NEAR(total_weight(CVector::Unit(2, 0), filt, AlgebraElement::zero(spec), RepSpec::standard(2), d),
              2.0, 1e-12);
  EXPECT_EQ(total_weight(CVector::Unit(2, 1), filt, AlgebraElement::zero(spec), RepSpec::standard(2), d),
            kInf);
}

TEST(TotalWeight, MatchesGradedSumOracle) {
  ProductGroupSpec spec({4});
  Rng rng(23);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix u = random_unitary(4, rng);
    std::vector<Matrix> chain = {u.leftCols(1), u.leftCols(3), u};
    std::vector<double> w = {unif(rng), 0.0, 0.0};
    w[1] = w[0] + 1.0 + std::abs(unif(rng));
    w[2] = w[1] + 1.0 + std::abs(unif(rng));
    const std::vector<double> degs = {unif(rng), unif(rng), unif(rng)};
    const double c0 = unif(rng);
    AlgebraElement c = AlgebraElement::zero(spec);
    c.blocks[0] = -kI * c0 * Matrix::Identity(4, 4);
    const auto filt = WeightedFiltration::from_chain(spec, 0, chain, w);
    // x inside W^1 is in V^- only when alpha_2 <= 0; take the zero vector to keep lambda = 0.
    const double got = total_weight(CVector::Zero(4), filt, c, RepSpec::standard(4), degs);
    // deg(chi) = sum alpha_k deg(gr_k), <chi,c> = c0 sum alpha_k dim(gr_k)
    const double graded_deg = w[0] * degs[0] + w[1] * (degs[1] - degs[0]) + w[2] * (degs[2] - degs[1]);
    const double pairing = c0 * (w[0] * 1 + w[1] * 2 + w[2] * 1);
    EXPECT_NEAR(got, graded_deg - pairing, 1e-10);
  }
}

TEST(TotalWeight, RejectsNonIncreasing) {
  ProductGroupSpec spec({2});
  const Matrix chain[] = {span_of({0}, 2), Matrix::Identity(2, 2)};
  const double w[] = {1.0, 1.0};
  EXPECT_THROW(WeightedFiltration::from_chain(spec, 0, chain, w), std::invalid_argument);
}

TEST(SscGenerators, Counts) {
  ProductGroupSpec spec({2});
  const Matrix one[] = {Matrix::Identity(2, 2)};
  const auto g1 = ssc_generators(spec, 0, one, 1);
  ASSERT_EQ(g1.size(), 1u);
  EXPECT_NEAR((g1[0].blocks[0] - kI * Matrix::Identity(2, 2)).norm(), 0.0, 1e-15);
  const Matrix two[] = {span_of({0}, 2), Matrix::Identity(2, 2)};
  EXPECT_EQ(ssc_generators(spec, 0, two, 1).size(), 3u);
  EXPECT_THROW(ssc_generators(spec, 0, two, 3), std::invalid_argument);
}

TEST(SscGenerators, ConeDecompositionIsNonNegative) {
  Rng rng(24);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> rdist(1, 6);
  for (int trial = 0; trial < 1000; ++trial) {
    const int r = rdist(rng);
    const int p = std::uniform_int_distribution<int>(1, r)(rng);
    std::vector<double> alpha(r);
    alpha[p - 1] = -unif(rng);
    for (int k = p - 2; k >= 0; --k) alpha[k] = alpha[k + 1] - unif(rng);
    for (int k = p; k < r; ++k) alpha[k] = alpha[k - 1] + unif(rng);
    const auto dec = decompose_in_cone(alpha, p);
    const auto gens = cone_generators(r, p);
    std::vector<double> back(r, 0.0);
    for (std::size_t i = 0; i < dec.f.size(); ++i) {
      EXPECT_GE(dec.f[i], 0.0);
      for (int k = 0; k < r; ++k) back[k] += dec.f[i] * gens.f[i][k];
    }
    for (std::size_t j = 0; j < dec.g.size(); ++j) {
      EXPECT_GE(dec.g[j], 0.0);
      for (int k = 0; k < r; ++k) back[k] += dec.g[j] * gens.g[j][k];
    }
    for (int k = 0; k < r; ++k) EXPECT_NEAR(back[k], alpha[k], 1e-12);
  }
}

TEST(StabilityTest, CircleActionOnLine) {
  ProductGroupSpec spec({1});
  const RepSpec rep = RepSpec::standard(1);
  CVector x(1);
  x(0) = 0.7;
  for (double c0 : {2.0, 0.3, -0.3, -2.0}) {
    const auto v = stability_test(x, rep, SubgroupSetting::all_full(spec, {c0}), {});
    EXPECT_EQ(v.stable, c0 > 0.0) << c0;
    if (c0 > 0.0) EXPECT_NEAR(v.slack, c0, 1e-12);
  }
  const auto degenerate = stability_test(CVector::Zero(1), rep, SubgroupSetting::all_full(spec, {0.0}), {});
  EXPECT_FALSE(degenerate.stable);
  EXPECT_TRUE(degenerate.marginal);
}

TEST(StabilityTest, FrozenTensorMatchesRankCriterion) {
  ProductGroupSpec spec({2, 3});
  const RepSpec rep = RepSpec::tensor(2, 3);
  Rng rng(25);
  for (int trial = 0; trial < 40; ++trial) {
    CVector x = random_vector(6, rng);
    const bool deficient = trial % 3 == 0;
    if (deficient)
      for (int b = 0; b < 3; ++b) x(3 + b) = 0.0;
    const double c0 = (trial % 2 == 0 ? 1.0 : -1.0) * (0.5 + trial * 0.05);
    SubgroupSetting setting(spec, {FactorMode::full, FactorMode::frozen}, {c0, 0.0});
    CandidateLattice lattice;
    lattice.per_factor = {{span_of({0}, 2), span_of({1}, 2)}, {}};
    const auto v = stability_test(x, rep, setting, lattice);
    EXPECT_EQ(v.stable, c0 > 0.0 && !deficient);
    EXPECT_EQ(is_simple(x, rep, setting), !deficient);
    // Unitary change of basis leaves the verdict and slack unchanged.
    GroupElement k = GroupElement::identity(spec);
    k.blocks[0] = random_unitary(2, rng);
    CandidateLattice rotated;
    rotated.per_factor = {{k.blocks[0] * span_of({0}, 2), k.blocks[0] * span_of({1}, 2)}, {}};
    const auto w = stability_test(act(k, x, rep), rep, setting, rotated);
    EXPECT_EQ(w.stable, v.stable);
    EXPECT_NEAR(w.slack, v.slack, 1e-10);
  }
}

TEST(StabilityTest, ConstraintOnTriviallyActingCenter) {
  ProductGroupSpec spec({1, 1});
  const RepSpec rep = RepSpec::hom(1, 1);
  const CVector x = CVector::Ones(1);
  const auto bad = stability_test(x, rep, SubgroupSetting::all_full(spec, {1.0, 0.5}), {});
  EXPECT_TRUE(bad.constraint_violated);
  EXPECT_FALSE(bad.stable);
  const auto good = stability_test(x, rep, SubgroupSetting::all_full(spec, {1.0, -1.0}), {});
  EXPECT_FALSE(good.constraint_violated);
  EXPECT_TRUE(good.stable);
}

TEST(KnFunctional, ZeroDirection) {
  ProductGroupSpec spec({2});
  Rng rng(26);
  const auto setting = SubgroupSetting::all_full(spec, {1.0});
  EXPECT_EQ(kn_functional(random_vector(2, rng), AlgebraElement::zero(spec), RepSpec::standard(2), setting, 8),
            0.0);
}

TEST(KnFunctional, CocycleIdentity) {
  ProductGroupSpec spec({2, 2});
  const RepSpec rep = RepSpec::tensor(2, 2);
  SubgroupSetting setting(spec, {FactorMode::full, FactorMode::frozen}, {1.3, 0.0});
  Rng rng(27);
  for (int trial = 0; trial < 10; ++trial) {
    const CVector x = random_vector(4, rng);
    auto s = project_subalgebra(random_algebra(spec, rng, 0.5), setting);
    auto t = project_subalgebra(random_algebra(spec, rng, 0.5), setting);
    const auto g = exp_element(s, Complex(0.0, 1.0));
    const auto h = exp_element(t, Complex(0.0, 1.0));
    const double lhs = kn_functional(x, g, rep, setting, 64) + kn_functional(act(g, x, rep), h, rep, setting, 64);
    const double rhs = kn_functional(x, h * g, rep, setting, 64);
    EXPECT_NEAR(lhs, rhs, 1e-6 * (1.0 + std::abs(rhs)));
  }
}

TEST(KnFunctional, CriticalPointAtZero) {
  ProductGroupSpec spec({1});
  CVector x(1);
  x(0) = 2.0;
  const auto setting = SubgroupSetting::all_full(spec, {4.0});
  AlgebraElement s = AlgebraElement::zero(spec);
  s.blocks[0](0, 0) = kI;
  const double eps = 1e-4;
  const double d = (kn_functional(x, eps * s, RepSpec::standard(1), setting, 16) -
                    kn_functional(x, -eps * s, RepSpec::standard(1), setting, 16)) /
                   (2.0 * eps);
  // Central difference error is O(eps^2).
  EXPECT_NEAR(d, 0.0, 1e-6);
}

TEST(GradientFlow, CircleConvergesToLevel) {
  ProductGroupSpec spec({1});
  const RepSpec rep = RepSpec::standard(1);
  const CVector x = CVector::Ones(1);
  FlowOptions opts;
  opts.tol = 1e-10;
  const auto r = gradient_flow(x, rep, SubgroupSetting::all_full(spec, {4.0}), opts);
  ASSERT_TRUE(r.converged);
  EXPECT_LT(r.final_residual, 1e-10);
  EXPECT_NEAR(std::norm(act(r.final_group_element, x, rep)(0)), 4.0, 1e-9);
  for (std::size_t k = 1; k < r.trajectory.size(); ++k) EXPECT_LE(r.trajectory[k], r.trajectory[k - 1]);
}

TEST(GradientFlow, AlreadySolvingTakesNoSteps) {
  ProductGroupSpec spec({1});
  CVector x(1);
  x(0) = 2.0;
  const auto r = gradient_flow(x, RepSpec::standard(1), SubgroupSetting::all_full(spec, {4.0}));
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 1);
}

TEST(GradientFlow, UnstableDiverges) {
  ProductGroupSpec spec({1});
  const auto r = gradient_flow(CVector::Ones(1), RepSpec::standard(1), SubgroupSetting::all_full(spec, {-1.0}));
  EXPECT_FALSE(r.converged);
  EXPECT_TRUE(r.diverged);
  EXPECT_GT(r.sup_log_metric, 50.0);
}

TEST(GradientFlow, UniqueUpToUnitary) {
  ProductGroupSpec spec({2, 3});
  const RepSpec rep = RepSpec::tensor(2, 3);
  SubgroupSetting setting(spec, {FactorMode::full, FactorMode::frozen}, {1.5, 0.0});
  Rng rng(28);
  const CVector x = random_vector(6, rng);
  FlowOptions opts;
  opts.tol = 1e-11;
  GroupElement start = GroupElement::identity(spec);
  start.blocks[0] = random_invertible(2, rng);
  start.flavor = GroupFlavor::complexified;
  const auto a = gradient_flow(x, rep, setting, opts);
  const auto b = gradient_flow(x, rep, setting, opts, start);
  ASSERT_TRUE(a.converged);
  ASSERT_TRUE(b.converged);
  const Matrix q = b.final_group_element.blocks[0] * a.final_group_element.blocks[0].inverse();
  EXPECT_NEAR((q.adjoint() * q - Matrix::Identity(2, 2)).norm(), 0.0, 1e-6);
}
