#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "gpwb/stability.hpp"

using namespace gpwb;

namespace {

std::vector<int> random_degrees(Rng& rng, int lo_rank, int hi_rank) {
  std::uniform_int_distribution<int> rank(lo_rank, hi_rank);
  std::uniform_int_distribution<int> deg(-3, 3);
  std::vector<int> d(rank(rng));
  for (auto& x : d) x = deg(rng);
  return d;
}

Rational random_level(Rng& rng) {
  std::uniform_int_distribution<int> num(-12, 12);
  std::uniform_int_distribution<int> den(1, 4);
  return Rational(num(rng), den(rng));
}

std::vector<std::vector<int>> random_support(Rng& rng, const std::vector<int>& dims, double density) {
  std::vector<std::vector<int>> out{{}};
  for (int d : dims) {
    std::vector<std::vector<int>> next;
    for (const auto& p : out)
      for (int i = 0; i < d; ++i) {
        auto m = p;
        m.push_back(i);
        next.push_back(std::move(m));
      }
    out = std::move(next);
  }
  std::bernoulli_distribution keep(density);
  std::vector<std::vector<int>> kept;
  for (auto& m : out)
    if (keep(rng)) kept.push_back(std::move(m));
  return kept;
}

constexpr ExampleKind kAllKinds[] = {ExampleKind::pair_tensor, ExampleKind::triple_fixed_e2,
                                     ExampleKind::coherent_system, ExampleKind::twisted_triple,
                                     ExampleKind::higgs};

}  // namespace

TEST(Rationals, Parse) {
  EXPECT_EQ(parse_rational("3"), Rational(3));
  EXPECT_EQ(parse_rational("-7/2"), Rational(-7, 2));
  EXPECT_EQ(parse_rational("1.25"), Rational(5, 4));
  EXPECT_EQ(parse_rational("-0.5"), Rational(-1, 2));
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("x"), std::invalid_argument);
  EXPECT_EQ(to_string(Rational(-7, 2)), "-7/2");
}

TEST(DegAlpha, SingleStep) {
  const auto fx = make_pair_fixture({3, -1}, {0}, {{0, 0}}, Rational(1));
  EXPECT_EQ(deg_alpha(fx, {{0, 1}}, {Rational(1)}, Rational(1)), Rational(0));
  EXPECT_EQ(deg_alpha(fx, {{0, 1}}, {Rational(1)}, Rational(0)), Rational(2));
}

TEST(DegAlpha, TwoStepPlugIn) {
  const auto fx = make_pair_fixture({2, 1}, {0}, {{0, 0}}, Rational(1));
  EXPECT_EQ(deg_alpha(fx, {{0}, {0, 1}}, {Rational(0), Rational(1)}, Rational(1)), Rational(0));
}

TEST(DegAlpha, LinearInWeights) {
  Rng rng(41);
  std::uniform_int_distribution<int> w(-5, 5);
  for (int t = 0; t < 100; ++t) {
    auto d = random_degrees(rng, 3, 3);
    const auto fx = make_pair_fixture(d, {0}, {}, random_level(rng));
    std::vector<std::vector<int>> chain{{1}, {1, 2}, {0, 1, 2}};
    auto draw = [&] {
      std::vector<Rational> v{Rational(w(rng)), Rational(w(rng)), Rational(w(rng))};
      std::sort(v.begin(), v.end());
      return v;
    };
    const auto a = draw();
    const auto b = draw();
    const Rational p(std::abs(w(rng)));
    const Rational q(std::abs(w(rng)));
    std::vector<Rational> mix(3);
    for (int i = 0; i < 3; ++i) mix[i] = p * a[i] + q * b[i];
    const Rational c = fx.levels[0];
    EXPECT_EQ(deg_alpha(fx, chain, mix, c), p * deg_alpha(fx, chain, a, c) + q * deg_alpha(fx, chain, b, c));
  }
}

TEST(PIndices, Examples) {
  const auto fx = make_pair_fixture({1, 0}, {0}, {{0, 0}}, Rational(1));
  const auto p = p_indices(fx, {{0}, {0, 1}}, {Rational(1), Rational(2)});
  EXPECT_EQ(p.p_alpha, 0);
  EXPECT_EQ(p.p_chi, 1);
  const auto empty = make_pair_fixture({1, 0}, {0}, {}, Rational(1));
  EXPECT_TRUE(p_indices(empty, {{0}, {0, 1}}, {Rational(1), Rational(2)}).degenerate);
}

TEST(PIndices, MembershipMatchesEigenspaceTest) {
  Rng rng(42);
  std::uniform_int_distribution<int> w(-3, 3);
  for (int t = 0; t < 200; ++t) {
    const auto fx = random_fixture(ExampleKind::pair_tensor, rng);
    const int r = static_cast<int>(fx.degrees[0].size());
    if (fx.support.empty()) continue;
    std::vector<int> order(r);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Rational> weights(r);
    for (auto& x : weights) x = w(rng);
    std::sort(weights.begin(), weights.end());
    weights.erase(std::unique(weights.begin(), weights.end()), weights.end());
    const int steps = static_cast<int>(weights.size());
    // Summand order[i] enters at step min(i, steps-1).
    std::vector<std::vector<int>> chain(steps);
    std::vector<std::vector<Rational>> alpha{std::vector<Rational>(r), std::vector<Rational>(fx.degrees[1].size())};
    for (int i = 0; i < r; ++i) {
      const int step = std::min(i, steps - 1);
      alpha[0][order[i]] = weights[step];
      for (int k = step; k < steps; ++k) chain[k].push_back(order[i]);
    }
    const auto p = p_indices(fx, chain, weights);
    const auto e = evaluate_direction(fx, alpha);
    EXPECT_EQ(p.p_chi <= p.p_alpha && p.p_chi > 0, e.in_negative);
  }
}

TEST(PairStable, LargeSubBundleDestabilizes) {
  const auto fx = make_pair_fixture({2, 0}, {0}, {{1, 0}}, Rational(1));
  const auto v = pair_stable(fx);
  EXPECT_FALSE(v.stable);
  EXPECT_EQ(v.witness, "mu({0}) < c");
}

TEST(PairStable, RankOneThreshold) {
  for (int c = -3; c <= 5; ++c) {
    const auto fx = make_pair_fixture({1}, {0}, {{0, 0}}, Rational(c));
    const auto v = pair_stable(fx);
    EXPECT_EQ(v.stable, c > 1) << c;
    EXPECT_EQ(v.marginal, c == 1) << c;
  }
}

TEST(PairStable, LargeLevelDestabilizesGenericSupport) {
  const auto fx = make_pair_fixture({2, 1, -1}, {0, 1}, {{0, 0}, {1, 1}}, Rational(1000));
  EXPECT_FALSE(pair_stable(fx).stable);
  // With every summand supported no proper sub-bundle contains the section.
  const auto full = make_pair_fixture({2, 1, -1}, {0, 1}, {{0, 0}, {1, 1}, {2, 0}}, Rational(1000));
  EXPECT_TRUE(pair_stable(full).stable);
}

TEST(TripleStable, IsomorphismOfTrivialBundles) {
  for (int c = -2; c <= 2; ++c) {
    const auto fx = make_triple_fixture({0}, {0}, {{0, 0}}, Rational(c));
    EXPECT_EQ(triple_stable(fx).stable, c > 0) << c;
    EXPECT_EQ(triple_alpha_stable(fx).stable, c > 0) << c;
  }
}

TEST(TripleStable, ZeroMapNeverStable) {
  Rng rng(43);
  for (int t = 0; t < 50; ++t) {
    auto fx = random_fixture(ExampleKind::triple_fixed_e2, rng);
    fx.support.clear();
    EXPECT_FALSE(triple_stable(fx).stable);
  }
}

TEST(TripleStable, AlphaSlopeFormAgrees) {
  Rng rng(44);
  for (int t = 0; t < 200; ++t) {
    const auto fx = random_fixture(ExampleKind::triple_fixed_e2, rng);
    const auto direct = triple_stable(fx);
    const auto alpha = triple_alpha_stable(fx);
    EXPECT_EQ(direct.stable, alpha.stable);
    EXPECT_EQ(direct.marginal, alpha.marginal);
  }
}

TEST(CoherentSystem, RankOneSection) {
  for (int c2 = -3; c2 <= 2; ++c2) {
    const auto fx = make_coherent_fixture({1}, 1, {{0, 0}}, Rational(1 - c2), Rational(c2));
    const auto v = coherent_system_stable(fx);
    EXPECT_FALSE(v.constraint_violated);
    EXPECT_EQ(v.stable, c2 < 0) << c2;
  }
}

TEST(CoherentSystem, ViolatedConstraintIsFlagged) {
  const auto fx = make_coherent_fixture({0}, 1, {{0, 0}}, Rational(1), Rational(-1, 2));
  const auto v = coherent_system_stable(fx);
  EXPECT_TRUE(v.constraint_violated);
  EXPECT_FALSE(v.stable);
  EXPECT_EQ(v.conditions, 0u);
  EXPECT_TRUE(generator_verdict(fx).constraint_violated);
}

TEST(CoherentSystem, SlopeFormAgreesForNonzeroSections) {
  Rng rng(45);
  int compared = 0;
  for (int t = 0; t < 400; ++t) {
    const auto fx = random_fixture(ExampleKind::coherent_system, rng);
    if (fx.levels[1] >= Rational(0)) continue;
    std::vector<bool> hit(fx.degrees[1].size(), false);
    for (const auto& s : fx.support) hit[s[1]] = true;
    if (std::find(hit.begin(), hit.end(), false) != hit.end()) continue;
    EXPECT_EQ(coherent_system_stable(fx).stable, coherent_alpha_form(fx).stable);
    ++compared;
  }
  EXPECT_GT(compared, 50);
}

TEST(TwistedTriple, TrivialTwistReducesToTriple) {
  Rng rng(46);
  for (int t = 0; t < 100; ++t) {
    auto fx = random_fixture(ExampleKind::twisted_triple, rng);
    fx.degrees[2] = {0};
    std::vector<std::pair<int, int>> pairs;
    std::vector<std::vector<int>> support;
    for (const auto& s : fx.support)
      if (s[2] == 0) {
        pairs.emplace_back(s[0], s[1]);
        support.push_back(s);
      }
    fx.support = support;
    const auto plain = holomorphic_triple_stable(fx.degrees[0], fx.degrees[1], pairs, fx.levels[0] - fx.levels[1]);
    const auto twisted = twisted_triple_stable(fx);
    EXPECT_EQ(twisted.stable, plain.stable);
    EXPECT_EQ(twisted.marginal, plain.marginal);
    EXPECT_EQ(generator_verdict(fx).stable, plain.stable);
  }
}

TEST(TwistedTriple, ConstraintAndExclusions) {
  const auto bad = make_twisted_fixture({1}, {0}, {0}, {{0, 0, 0}}, Rational(1), Rational(1));
  EXPECT_TRUE(twisted_triple_stable(bad).constraint_violated);
  // (0, E2) is filtered out when the map is nonzero; (E1, E2) is never tested.
  const auto good = make_twisted_fixture({1}, {0}, {0}, {{0, 0, 0}}, Rational(2), Rational(-1));
  const auto v = twisted_triple_stable(good);
  EXPECT_EQ(v.conditions, 1u);
  EXPECT_TRUE(v.stable);
}

TEST(HiggsStable, SplitWithZeroFieldIsUnstable) {
  const auto fx = make_higgs_fixture({1, -1}, {}, Rational(0));
  const auto v = higgs_stable(fx);
  EXPECT_FALSE(v.stable);
  EXPECT_EQ(v.witness, "mu({0}) < mu(E)");
}

TEST(HiggsStable, FieldBreakingInvarianceStabilizes) {
  // Theta sends the degree-1 summand into the degree -1 summand.
  const auto fx = make_higgs_fixture({1, -1}, {{1, 0, 0}}, Rational(0));
  const auto v = higgs_stable(fx);
  EXPECT_TRUE(v.stable);
  EXPECT_EQ(v.conditions, 1u);
}

TEST(HiggsStable, RankOneVacuous) {
  const auto fx = make_higgs_fixture({3}, {}, Rational(3));
  EXPECT_TRUE(higgs_stable(fx).stable);
  EXPECT_TRUE(generator_verdict(fx).stable);
  EXPECT_TRUE(higgs_stable(make_higgs_fixture({3}, {}, Rational(2))).constraint_violated);
}

TEST(GeneratorEngine, AgreesWithPerKindRules) {
  Rng rng(47);
  for (ExampleKind kind : kAllKinds)
    for (int t = 0; t < 100; ++t) {
      const auto fx = random_fixture(kind, rng);
      const auto direct = fixture_stable(fx);
      const auto gen = generator_verdict(fx);
      ASSERT_EQ(direct.stable, gen.stable) << to_string(kind) << " " << t;
      EXPECT_EQ(direct.marginal, gen.marginal) << to_string(kind);
      EXPECT_EQ(direct.constraint_violated, gen.constraint_violated);
    }
}

TEST(GeneratorEngine, PairSlackMatchesGeneratorWeight) {
  Rng rng(48);
  for (int t = 0; t < 100; ++t) {
    const auto fx = random_fixture(ExampleKind::pair_tensor, rng);
    EXPECT_EQ(pair_stable(fx).slack, generator_verdict(fx).slack);
  }
}

TEST(GeneratorEngine, SummandPermutationInvariance) {
  Rng rng(49);
  for (int t = 0; t < 100; ++t) {
    const auto fx = random_fixture(ExampleKind::twisted_triple, rng);
    auto perm = fx;
    const int n = static_cast<int>(fx.degrees[0].size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    for (int i = 0; i < n; ++i) perm.degrees[0][order[i]] = fx.degrees[0][i];
    for (auto& s : perm.support) s[0] = order[s[0]];
    EXPECT_EQ(fixture_stable(fx).stable, fixture_stable(perm).stable);
    EXPECT_EQ(generator_verdict(fx).slack, generator_verdict(perm).slack);
  }
}

TEST(GeneratorEngine, MatchesFiniteDimensionalTest) {
  Rng rng(50);
  for (ExampleKind kind : kAllKinds)
    for (int t = 0; t < 20; ++t) {
      const auto fx = random_fixture(kind, rng);
      const auto exact = generator_verdict(fx);
      if (exact.marginal) continue;
      const FiniteModel m = finite_model(fx, rng);
      const auto numeric = stability_test(m.x, m.rep, m.setting, m.lattice, m.degree, 1e-9);
      EXPECT_EQ(exact.stable, numeric.stable) << to_string(kind);
      EXPECT_EQ(exact.constraint_violated, numeric.constraint_violated) << to_string(kind);
      if (exact.slack && !exact.constraint_violated) EXPECT_NEAR(to_double(*exact.slack), numeric.slack, 1e-9);
    }
}

TEST(SscReduction, AgreesOnAllKinds) {
  Rng rng(51);
  for (ExampleKind kind : kAllKinds)
    for (int t = 0; t < 10; ++t) {
      const auto fx = random_fixture(kind, rng);
      const auto r = ssc_reduction_equiv(fx, 200, rng);
      EXPECT_TRUE(r.agree) << to_string(kind) << " mismatches " << r.mismatches;
      EXPECT_GT(r.samples, 200);
    }
}

TEST(SscReduction, FlagsMarginalFixture) {
  Rng rng(52);
  const auto fx = make_pair_fixture({1}, {0}, {{0, 0}}, Rational(1));
  const auto r = ssc_reduction_equiv(fx, 50, rng);
  EXPECT_TRUE(r.marginal);
  EXPECT_FALSE(r.generator_stable);
}
