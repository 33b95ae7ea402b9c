#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpwb/fixture.hpp"
#include "gpwb/kempf_ness.hpp"
#include "gpwb/random.hpp"

namespace gpwb {

// Exact verdict over the summand lattice of a decomposable fixture.  The
// slack of each tested condition is the weight of the corresponding
// two-valued generator, so verdicts from different routines are comparable.
struct CurveVerdict {
  bool stable = false;
  bool marginal = false;
  bool constraint_violated = false;
  std::optional<Rational> slack;
  std::string witness;
  std::size_t conditions = 0;
};

// Membership of summands in a sub-object, one mask per factor.
using SummandMasks = std::vector<std::vector<bool>>;

// Weights on summands (frozen factors carry zeros) and what they imply.
struct DirectionEval {
  bool trivial = false;
  bool in_negative = false;
  Rational weight;
};

DirectionEval evaluate_direction(const CurveFixture& fx, const std::vector<std::vector<Rational>>& alpha);

// Two-valued generators on summand tuples: kind 0 puts weight -1 on the
// sub-object, kind 1 puts weight 1 off it.
std::vector<std::vector<Rational>> generator_weights(const CurveFixture& fx, int kind, const SummandMasks& sub);

// Generic engine over every summand sub-object and both generator kinds.
CurveVerdict generator_verdict(const CurveFixture& fx);

// deg(alpha) over a chain of summand subsets of the first factor.
Rational deg_alpha(const CurveFixture& fx, const std::vector<std::vector<int>>& chain,
                   const std::vector<Rational>& weights, const Rational& c);

struct PIndices {
  int p_alpha = 0;
  int p_chi = 0;
  bool degenerate = false;
};
PIndices p_indices(const CurveFixture& fx, const std::vector<std::vector<int>>& chain,
                   const std::vector<Rational>& weights);

CurveVerdict pair_stable(const CurveFixture& fx);
CurveVerdict triple_stable(const CurveFixture& fx);
// alpha with mu_alpha(E1,E2,Phi) = c.
Rational triple_alpha(const CurveFixture& fx);
// Same problem phrased through alpha-slopes of sub-triples (E1',0) and (E1',E2).
CurveVerdict triple_alpha_stable(const CurveFixture& fx);
CurveVerdict coherent_system_stable(const CurveFixture& fx);
// deg(E')/rk(E') + alpha k'/rk(E') < c1 over E' of positive rank with maximal k'.
CurveVerdict coherent_alpha_form(const CurveFixture& fx);
CurveVerdict twisted_triple_stable(const CurveFixture& fx);
// Holomorphic triple alpha-stability over all sub-triples (E1',E2') with Phi(E2') in E1'.
CurveVerdict holomorphic_triple_stable(const std::vector<int>& e1, const std::vector<int>& e2,
                                       const std::vector<std::pair<int, int>>& support, const Rational& alpha);
CurveVerdict higgs_stable(const CurveFixture& fx);

// Dispatch on kind.
CurveVerdict fixture_stable(const CurveFixture& fx);

struct SscReport {
  bool agree = true;
  bool marginal = false;
  bool generator_stable = false;
  bool cone_stable = false;
  int samples = 0;
  int mismatches = 0;
};

// Random admissible weight vectors checked against the generator-only verdict.
SscReport ssc_reduction_equiv(const CurveFixture& fx, int trials, Rng& rng);

// The same fixture seen by the finite-dimensional engine: a vector with the
// fixture's support and coordinate candidate subspaces.
struct FiniteModel {
  CVector x;
  RepSpec rep;
  SubgroupSetting setting;
  CandidateLattice lattice;
  SubspaceDegree degree;
};
FiniteModel finite_model(const CurveFixture& fx, Rng& rng);

// Random fixture of the given kind with degrees in [-3, 3] and random
// support.  Kinds with a degree constraint get levels that satisfy it.
CurveFixture random_fixture(ExampleKind kind, Rng& rng);

}  // namespace gpwb
