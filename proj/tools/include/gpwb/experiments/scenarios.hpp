#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpwb/assemble.hpp"
#include "gpwb/kempf_ness.hpp"
#include "gpwb/stability.hpp"

namespace gpwb::experiments {

// U(2) acting on C^2 (x) C^m with the second factor frozen, for a random
// vector (rank deficient one time in four) and a random nonzero level.
struct KnSample {
  int m = 2;
  double level = 0.0;
  bool simple = false;
  bool stable = false;
  bool marginal = false;
  // Rank criterion: stable iff the 2 x m matrix has rank 2 and level > 0.
  bool oracle_stable = false;
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
  double residual = 0.0;
  double slack = 0.0;
};
KnSample kempf_ness_sample(std::uint64_t seed, double tol);

struct FixtureRun {
  CurveFixture fixture;
  CurveVerdict verdict;
  LatticeFlowReport flow;
  std::vector<std::string> warnings;
  double construction_tolerance = 0.0;
  // Kind-specific measurements in report order.
  std::vector<std::pair<std::string, double>> diagnostics;
};

// "stable", "unstable", "strictly semistable" or "constraint violated".
std::string verdict_label(const CurveVerdict& v);
// "converged", "diverged", "stalled" or "max_iter".
std::string outcome_label(const LatticeFlowReport& r);
// "agree", "disagree" or "untested" (marginal fixtures).
std::string agreement_label(const CurveVerdict& v, const LatticeFlowReport& r);

FixtureRun run_fixture(const CurveFixture& fx, int lattice_size, std::uint64_t seed, const LatticeFlowOptions& opts,
                       SectionCache& cache);

// Certified stable and unstable fixtures per kind, chosen so that summand
// sub-objects are the only candidates that matter.
std::vector<CurveFixture> builtin_fixtures(ExampleKind kind);

// Rank-one vortex on L(degree) with level given in units of 2*pi.
LatticePairState vortex_state(int lattice_size, int degree, double level, std::uint64_t seed, SectionCache& cache);

struct ThresholdProbe {
  double level = 0.0;
  LatticeFlowReport flow;
  // Sup norm of the metric difference to the scalar Newton solution.
  std::optional<double> newton_metric_diff;
};

struct ThresholdScan {
  double lo = 0.0;
  double hi = 0.0;
  // The scan's lower end failed to converge and its upper end converged.
  bool bracketed = false;
  std::vector<ThresholdProbe> probes;
  std::optional<double> newton_max_diff;
};

// Bisection on heat-flow convergence until hi - lo < width.
ThresholdScan vortex_threshold(int lattice_size, int degree, double lo, double hi, double width,
                               const LatticeFlowOptions& opts, std::uint64_t seed, int workers, SectionCache& cache);

}  // namespace gpwb::experiments
