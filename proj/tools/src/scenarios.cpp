#include "gpwb/experiments/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gpwb/experiments/pool.hpp"
#include "gpwb/moment_maps.hpp"

namespace gpwb::experiments {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void add_kind_diagnostics(FixtureRun& run, const LatticePairState& initial) {
  const auto& fx = run.fixture;
  auto deg = [](const std::vector<int>& d) {
    double s = 0.0;
    for (int x : d) s += x;
    return s;
  };
  switch (fx.kind) {
    case ExampleKind::coherent_system: {
      const double expected = deg(fx.degrees[0]) - to_double(fx.levels[0]) * static_cast<double>(fx.degrees[0].size()) -
                              to_double(fx.levels[1]) * static_cast<double>(fx.degrees[1].size());
      run.diagnostics.emplace_back("trace_identity.measured", integrated_residual_trace(initial, 0) +
                                                                  integrated_residual_trace(initial, 1));
      run.diagnostics.emplace_back("trace_identity.expected", expected);
      run.diagnostics.emplace_back("bundle_equation_linf", run.flow.factor_residual_linf.at(0));
      run.diagnostics.emplace_back("section_equation_linf", run.flow.factor_residual_linf.at(1));
      break;
    }
    case ExampleKind::twisted_triple: {
      const double expected = deg(fx.degrees[0]) + deg(fx.degrees[1]) -
                              to_double(fx.levels[0]) * static_cast<double>(fx.degrees[0].size()) -
                              to_double(fx.levels[1]) * static_cast<double>(fx.degrees[1].size());
      run.diagnostics.emplace_back("sum_rule.measured",
                                   integrated_residual_trace(initial, 0) + integrated_residual_trace(initial, 1));
      run.diagnostics.emplace_back("sum_rule.expected", expected);
      break;
    }
    case ExampleKind::higgs: {
      double trace = 0.0;
      for (const auto& v : initial.section)
        trace = std::max(trace, std::abs(mu_factor(v, initial.rep, 1).trace()));
      const double rk = static_cast<double>(fx.degrees[1].size());
      run.diagnostics.emplace_back("interaction_trace_max", trace);
      run.diagnostics.emplace_back("obstruction.measured", integrated_residual_trace(initial, 1));
      run.diagnostics.emplace_back("obstruction.expected", deg(fx.degrees[1]) - rk * to_double(fx.levels[1]));
      break;
    }
    default: break;
  }
}

}  // namespace

KnSample kempf_ness_sample(std::uint64_t seed, double tol) {
  Rng rng(seed);
  KnSample out;
  out.m = std::uniform_int_distribution<int>(2, 3)(rng);
  const int m = out.m;
  const ProductGroupSpec spec({2, m});
  const RepSpec rep = RepSpec::tensor(2, m);
  CVector x = random_vector(2 * m, rng);
  if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
    const CVector u = random_vector(2, rng), v = random_vector(m, rng);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < m; ++b) x(a * m + b) = u(a) * v(b);
  }
  const double magnitude = std::uniform_real_distribution<double>(0.3, 3.0)(rng);
  out.level = std::bernoulli_distribution(0.5)(rng) ? magnitude : -magnitude;
  const SubgroupSetting setting(spec, {FactorMode::full, FactorMode::frozen}, {out.level, 0.0});

  Matrix xm(2, m);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < m; ++b) xm(a, b) = x(a * m + b);
  Eigen::JacobiSVD<Matrix> svd(xm, Eigen::ComputeFullU);
  CandidateLattice lattice;
  lattice.per_factor = {{svd.matrixU().col(0), svd.matrixU().col(1)}, {}};
  const auto sv = svd.singularValues();
  out.oracle_stable = out.level > 0.0 && sv(1) > 1e-9 * sv(0);

  const auto verdict = stability_test(x, rep, setting, lattice);
  out.stable = verdict.stable;
  out.marginal = verdict.marginal;
  out.slack = verdict.slack;
  out.simple = is_simple(x, rep, setting);

  FlowOptions opts;
  opts.tol = tol;
  const auto flow = gradient_flow(x, rep, setting, opts);
  out.converged = flow.converged;
  out.diverged = flow.diverged;
  out.iterations = flow.iterations;
  out.residual = flow.final_residual;
  return out;
}

std::string verdict_label(const CurveVerdict& v) {
  if (v.constraint_violated) return "constraint violated";
  if (v.marginal) return "strictly semistable";
  return v.stable ? "stable" : "unstable";
}

std::string outcome_label(const LatticeFlowReport& r) {
  if (r.converged) return "converged";
  if (r.diverged) return "diverged";
  if (r.stalled) return "stalled";
  return "max_iter";
}

std::string agreement_label(const CurveVerdict& v, const LatticeFlowReport& r) {
  if (v.marginal) return "untested";
  return v.stable == r.converged ? "agree" : "disagree";
}

FixtureRun run_fixture(const CurveFixture& fx, int lattice_size, std::uint64_t seed, const LatticeFlowOptions& opts,
                       SectionCache& cache) {
  FixtureRun run;
  run.fixture = fx;
  run.verdict = fixture_stable(fx);
  AssemblyParams params;
  params.lattice_size = lattice_size;
  params.seed = seed;
  const LatticePairState initial = assemble_example(fx, params, cache);
  run.warnings = initial.warnings;
  run.construction_tolerance = initial.construction_tolerance;
  LatticePairState state = initial;
  run.flow = heat_flow(state, opts);
  add_kind_diagnostics(run, initial);
  return run;
}

std::vector<CurveFixture> builtin_fixtures(ExampleKind kind) {
  switch (kind) {
    case ExampleKind::pair_tensor:
      return {make_pair_fixture({2, 1}, {0}, {{0, 0}, {1, 0}}, Rational(5, 2)),
              make_pair_fixture({2, 0}, {0}, {{1, 0}}, Rational(3, 2))};
    case ExampleKind::triple_fixed_e2:
      return {make_triple_fixture({1}, {0}, {{0, 0}}, Rational(3, 2)),
              make_triple_fixture({2, 1}, {0}, {{0, 0}, {1, 0}}, Rational(9, 4)),
              make_triple_fixture({2, 1}, {0}, {{0, 0}, {1, 0}}, Rational(5, 4))};
    case ExampleKind::coherent_system:
      return {make_coherent_fixture({1}, 1, {{0, 0}}, Rational(3, 2), Rational(-1, 2)),
              make_coherent_fixture({2}, 1, {{0, 0}}, Rational(1), Rational(1))};
    case ExampleKind::twisted_triple:
      return {make_twisted_fixture({1}, {0}, {0}, {{0, 0, 0}}, Rational(5, 4), Rational(-1, 4)),
              make_twisted_fixture({1}, {0}, {0}, {{0, 0, 0}}, Rational(3, 4), Rational(1, 4))};
    case ExampleKind::higgs:
      return {make_higgs_fixture({0, 0}, {{0, 1, 0}, {1, 0, 0}}, Rational(0)),
              make_higgs_fixture({1, -1}, {}, Rational(0))};
  }
  throw std::logic_error("unreachable");
}

LatticePairState vortex_state(int lattice_size, int degree, double level, std::uint64_t seed, SectionCache& cache) {
  AssemblyParams params;
  params.lattice_size = lattice_size;
  params.seed = seed;
  auto st = assemble_example(make_pair_fixture({degree}, {0}, {{0, 0}}, Rational(0)), params, cache);
  st.setting = SubgroupSetting(st.group(), {FactorMode::full, FactorMode::frozen}, {kTwoPi * level, 0.0});
  return st;
}

ThresholdScan vortex_threshold(int lattice_size, int degree, double lo, double hi, double width,
                               const LatticeFlowOptions& opts, std::uint64_t seed, int workers, SectionCache& cache) {
  auto probe = [&](double level) {
    ThresholdProbe p;
    p.level = level;
    const auto initial = vortex_state(lattice_size, degree, level, seed, cache);
    auto state = initial;
    p.flow = heat_flow(state, opts);
    if (p.flow.converged) {
      const auto newton = newton_abelian(initial, opts);
      if (newton.converged) {
        double diff = 0.0;
        for (std::size_t s = 0; s < newton.metric[0].size(); ++s)
          diff = std::max(diff, (p.flow.metric[0][s] - newton.metric[0][s]).cwiseAbs().maxCoeff());
        p.newton_metric_diff = diff;
      }
    }
    return p;
  };

  ThresholdScan scan;
  std::vector<ThresholdProbe> ends(2);
  parallel_for(2, workers, [&](int i) { ends[i] = probe(i == 0 ? lo : hi); });
  scan.bracketed = !ends[0].flow.converged && ends[1].flow.converged;
  scan.probes = std::move(ends);
  scan.lo = lo;
  scan.hi = hi;
  if (scan.bracketed) {
    while (scan.hi - scan.lo >= width) {
      const double mid = 0.5 * (scan.lo + scan.hi);
      scan.probes.push_back(probe(mid));
      (scan.probes.back().flow.converged ? scan.hi : scan.lo) = mid;
    }
  }
  for (const auto& p : scan.probes)
    if (p.newton_metric_diff) scan.newton_max_diff = std::max(scan.newton_max_diff.value_or(0.0), *p.newton_metric_diff);
  return scan;
}

}  // namespace gpwb::experiments
