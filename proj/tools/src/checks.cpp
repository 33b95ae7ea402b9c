#include "gpwb/experiments/checks.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "gpwb/assemble.hpp"
#include "gpwb/io.hpp"
#include "gpwb/kempf_ness.hpp"
#include "gpwb/moment_maps.hpp"
#include "gpwb/random.hpp"
#include "gpwb/stability.hpp"
#include "gpwb/experiments/pool.hpp"
#include "gpwb/experiments/runner.hpp"
#include "gpwb/experiments/scenarios.hpp"

namespace gpwb::experiments {

namespace {

using Clock = std::chrono::steady_clock;

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  Clock::time_point start_ = Clock::now();
};

CheckResult begin(const char* name, double budget) {
  CheckResult r;
  r.name = name;
  r.budget_seconds = budget;
  return r;
}

void detail(CheckResult& r, const std::string& key, const std::string& value) { r.details.emplace_back(key, value); }
void detail(CheckResult& r, const std::string& key, double value) { detail(r, key, format_double(value)); }
void detail(CheckResult& r, const std::string& key, int value) { detail(r, key, std::to_string(value)); }
void detail(CheckResult& r, const std::string& key, bool value) { detail(r, key, std::string(value ? "true" : "false")); }

void finish(CheckResult& r, bool ok, const Timer& t) {
  r.seconds = t.seconds();
  r.criteria_met = ok;
  r.passed = ok && r.seconds < r.budget_seconds;
}

struct RepCase {
  const char* name;
  ProductGroupSpec spec;
  RepSpec rep;
  // Factor pairs whose moment-map traces cancel.
  std::vector<std::pair<std::size_t, std::size_t>> trace_pairs;
  // Factor whose moment-map block is traceless.
  std::optional<std::size_t> traceless;
};

std::vector<RepCase> rep_cases() {
  return {
      {"tensor", ProductGroupSpec({2, 3}), RepSpec::tensor(2, 3), {}, {}},
      {"hom", ProductGroupSpec({3, 2}), RepSpec::hom(3, 2), {{0, 1}}, {}},
      {"coherent", ProductGroupSpec({2, 2}), RepSpec::hom(2, 2), {{0, 1}}, {}},
      {"twisted", ProductGroupSpec({2, 2, 2}), RepSpec::twisted_hom(2, 2, 2), {{0, 1}, {0, 2}}, {}},
      {"higgs", ProductGroupSpec({1, 3}), RepSpec::higgs(3), {}, 1},
  };
}

double total_degree(const std::vector<int>& d) {
  double s = 0.0;
  for (int x : d) s += x;
  return s;
}

}  // namespace

CheckScale CheckScale::quick() {
  CheckScale s;
  s.moment_instances = 20;
  s.kempf_ness_fixtures = 20;
  s.functional_instances = 10;
  s.vortex_lattice = 16;
  s.trace_configs = 5;
  s.twisted_fixtures = 20;
  s.ssc_fixtures = 10;
  s.ssc_samples = 100;
  s.section_lattice = 16;
  return s;
}

CheckResult check_moment_maps(const CheckScale& scale, std::uint64_t seed) {
  const Timer timer;
  auto r = begin("moment_maps", 10.0);
  int failures = 0, instances = 0;
  double worst_hamiltonian = 0.0;
  const auto cases = rep_cases();
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& rc = cases[c];
    Rng rng(derive_seed(seed, c));
    for (int trial = 0; trial < scale.moment_instances; ++trial, ++instances) {
      bool ok = true;
      const CVector x = random_vector(rc.rep.dim(), rng);
      const auto mu = mu_full(x, rc.rep, rc.spec);
      const auto k = random_unitary_element(rc.spec, rng);
      const auto moved = mu_full(act(k, x, rc.rep), rc.rep, rc.spec);
      const auto conj = adjoint_action(k, mu);
      for (std::size_t f = 0; f < rc.spec.factors(); ++f) {
        const Matrix& b = mu.blocks[f];
        ok &= (moved.blocks[f] - conj.blocks[f]).norm() <= 1e-11 * (1.0 + b.norm());
        ok &= (b + b.adjoint()).norm() <= 1e-12 * (1.0 + b.norm());
      }
      const auto s = random_algebra(rc.spec, rng);
      const CVector v = random_vector(rc.rep.dim(), rng);
      const double eps = 1e-5;
      const double fd = (inner_product(mu_full(x + eps * v, rc.rep, rc.spec), s, rc.spec) -
                         inner_product(mu_full(x - eps * v, rc.rep, rc.spec), s, rc.spec)) /
                        (2.0 * eps);
      const double exact = -2.0 * symplectic_form(infinitesimal_act(s, x, rc.rep), v);
      const double rel = std::abs(fd - exact) / (1.0 + std::abs(exact));
      worst_hamiltonian = std::max(worst_hamiltonian, rel);
      ok &= rel < 1e-4;
      const double scale_x = 1.0 + x.squaredNorm();
      for (const auto& [a, b] : rc.trace_pairs)
        ok &= std::abs(mu.blocks[a].trace() + mu.blocks[b].trace()) <= 1e-12 * scale_x;
      if (rc.traceless) ok &= std::abs(mu.blocks[*rc.traceless].trace()) <= 1e-13 * scale_x;
      if (!ok) ++failures;
    }
  }
  detail(r, "instances", instances);
  detail(r, "failures", failures);
  detail(r, "worst_hamiltonian_rel_error", worst_hamiltonian);
  finish(r, failures == 0, timer);
  return r;
}

CheckResult check_kempf_ness(const CheckScale& scale, std::uint64_t seed, int workers) {
  const Timer timer;
  auto r = begin("kempf_ness", 120.0);
  std::vector<KnSample> chosen;
  int drawn = 0;
  while (static_cast<int>(chosen.size()) < scale.kempf_ness_fixtures && drawn < 20 * scale.kempf_ness_fixtures) {
    const int batch = 2 * scale.kempf_ness_fixtures;
    std::vector<KnSample> samples(static_cast<std::size_t>(batch));
    parallel_for(batch, workers, [&](int i) { samples[i] = kempf_ness_sample(derive_seed(seed, drawn + i), 1e-8); });
    drawn += batch;
    for (const auto& s : samples)
      if (s.simple && static_cast<int>(chosen.size()) < scale.kempf_ness_fixtures) chosen.push_back(s);
  }
  int marginal = 0, flow_mismatch = 0, oracle_mismatch = 0, stable = 0;
  for (const auto& s : chosen) {
    if (s.marginal) {
      ++marginal;
      continue;
    }
    stable += s.stable;
    flow_mismatch += (s.converged && s.residual < 1e-8) != s.stable;
    oracle_mismatch += s.oracle_stable != s.stable;
  }
  detail(r, "simple_fixtures", static_cast<int>(chosen.size()));
  detail(r, "drawn", drawn);
  detail(r, "stable", stable);
  detail(r, "marginal_excluded", marginal);
  detail(r, "flow_mismatches", flow_mismatch);
  detail(r, "oracle_mismatches", oracle_mismatch);
  finish(r, static_cast<int>(chosen.size()) == scale.kempf_ness_fixtures && flow_mismatch == 0 && oracle_mismatch == 0,
         timer);
  return r;
}

CheckResult check_functional(const CheckScale& scale, std::uint64_t seed) {
  const Timer timer;
  auto r = begin("kn_functional", 30.0);
  constexpr int kPanels = 512;
  const ProductGroupSpec spec({2, 2});
  const RepSpec rep = RepSpec::tensor(2, 2);
  const SubgroupSetting setting(spec, {FactorMode::full, FactorMode::frozen}, {1.3, 0.0});
  Rng rng(seed);
  double worst_cocycle = 0.0, worst_derivative = 0.0;
  int failures = 0;
  for (int trial = 0; trial < scale.functional_instances; ++trial) {
    const CVector x = random_vector(4, rng);
    const auto s = project_subalgebra(random_algebra(spec, rng, 0.5), setting);
    const auto t = project_subalgebra(random_algebra(spec, rng, 0.5), setting);
    const auto g = exp_element(s, Complex(0.0, 1.0));
    const auto h = exp_element(t, Complex(0.0, 1.0));
    const double lhs =
        kn_functional(x, g, rep, setting, kPanels) + kn_functional(act(g, x, rep), h, rep, setting, kPanels);
    const double rhs = kn_functional(x, h * g, rep, setting, kPanels);
    const double cocycle = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
    worst_cocycle = std::max(worst_cocycle, cocycle);

    FlowOptions opts;
    opts.tol = 1e-11;
    const auto flow = gradient_flow(x, rep, setting, opts);
    double derivative = flow.converged ? 0.0 : 1.0;
    if (flow.converged) {
      const CVector y = act(flow.final_group_element, x, rep);
      const auto u = project_subalgebra(random_algebra(spec, rng, 1.0), setting);
      const double eps = 1e-4;
      const double d = (kn_functional(y, eps * u, rep, setting, kPanels) -
                        kn_functional(y, -1.0 * (eps * u), rep, setting, kPanels)) /
                       (2.0 * eps);
      derivative = std::abs(d) / (1.0 + norm(u, spec));
    }
    worst_derivative = std::max(worst_derivative, derivative);
    if (cocycle > 1e-6 || derivative > 1e-6) ++failures;
  }
  detail(r, "instances", scale.functional_instances);
  detail(r, "panels", kPanels);
  detail(r, "worst_cocycle_rel_error", worst_cocycle);
  detail(r, "worst_derivative_at_zero", worst_derivative);
  finish(r, failures == 0, timer);
  return r;
}

CheckResult check_vortex_threshold(const CheckScale& scale, std::uint64_t seed, int workers) {
  const Timer timer;
  auto r = begin("vortex_threshold", 300.0);
  const int n = scale.vortex_lattice;
  const int d = 1;
  SectionCache cache;
  const LatticeFlowOptions opts;
  std::vector<ThresholdProbe> fixed(2);
  parallel_for(2, workers, [&](int i) {
    const double level = i == 0 ? 2.0 * d : 0.5 * d;
    const auto initial = vortex_state(n, d, level, seed, cache);
    auto state = initial;
    fixed[i].level = level;
    fixed[i].flow = heat_flow(state, opts);
    if (fixed[i].flow.converged) {
      const auto newton = newton_abelian(initial, opts);
      if (newton.converged) {
        double diff = 0.0;
        for (std::size_t s = 0; s < newton.metric[0].size(); ++s)
          diff = std::max(diff, (fixed[i].flow.metric[0][s] - newton.metric[0][s]).cwiseAbs().maxCoeff());
        fixed[i].newton_metric_diff = diff;
      }
    }
  });
  const auto scan = vortex_threshold(n, d, 0.1, 3.0, 0.05 * d, opts, seed, workers, cache);
  const double newton_diff =
      std::max(fixed[0].newton_metric_diff.value_or(INFINITY), scan.newton_max_diff.value_or(0.0));
  const bool bracket_ok = scan.bracketed && scan.lo < d && d < scan.hi && (scan.hi - scan.lo) / d < 0.05;
  detail(r, "lattice", n);
  detail(r, "converges_at_2d", fixed[0].flow.converged);
  detail(r, "diverges_at_half_d", fixed[1].flow.diverged);
  detail(r, "bracket_lo", scan.lo);
  detail(r, "bracket_hi", scan.hi);
  detail(r, "probes", static_cast<int>(scan.probes.size()));
  detail(r, "newton_metric_sup_diff", newton_diff);
  finish(r, fixed[0].flow.converged && fixed[1].flow.diverged && bracket_ok && newton_diff < 1e-6, timer);
  return r;
}

CheckResult check_coherent_systems(const CheckScale& scale, std::uint64_t seed) {
  const Timer timer;
  auto r = begin("coherent_systems", 180.0);
  SectionCache cache;
  Rng rng(seed);
  std::uniform_int_distribution<int> deg(1, 3), num(-8, 8), den(1, 4), kdist(1, 2);
  double worst_trace = 0.0;
  for (int t = 0; t < scale.trace_configs; ++t) {
    std::vector<int> e{deg(rng)};
    if (t % 2) e.push_back(deg(rng));
    const int k = kdist(rng);
    std::vector<std::vector<int>> support;
    for (int i = 0; i < static_cast<int>(e.size()); ++i)
      for (int j = 0; j < k; ++j)
        if ((i + j) % 2 == 0 || e.size() == 1) support.push_back({i, j});
    const Rational c1(num(rng), den(rng)), c2(num(rng), den(rng));
    AssemblyParams p;
    p.seed = derive_seed(seed, t);
    const auto st = assemble_example(make_coherent_fixture(e, k, support, c1, c2), p, cache);
    const double expected =
        total_degree(e) - to_double(c1) * static_cast<double>(e.size()) - to_double(c2) * static_cast<double>(k);
    worst_trace = std::max(
        worst_trace, std::abs(integrated_residual_trace(st, 0) + integrated_residual_trace(st, 1) - expected));
  }
  const auto run = run_fixture(make_coherent_fixture({1}, 1, {{0, 0}}, Rational(3, 2), Rational(-1, 2)), 16, seed,
                               LatticeFlowOptions{}, cache);
  const bool stable = run.verdict.stable && !run.verdict.marginal;
  const double bundle = run.flow.factor_residual_linf.at(0), sections = run.flow.factor_residual_linf.at(1);
  detail(r, "trace_configs", scale.trace_configs);
  detail(r, "worst_trace_identity_error", worst_trace);
  detail(r, "fixture_stable", stable);
  detail(r, "flow_converged", run.flow.converged);
  detail(r, "bundle_equation_linf", bundle);
  detail(r, "section_equation_linf", sections);
  finish(r, worst_trace <= 1e-12 && stable && run.flow.converged && bundle < 1e-6 && sections < 1e-6, timer);
  return r;
}

CheckResult check_higgs(const CheckScale& scale, std::uint64_t seed) {
  const Timer timer;
  auto r = begin("higgs", 300.0);
  SectionCache cache;
  const int n = 16;
  double worst_trace = 0.0, worst_obstruction = 0.0;
  const std::vector<std::pair<std::vector<int>, Rational>> configs{
      {{0, 0}, Rational(1, 2)}, {{1, 0}, Rational(-1)}, {{1, 1, 0}, Rational(3, 4)}, {{2, 1, 0}, Rational(5, 2)}};
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& [e, cm] = configs[i];
    std::vector<std::vector<int>> support;
    for (int a = 0; a < static_cast<int>(e.size()); ++a)
      for (int b = 0; b < static_cast<int>(e.size()); ++b)
        if (e[a] >= e[b]) support.push_back({a, b, 0});
    AssemblyParams p;
    p.lattice_size = n;
    p.seed = derive_seed(seed, i);
    const auto st = assemble_example(make_higgs_fixture(e, support, cm), p, cache);
    for (const auto& v : st.section) worst_trace = std::max(worst_trace, std::abs(mu_factor(v, st.rep, 1).trace()));
    const double rk = static_cast<double>(e.size());
    const double expected = rk * (total_degree(e) / rk - to_double(cm));
    worst_obstruction = std::max(worst_obstruction, std::abs(integrated_residual_trace(st, 1) - expected));
  }
  const auto fixtures = builtin_fixtures(ExampleKind::higgs);
  const auto stable = run_fixture(fixtures[0], n, seed, LatticeFlowOptions{}, cache);
  const auto split = run_fixture(fixtures[1], n, seed, LatticeFlowOptions{}, cache);
  detail(r, "trace_configs", static_cast<int>(configs.size()) + 0 * scale.trace_configs);
  detail(r, "worst_site_trace", worst_trace);
  detail(r, "worst_obstruction_error", worst_obstruction);
  detail(r, "stable_fixture", verdict_label(stable.verdict));
  detail(r, "stable_flow", outcome_label(stable.flow));
  detail(r, "split_fixture", verdict_label(split.verdict));
  detail(r, "split_flow", outcome_label(split.flow));
  finish(r,
         worst_trace <= 1e-13 && worst_obstruction <= 1e-10 && stable.verdict.stable && stable.flow.converged &&
             !split.verdict.stable && !split.verdict.marginal && split.flow.diverged,
         timer);
  return r;
}

CheckResult check_twisted_triples(const CheckScale& scale, std::uint64_t seed) {
  const Timer timer;
  auto r = begin("twisted_triples", 60.0);
  SectionCache cache;
  Rng rng(seed);
  std::uniform_int_distribution<int> deg(1, 3), num(-8, 8), den(1, 3);
  double worst_sum = 0.0;
  for (int t = 0; t < scale.trace_configs; ++t) {
    const std::vector<int> e1{deg(rng)}, e2{0};
    const Rational c1(num(rng), den(rng)), c2(num(rng), den(rng));
    AssemblyParams p;
    p.seed = derive_seed(seed, t);
    const auto st = assemble_example(make_twisted_fixture(e1, e2, {0}, {{0, 0, 0}}, c1, c2), p, cache);
    const double expected = e1[0] - to_double(c1) - to_double(c2);
    worst_sum = std::max(
        worst_sum, std::abs(integrated_residual_trace(st, 0) + integrated_residual_trace(st, 1) - expected));
  }
  int mismatches = 0;
  for (int t = 0; t < scale.twisted_fixtures; ++t) {
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
    if (twisted.stable != plain.stable || twisted.marginal != plain.marginal) ++mismatches;
  }
  detail(r, "sum_rule_configs", scale.trace_configs);
  detail(r, "worst_sum_rule_error", worst_sum);
  detail(r, "reduction_fixtures", scale.twisted_fixtures);
  detail(r, "reduction_mismatches", mismatches);
  finish(r, worst_sum <= 1e-12 && mismatches == 0, timer);
  return r;
}

CheckResult check_ssc_reduction(const CheckScale& scale, std::uint64_t seed, int workers) {
  const Timer timer;
  auto r = begin("ssc_reduction", 120.0);
  constexpr ExampleKind kinds[] = {ExampleKind::pair_tensor, ExampleKind::triple_fixed_e2,
                                   ExampleKind::coherent_system, ExampleKind::twisted_triple, ExampleKind::higgs};
  std::vector<SscReport> reports(static_cast<std::size_t>(scale.ssc_fixtures));
  parallel_for(scale.ssc_fixtures, workers, [&](int i) {
    Rng rng(derive_seed(seed, i));
    const auto fx = random_fixture(kinds[i % 5], rng);
    reports[i] = ssc_reduction_equiv(fx, scale.ssc_samples, rng);
  });
  int disagreements = 0, samples = 0, marginal = 0;
  for (const auto& rep : reports) {
    disagreements += !rep.agree;
    samples += rep.samples;
    marginal += rep.marginal;
  }
  detail(r, "fixtures", scale.ssc_fixtures);
  detail(r, "cone_samples", samples);
  detail(r, "marginal_fixtures", marginal);
  detail(r, "disagreements", disagreements);
  finish(r, disagreements == 0, timer);
  return r;
}

CheckResult check_flow_hygiene(const CheckScale& scale, std::uint64_t seed) {
  const Timer timer;
  auto r = begin("flow_hygiene", 180.0);
  SectionCache cache;
  AssemblyParams p;
  p.seed = seed;
  const auto initial = assemble_example(builtin_fixtures(ExampleKind::triple_fixed_e2)[0], p, cache);

  auto flowed = initial;
  const auto rep = heat_flow(flowed);
  bool frozen_identical = true;
  for (int dir = 0; dir < 2; ++dir)
    for (int s = 0; s < initial.lattice.sites(); ++s)
      frozen_identical &= std::memcmp(initial.factors[1].links[dir][s].data(), flowed.factors[1].links[dir][s].data(),
                                      sizeof(Complex)) == 0;
  for (int s = 0; s < initial.lattice.sites(); ++s)
    frozen_identical &=
        std::memcmp(initial.factors[1].gauge[s].data(), flowed.factors[1].gauge[s].data(), sizeof(Complex)) == 0;
  double drift = 0.0;
  for (std::size_t f = 0; f < rep.degrees_before.size(); ++f)
    drift = std::max(drift, std::abs(rep.degrees_after[f] - rep.degrees_before[f]));

  auto rotated = initial;
  Rng rng(seed);
  std::vector<GroupElement> g;
  for (int s = 0; s < rotated.lattice.sites(); ++s) {
    GroupElement e = GroupElement::identity(rotated.group());
    e.flavor = GroupFlavor::complexified;
    e.blocks[0] = random_unitary(rotated.group().dim(0), rng);
    g.push_back(std::move(e));
  }
  apply_gauge(rotated, g);
  const auto rep_rotated = heat_flow(rotated);
  const double covariance = std::abs(rep.final_residual - rep_rotated.final_residual);

  ExperimentConfig config = default_config(Mode::pair);
  config.seed = seed;
  config.workers = 1;
  const auto one = run(config);
  config.workers = 8;
  const auto eight = run(config);
  bool identical = one.text() == eight.text() && one.csvs().size() == eight.csvs().size();
  for (std::size_t i = 0; identical && i < one.csvs().size(); ++i) {
    std::ostringstream a, b;
    write_trajectory_csv(a, one.csvs()[i].second);
    write_trajectory_csv(b, eight.csvs()[i].second);
    identical = one.csvs()[i].first == eight.csvs()[i].first && a.str() == b.str();
  }
  detail(r, "frozen_byte_identical", frozen_identical);
  detail(r, "degree_drift", drift);
  detail(r, "gauge_covariance_error", covariance);
  detail(r, "flows_converged", rep.converged && rep_rotated.converged);
  detail(r, "reports_identical_1_vs_8_workers", identical);
  (void)scale;
  finish(r, frozen_identical && drift <= 1e-9 && covariance <= 1e-10 && rep.converged && rep_rotated.converged &&
                identical,
         timer);
  return r;
}

CheckResult check_section_dimension(const CheckScale& scale) {
  const Timer timer;
  auto r = begin("section_dimension", 60.0);
  const TorusLattice lat(scale.section_lattice);
  bool ok = true;
  for (int d = 1; d <= 3; ++d) {
    LatticePairState st{lat,
                        {make_constant_curvature_line_bundle(lat, d)},
                        SectionField(lat.sites(), CVector::Zero(1)),
                        RepSpec::standard(1),
                        SubgroupSetting::all_full(ProductGroupSpec({1}), {0.0}),
                        0.0,
                        {}};
    const auto hs = holomorphic_sections(st, d);
    detail(r, fmt::format("kernel_dimension_d{}", d), hs.kernel_dimension);
    detail(r, fmt::format("gap_ratio_d{}", d), hs.gap_ratio);
    ok &= hs.kernel_dimension == d && hs.gap_ratio > 1e3;
  }
  detail(r, "lattice", scale.section_lattice);
  finish(r, ok, timer);
  return r;
}

std::vector<CheckResult> run_checks(const CheckScale& scale, std::uint64_t seed, int workers) {
  return {check_moment_maps(scale, seed),       check_kempf_ness(scale, seed, workers),
          check_functional(scale, seed),        check_vortex_threshold(scale, seed, workers),
          check_coherent_systems(scale, seed),  check_higgs(scale, seed),
          check_twisted_triples(scale, seed),   check_ssc_reduction(scale, seed, workers),
          check_flow_hygiene(scale, seed),      check_section_dimension(scale)};
}

}  // namespace gpwb::experiments
