#include "gpwb/experiments/runner.hpp"

#include <chrono>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "gpwb/assemble.hpp"
#include "gpwb/io.hpp"
#include "gpwb/experiments/checks.hpp"
#include "gpwb/experiments/pool.hpp"
#include "gpwb/experiments/scenarios.hpp"

namespace gpwb::experiments {

namespace {

constexpr const char* kScope =
    "verdicts are exact over sub-objects generated by the summands of each fixture";

std::string list(const std::vector<double>& v) {
  std::vector<std::string> parts;
  for (double x : v) parts.push_back(format_double(x));
  return fmt::format("[{}]", fmt::join(parts, ", "));
}

std::string nested(const std::vector<std::vector<int>>& v) {
  std::vector<std::string> parts;
  for (const auto& row : v) parts.push_back(fmt::format("[{}]", fmt::join(row, ", ")));
  return fmt::format("[{}]", fmt::join(parts, ", "));
}

void describe_flow(Report& r, const LatticeFlowReport& f) {
  r.set("flow", outcome_label(f));
  r.set("iterations", f.iterations);
  r.set("rejections", f.rejections);
  r.set("l2_residual", f.final_residual);
  r.set("linf_residual", f.final_linf);
  r.set("sup_log_metric", f.sup_log_metric);
  r.set("degrees_before", list(f.degrees_before));
  r.set("degrees_after", list(f.degrees_after));
  r.set("factor_residual_linf", list(f.factor_residual_linf));
  r.set("holomorphicity_before", f.holomorphicity_before);
  r.set("holomorphicity_after", f.holomorphicity_after);
}

Report run_kempf_ness(const ExperimentConfig& c) {
  std::vector<KnSample> samples(static_cast<std::size_t>(c.samples));
  parallel_for(c.samples, c.workers,
               [&](int i) { samples[i] = kempf_ness_sample(derive_seed(c.seed, i), c.flow.tol); });
  Report r;
  int simple = 0, stable = 0, marginal = 0, converged = 0, agree = 0, disagree = 0, oracle_mismatch = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const std::string p = fmt::format("sample.{}.", i);
    r.set(p + "m", s.m);
    r.set(p + "level", s.level);
    r.set(p + "simple", s.simple);
    r.set(p + "verdict", s.marginal ? "strictly semistable" : s.stable ? "stable" : "unstable");
    r.set(p + "slack", s.slack);
    r.set(p + "rank_criterion", s.oracle_stable ? "stable" : "unstable");
    r.set(p + "flow", s.converged ? "converged" : s.diverged ? "diverged" : "max_iter");
    r.set(p + "iterations", s.iterations);
    r.set(p + "residual", s.residual);
    simple += s.simple;
    stable += s.stable;
    marginal += s.marginal;
    converged += s.converged;
    if (s.simple && !s.marginal) (s.converged == s.stable ? agree : disagree)++;
    if (!s.marginal) oracle_mismatch += s.oracle_stable != s.stable;
  }
  Report out;
  out.set("samples", c.samples);
  out.set("simple", simple);
  out.set("stable", stable);
  out.set("strictly_semistable", marginal);
  out.set("converged", converged);
  out.set("flow_agrees_on_simple", agree);
  out.set("flow_disagrees_on_simple", disagree);
  out.set("rank_criterion_mismatches", oracle_mismatch);
  out.merge("", r);
  return out;
}

Report run_vortex(const ExperimentConfig& c) {
  SectionCache cache;
  const auto scan = vortex_threshold(c.lattice_size, c.degree, c.scan_lo, c.scan_hi, c.bracket_width, c.flow, c.seed,
                                     c.workers, cache);
  Report r;
  r.set("expected_threshold", c.degree);
  r.set("bracketed", scan.bracketed);
  r.set("bracket_lo", scan.lo);
  r.set("bracket_hi", scan.hi);
  r.set("marginal_band", fmt::format("[{}, {}]", format_double(scan.lo), format_double(scan.hi)));
  r.set("newton_metric_sup_diff", scan.newton_max_diff ? format_double(*scan.newton_max_diff) : "n/a");
  r.set("probes", scan.probes.size());
  for (std::size_t i = 0; i < scan.probes.size(); ++i) {
    const auto& p = scan.probes[i];
    Report pr;
    pr.set("level", p.level);
    describe_flow(pr, p.flow);
    pr.set("obstruction", c.degree - p.level);
    if (p.newton_metric_diff) pr.set("newton_metric_sup_diff", *p.newton_metric_diff);
    const std::string csv = fmt::format("probe_{}_trajectory.csv", i);
    pr.set("trajectory", csv);
    r.merge(fmt::format("probe.{}.", i), pr);
    r.add_csv(csv, p.flow.trajectory);
  }
  return r;
}

Report run_fixtures(const ExperimentConfig& c) {
  const auto fixtures = c.fixture ? std::vector<CurveFixture>{*c.fixture} : builtin_fixtures(fixture_kind(c.mode));
  SectionCache cache;
  std::vector<FixtureRun> runs(fixtures.size());
  parallel_for(static_cast<int>(fixtures.size()), c.workers, [&](int i) {
    runs[i] = run_fixture(fixtures[i], c.lattice_size, derive_seed(c.seed, i), c.flow, cache);
  });
  Report r;
  r.set("scope", kScope);
  r.set("fixtures", runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    Report fr;
    std::vector<std::string> levels;
    for (const auto& l : run.fixture.levels) levels.push_back(gpwb::to_string(l));
    fr.set("kind", gpwb::to_string(run.fixture.kind));
    fr.set("degrees", nested(run.fixture.degrees));
    fr.set("support", nested(run.fixture.support));
    fr.set("levels", fmt::format("[{}]", fmt::join(levels, ", ")));
    fr.set("verdict", verdict_label(run.verdict));
    fr.set("slack", run.verdict.slack ? gpwb::to_string(*run.verdict.slack) : "n/a");
    fr.set("witness", run.verdict.witness.empty() ? "none" : run.verdict.witness);
    fr.set("conditions", run.verdict.conditions);
    fr.set("construction_tolerance", run.construction_tolerance);
    for (std::size_t w = 0; w < run.warnings.size(); ++w) fr.set(fmt::format("warning.{}", w), run.warnings[w]);
    describe_flow(fr, run.flow);
    for (const auto& [k, v] : run.diagnostics) fr.set(k, v);
    fr.set("agreement", agreement_label(run.verdict, run.flow));
    const std::string csv = fmt::format("run_{}_trajectory.csv", i);
    fr.set("trajectory", csv);
    r.merge(fmt::format("run.{}.", i), fr);
    r.add_csv(csv, run.flow.trajectory);
  }
  return r;
}

Report run_suite(const ExperimentConfig& c, Timings* timings) {
  CheckScale scale = CheckScale::quick();
  const int k = std::max(1, c.samples);
  scale.moment_instances *= k;
  scale.kempf_ness_fixtures *= k;
  scale.functional_instances *= k;
  scale.trace_configs *= k;
  scale.twisted_fixtures *= k;
  scale.ssc_fixtures *= k;
  const auto results = run_checks(scale, c.seed, c.workers);
  Report r;
  int met = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& res = results[i];
    met += res.criteria_met;
    const std::string p = fmt::format("check.{}.{}.", i + 1, res.name);
    r.set(p + "result", res.criteria_met ? "PASS" : "FAIL");
    for (const auto& [key, value] : res.details) r.set(p + key, value);
    if (timings) timings->emplace_back(res.name, res.seconds);
  }
  Report out;
  out.set("checks", results.size());
  out.set("passed", met);
  out.merge("", r);
  return out;
}

}  // namespace

Report run(const ExperimentConfig& config, Timings* timings) {
  const auto start = std::chrono::steady_clock::now();
  Report r;
  r.set("mode", to_string(config.mode));
  r.set_block("config", to_yaml(config, false));
  switch (config.mode) {
    case Mode::kempf_ness: r.merge("", run_kempf_ness(config)); break;
    case Mode::vortex_threshold: r.merge("", run_vortex(config)); break;
    case Mode::invariant_suite: r.merge("", run_suite(config, timings)); break;
    default: r.merge("", run_fixtures(config)); break;
  }
  if (timings)
    timings->emplace_back("total",
                          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return r;
}

}  // namespace gpwb::experiments
