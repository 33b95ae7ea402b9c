#include "gpwb/experiments/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "gpwb/io.hpp"

namespace gpwb::experiments {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& field, const std::string& what) {
  throw ConfigError(line_of(n), field, what);
}

void check_keys(const YAML::Node& map, const std::string& section, const std::set<std::string>& allowed) {
  if (!map.IsMap()) fail(map, section, "expected a mapping");
  for (auto it = map.begin(); it != map.end(); ++it) {
    const auto key = it->first.as<std::string>();
    if (!allowed.contains(key)) {
      const std::string where = section.empty() ? key : section + "." + key;
      fail(it->first, where, fmt::format("unknown key '{}'", where));
    }
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& field, const char* expected) {
  if (!n.IsScalar()) fail(n, field, fmt::format("'{}' expects {}", field, expected));
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, field, fmt::format("'{}' expects {}", field, expected));
  }
}

int positive_int(const YAML::Node& n, const std::string& field) {
  const int v = scalar<int>(n, field, "an integer");
  if (v < 1) fail(n, field, fmt::format("'{}' must be positive", field));
  return v;
}

double positive_double(const YAML::Node& n, const std::string& field) {
  const double v = scalar<double>(n, field, "a number");
  if (!(v > 0.0)) fail(n, field, fmt::format("'{}' must be positive", field));
  return v;
}

std::vector<std::vector<int>> int_table(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence()) fail(n, field, fmt::format("'{}' expects a list of integer lists", field));
  std::vector<std::vector<int>> out;
  for (const auto& row : n) {
    if (!row.IsSequence()) fail(row, field, fmt::format("'{}' expects a list of integer lists", field));
    std::vector<int> r;
    for (const auto& x : row) r.push_back(scalar<int>(x, field, "integers"));
    out.push_back(std::move(r));
  }
  return out;
}

CurveFixture parse_fixture(const YAML::Node& n, Mode mode) {
  check_keys(n, "fixture", {"degrees", "support", "levels"});
  ExampleKind kind;
  try {
    kind = fixture_kind(mode);
  } catch (const ConfigError&) {
    fail(n, "fixture", fmt::format("mode {} takes no fixture", to_string(mode)));
  }
  for (const char* key : {"degrees", "support", "levels"})
    if (!n[key]) fail(n, std::string("fixture.") + key, fmt::format("missing key 'fixture.{}'", key));
  CurveFixture fx;
  fx.kind = kind;
  fx.degrees = int_table(n["degrees"], "fixture.degrees");
  fx.support = int_table(n["support"], "fixture.support");
  const auto levels = n["levels"];
  if (!levels.IsSequence()) fail(levels, "fixture.levels", "'fixture.levels' expects a list");
  for (const auto& c : levels) {
    try {
      fx.levels.push_back(parse_rational(scalar<std::string>(c, "fixture.levels", "rationals")));
    } catch (const std::invalid_argument& e) {
      fail(c, "fixture.levels", e.what());
    }
  }
  try {
    fx.validate();
  } catch (const std::invalid_argument& e) {
    fail(n, "fixture", std::string("inconsistent fixture: ") + e.what());
  }
  return fx;
}

std::string flow_list(const std::vector<std::vector<int>>& rows) {
  std::string out = "[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += i ? ", [" : "[";
    for (std::size_t j = 0; j < rows[i].size(); ++j) out += (j ? ", " : "") + std::to_string(rows[i][j]);
    out += "]";
  }
  return out + "]";
}

}  // namespace

ConfigError::ConfigError(int line, std::string field, const std::string& what)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, what) : what),
      line_(line),
      field_(std::move(field)) {}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kempf_ness: return "kempf_ness";
    case Mode::vortex_threshold: return "vortex_threshold";
    case Mode::pair: return "pair";
    case Mode::triple: return "triple";
    case Mode::coherent_system: return "coherent_system";
    case Mode::twisted_triple: return "twisted_triple";
    case Mode::higgs: return "higgs";
    case Mode::invariant_suite: return "invariant_suite";
  }
  throw std::logic_error("unreachable");
}

Mode mode_from_string(const std::string& name) {
  for (Mode m : kAllModes)
    if (to_string(m) == name) return m;
  throw ConfigError(0, "mode", fmt::format("unknown mode '{}'", name));
}

ExampleKind fixture_kind(Mode mode) {
  switch (mode) {
    case Mode::pair: return ExampleKind::pair_tensor;
    case Mode::triple: return ExampleKind::triple_fixed_e2;
    case Mode::coherent_system: return ExampleKind::coherent_system;
    case Mode::twisted_triple: return ExampleKind::twisted_triple;
    case Mode::higgs: return ExampleKind::higgs;
    default: throw ConfigError(0, "mode", fmt::format("mode {} runs no fixture", to_string(mode)));
  }
}

ExperimentConfig default_config(Mode mode) {
  ExperimentConfig c;
  c.mode = mode;
  if (mode == Mode::vortex_threshold) c.lattice_size = 32;
  if (mode == Mode::invariant_suite) c.samples = 1;
  return c;
}

ExperimentConfig parse_config(const std::string& text, std::optional<Mode> expected) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.mark.line + 1, "", std::string("YAML syntax error: ") + e.msg);
  }
  if (root.IsNull()) {
    if (!expected) throw ConfigError(0, "mode", "empty configuration without a mode");
    return default_config(*expected);
  }
  check_keys(root, "", {"mode", "seed", "lattice", "fixture", "samples", "threshold", "flow", "output", "workers"});

  Mode mode;
  if (root["mode"]) {
    try {
      mode = mode_from_string(scalar<std::string>(root["mode"], "mode", "a mode name"));
    } catch (const ConfigError& e) {
      fail(root["mode"], "mode", e.what());
    }
    if (expected && mode != *expected)
      fail(root["mode"], "mode",
           fmt::format("config is for mode {} but {} was requested", to_string(mode), to_string(*expected)));
  } else if (expected) {
    mode = *expected;
  } else {
    throw ConfigError(0, "mode", "missing key 'mode'");
  }

  ExperimentConfig c = default_config(mode);
  if (const auto n = root["seed"]) c.seed = scalar<std::uint64_t>(n, "seed", "an unsigned integer");
  if (const auto n = root["samples"]) c.samples = positive_int(n, "samples");
  if (const auto n = root["workers"]) c.workers = positive_int(n, "workers");
  if (const auto n = root["lattice"]) {
    check_keys(n, "lattice", {"size"});
    if (n["size"]) {
      c.lattice_size = positive_int(n["size"], "lattice.size");
      if (c.lattice_size < 2) fail(n["size"], "lattice.size", "'lattice.size' must be at least 2");
    }
  }
  if (const auto n = root["fixture"]) c.fixture = parse_fixture(n, mode);
  if (const auto n = root["threshold"]) {
    if (mode != Mode::vortex_threshold) fail(n, "threshold", "'threshold' only applies to vortex_threshold");
    check_keys(n, "threshold", {"degree", "scan", "width"});
    if (n["degree"]) c.degree = positive_int(n["degree"], "threshold.degree");
    if (const auto s = n["scan"]) {
      if (!s.IsSequence() || s.size() != 2) fail(s, "threshold.scan", "'threshold.scan' expects [lo, hi]");
      c.scan_lo = positive_double(s[0], "threshold.scan");
      c.scan_hi = positive_double(s[1], "threshold.scan");
      if (c.scan_lo >= c.scan_hi) fail(s, "threshold.scan", "'threshold.scan' needs lo < hi");
    }
    if (n["width"]) c.bracket_width = positive_double(n["width"], "threshold.width");
  }
  if (const auto n = root["flow"]) {
    check_keys(n, "flow", {"tol", "max_iter", "step", "max_step", "min_step", "divergence"});
    if (n["tol"]) c.flow.tol = positive_double(n["tol"], "flow.tol");
    if (n["max_iter"]) c.flow.max_iter = positive_int(n["max_iter"], "flow.max_iter");
    if (n["step"]) c.flow.step = positive_double(n["step"], "flow.step");
    if (n["max_step"]) c.flow.max_step = positive_double(n["max_step"], "flow.max_step");
    if (n["min_step"]) c.flow.min_step = positive_double(n["min_step"], "flow.min_step");
    if (n["divergence"]) c.flow.divergence_log_metric = positive_double(n["divergence"], "flow.divergence");
  }
  if (const auto n = root["output"]) {
    check_keys(n, "output", {"dir"});
    if (n["dir"]) c.out_dir = scalar<std::string>(n["dir"], "output.dir", "a path");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Mode> expected) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), expected);
}

std::string to_yaml(const ExperimentConfig& c, bool runtime_fields) {
  std::string out;
  out += fmt::format("mode: {}\n", to_string(c.mode));
  out += fmt::format("seed: {}\n", c.seed);
  out += fmt::format("samples: {}\n", c.samples);
  if (runtime_fields) out += fmt::format("workers: {}\n", c.workers);
  out += fmt::format("lattice:\n  size: {}\n", c.lattice_size);
  if (c.fixture) {
    out += "fixture:\n";
    out += fmt::format("  degrees: {}\n", flow_list(c.fixture->degrees));
    out += fmt::format("  support: {}\n", flow_list(c.fixture->support));
    out += "  levels: [";
    for (std::size_t i = 0; i < c.fixture->levels.size(); ++i)
      out += fmt::format("{}\"{}\"", i ? ", " : "", gpwb::to_string(c.fixture->levels[i]));
    out += "]\n";
  }
  if (c.mode == Mode::vortex_threshold)
    out += fmt::format("threshold:\n  degree: {}\n  scan: [{}, {}]\n  width: {}\n", c.degree, format_double(c.scan_lo),
                       format_double(c.scan_hi), format_double(c.bracket_width));
  out += fmt::format("flow:\n  tol: {}\n  max_iter: {}\n  step: {}\n  max_step: {}\n  min_step: {}\n  divergence: {}\n",
                     format_double(c.flow.tol), c.flow.max_iter, format_double(c.flow.step),
                     format_double(c.flow.max_step), format_double(c.flow.min_step),
                     format_double(c.flow.divergence_log_metric));
  if (runtime_fields) out += fmt::format("output:\n  dir: \"{}\"\n", c.out_dir.generic_string());
  return out;
}

}  // namespace gpwb::experiments
